"""Constrained first-order reformulation of higher-order variational problems.

The compiled extension carries the whole engine; this package only re-exports
it so both the installed-wheel layout (extension inside the package) and the
build-tree layout (extension next to the package) resolve.
"""

try:
    from ._jetlag import *  # noqa: F401,F403
    from ._jetlag import __doc__ as _doc
except ImportError:
    from _jetlag import *  # noqa: F401,F403
    from _jetlag import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
