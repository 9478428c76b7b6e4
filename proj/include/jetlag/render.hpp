#pragma once

#include <string>
#include <vector>

#include "jetlag/expr.hpp"
#include "jetlag/signature.hpp"

namespace jetlag {

/// Problem-level display names for coordinates. Rendering never invents
/// mathematics, only notation; the wire format in sexpr.hpp stays numeric.
struct NameTable {
  std::vector<std::string> indep;
  std::vector<std::string> dep;

  static NameTable defaults(const BundleSignature& sig);
  const std::string& indep_name(int i) const;
  const std::string& dep_name(int alpha) const;
};

/// Plain-text rendering, mirroring the input grammar for jets (q[t,t]) and
/// the mechanics state names for one-dimensional momenta (p0, p1, ..).
std::string render_text(const Expr& e, const NameTable& names);

std::string render_latex(const Expr& e, const NameTable& names);

}  // namespace jetlag
