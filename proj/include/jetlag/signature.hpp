#pragma once

#include <string>

#include "jetlag/errors.hpp"

namespace jetlag {

/// Shape of the underlying fibered manifold: n independent coordinates,
/// m dependent coordinates, and the differential order k of the density.
/// k >= 1 because an order-0 density carries no derivative to trade for a
/// constraint.
struct BundleSignature {
  int n = 1;
  int m = 1;
  int k = 1;

  BundleSignature() = default;
  BundleSignature(int n_, int m_, int k_) : n(n_), m(m_), k(k_) { validate(); }

  void validate() const {
    if (n < 1 || m < 1)
      throw ExprError("expr: bundle signature requires n >= 1 and m >= 1");
    if (k < 1)
      throw ExprError("expr: order-0 density has trivial dynamics");
    if (k > 4) throw ExprError("expr: differential order capped at k <= 4");
    if (n > 3) throw ExprError("expr: independent dimension capped at n <= 3");
    if (m > 4) throw ExprError("expr: dependent dimension capped at m <= 4");
  }

  friend bool operator==(const BundleSignature& a,
                         const BundleSignature& b) noexcept {
    return a.n == b.n && a.m == b.m && a.k == b.k;
  }

  std::string str() const {
    return "(n=" + std::to_string(n) + ", m=" + std::to_string(m) +
           ", k=" + std::to_string(k) + ")";
  }
};

}  // namespace jetlag
