#pragma once

#include <string>
#include <vector>

#include "jetlag/constraint.hpp"
#include "jetlag/variational.hpp"

namespace jetlag {

/// Fiber-derivative assignments of the degenerate Legendre transform: the
/// momentum dual to u^a_I pulls back to the multiplier p_a^{I,i} below top
/// order and to zero at top order; the momenta dual to the multipliers pull
/// back to zero. The map is a function of the signature alone.
struct LegendreMap {
  struct PAssignment {
    int alpha;
    MultiIndex index;  // |I| <= k
    int dir;
    Expr value;        // p_a^{I,i} for |I| <= k-1, else 0
  };
  struct QAssignment {
    int alpha;
    MultiIndex index;  // |J| <= k-1
    int slot;          // the j of p_a^{J,j}
    int dir;
    Expr value;        // always 0
  };
  BundleSignature sig;
  std::vector<PAssignment> p_assignments;  // (alpha, I, i) lexicographic
  std::vector<QAssignment> q_assignments;  // (alpha, J, j, i) lexicographic
};

struct ConjugatePair {
  int alpha;
  MultiIndex index;  // |I| <= k-1
  int dir;
  Expr u;            // u^a_I
  Expr p;            // p_a^{I,i}
};

/// Local data of the covariant Hamiltonian picture: H plus the conjugate
/// pairing is everything the boundary form needs, so the form itself is
/// never materialized.
struct DWData {
  Expr H;  // sum p_a^{I,i} u^a_{Ii} - L; free of formal-derivative symbols
  std::vector<ConjugatePair> pairs;
  std::vector<Expr> non_dynamical;  // top-order u^a_K, |K| = k
  EquationSystem system;            // DW-u, DW-p, DW-algebraic blocks
};

/// One matched equation inside a theorem certificate: left - sign*right was
/// tested for zero.
struct EquationMatch {
  Label left;
  Label right;
  int sign = 1;
  bool zero = false;
  bool probabilistic = false;
};

struct TheoremCertificate {
  bool structural_ok = true;
  std::vector<std::string> structural_notes;
  std::vector<EquationMatch> matches;

  bool pass() const;
  bool all_exact() const;
};

/// The first-order stationarity system of the augmented density, built
/// directly from the closed-form variation (not via the generic operator):
///   ELH-u(a,K): dL/du^a_K - sum over decompositions(K) of p_a^{J,j}
///               - (below top order) sum_i d p_a^{K,i}/dx^i = 0
///   ELH-p(a,I,i): du^a_I/dx^i - u^a_{Ii} = 0
EquationSystem elh_system(const AugmentedLagrangian& aug);

/// Certifies that elh_system agrees equation-by-equation with the generic
/// first-order Euler-Lagrange operator applied to L1.
TheoremCertificate check_theorem2(const AugmentedLagrangian& aug);

/// The Legendre assignments; reads only aug.sig, which is the independence
/// from the density in executable form.
LegendreMap legendre_transform(const AugmentedLagrangian& aug);

/// Confirms the assignment table against the fiber derivatives of L1:
/// dL1/d(du^a_I/dx^i) must equal the P assignment and dL1/d(dp) must be 0.
/// Exact structural comparison.
bool legendre_fiber_check(const AugmentedLagrangian& aug,
                          const LegendreMap& map);

DWData dw_data(const AugmentedLagrangian& aug);

/// Certifies the label-level correspondence between the DW system and the
/// ELH system: DW-u matches ELH-p with sign +1; DW-p and DW-algebraic match
/// ELH-u with sign -1. The sign is recorded per match.
TheoremCertificate check_theorem3(const AugmentedLagrangian& aug);

}  // namespace jetlag
