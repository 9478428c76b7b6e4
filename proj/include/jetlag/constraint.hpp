#pragma once

#include <vector>

#include "jetlag/expr.hpp"
#include "jetlag/jet.hpp"
#include "jetlag/signature.hpp"

namespace jetlag {

/// One component of the constraint morphism: du^a_I/dx^i - u^a_{Ii}, the
/// coordinate condition cutting the holonomic locus out of the first jet of
/// the order-(k-1) prolongation bundle.
struct ConstraintComponent {
  int alpha = 1;
  MultiIndex index;  // |I| <= k-1
  int dir = 1;
  Expr expr;         // formal_deriv(u^a_I, i) - u^a_{append(I,i)}
};

struct ConstraintMorphism {
  BundleSignature sig;
  std::vector<ConstraintComponent> components;  // (alpha, I, i) lexicographic
};

/// The order-k density together with its multiplier-augmented first-order
/// density L1 = L + sum over components of p_a^{I,i} * (du^a_I/dx^i - u^a_{Ii}).
struct AugmentedLagrangian {
  BundleSignature sig;
  Expr L;
  Expr L1;
  ConstraintMorphism psi;
};

/// Rank report for the fiber Jacobian of the constraint morphism with
/// respect to the formal-derivative coordinates, in component order. The
/// canonical morphism yields the identity block; the check guards
/// refactoring rather than mathematics.
struct RegularityReport {
  int rows = 0;
  int cols = 0;
  int rank = 0;
  bool entries_zero_one = false;
  bool identity_block = false;
  bool full_rank = false;
};

/// Result of writing an expression F as sum lambda_c * psi_c. `exact` is set
/// when the reconstruction residual F - sum lambda*psi is identically zero.
struct MultiplierRecovery {
  std::vector<Expr> lambdas;  // one per component, component order
  Expr residual;
  bool exact = false;
};

ConstraintMorphism constraint_morphism(const BundleSignature& sig);

RegularityReport regularity_certificate(const ConstraintMorphism& psi);

AugmentedLagrangian augment(const Expr& L, const BundleSignature& sig);

/// The holonomic substitution du^a_I/dx^i -> u^a_{append(I,i)} over all
/// multiplier slots; applying it sends every psi component (and hence the
/// multiplier part of L1) to zero.
ExprMap constraint_substitution(const BundleSignature& sig);

/// Peels multiplier coefficients off F = sum lambda_c * psi_c by reading
/// dF/d(du-symbol) per component. Coefficients containing formal-derivative
/// symbols are out of scope for this reading and rejected.
MultiplierRecovery recover_multipliers(const Expr& F,
                                       const ConstraintMorphism& psi);

}  // namespace jetlag
