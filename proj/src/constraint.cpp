#include "jetlag/constraint.hpp"

#include <algorithm>

namespace jetlag {

ConstraintMorphism constraint_morphism(const BundleSignature& sig) {
  ConstraintMorphism psi{sig, {}};
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int i = 1; i <= sig.n; ++i) {
        Expr u = jet_var(alpha, I);
        Expr component = sub(formal_deriv(u, i), jet_var(alpha, I.append(i)));
        psi.components.push_back({alpha, I, i, component});
      }
  return psi;
}

RegularityReport regularity_certificate(const ConstraintMorphism& psi) {
  RegularityReport rep;
  rep.rows = static_cast<int>(psi.components.size());
  rep.cols = rep.rows;  // fiber coordinates in the same (alpha, I, i) order
  rep.entries_zero_one = true;
  rep.identity_block = true;

  // The fiber coordinates of the affine projection are exactly the
  // formal-derivative symbols carried by the components.
  std::vector<Expr> fiber;
  fiber.reserve(psi.components.size());
  for (const auto& c : psi.components)
    fiber.push_back(formal_deriv(jet_var(c.alpha, c.index), c.dir));

  std::vector<std::vector<Rational>> J(rep.rows,
                                       std::vector<Rational>(rep.cols));
  for (int r = 0; r < rep.rows; ++r)
    for (int c = 0; c < rep.cols; ++c) {
      Expr d = partial(psi.components[r].expr, fiber[c]);
      if (d->kind != NodeKind::Rational) {
        rep.entries_zero_one = false;
        rep.identity_block = false;
        continue;
      }
      J[r][c] = d->value;
      if (!(d->value.is_zero() || d->value.is_one()))
        rep.entries_zero_one = false;
      if ((r == c) != d->value.is_one()) rep.identity_block = false;
    }

  // Exact rank by Gaussian elimination over the rationals.
  int rank = 0;
  for (int col = 0; col < rep.cols && rank < rep.rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rep.rows; ++r)
      if (!J[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(J[rank], J[pivot]);
    for (int r = rank + 1; r < rep.rows; ++r) {
      if (J[r][col].is_zero()) continue;
      Rational f = J[r][col] / J[rank][col];
      for (int c2 = col; c2 < rep.cols; ++c2)
        J[r][c2] -= f * J[rank][c2];
    }
    ++rank;
  }
  rep.rank = rank;
  rep.full_rank = rank == rep.rows;
  return rep;
}

AugmentedLagrangian augment(const Expr& L, const BundleSignature& sig) {
  if (contains_kind(L, NodeKind::Mom) ||
      contains_kind(L, NodeKind::FormalDeriv))
    throw ExprError("constraint: not a pure Lagrangian density");
  validate_density(L, sig);

  ConstraintMorphism psi = constraint_morphism(sig);
  std::vector<Expr> terms{L};
  for (const auto& c : psi.components)
    terms.push_back(mul(mom_var(c.alpha, c.index, c.dir), c.expr));
  return {sig, L, sum_of(terms), std::move(psi)};
}

ExprMap constraint_substitution(const BundleSignature& sig) {
  ExprMap subst;
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int i = 1; i <= sig.n; ++i)
        subst[formal_deriv(jet_var(alpha, I), i)] =
            jet_var(alpha, I.append(i));
  return subst;
}

MultiplierRecovery recover_multipliers(const Expr& F,
                                       const ConstraintMorphism& psi) {
  MultiplierRecovery out;
  std::vector<Expr> reconstruction;
  for (const auto& c : psi.components) {
    Expr lambda = partial(F, formal_deriv(jet_var(c.alpha, c.index), c.dir));
    if (contains_kind(lambda, NodeKind::FormalDeriv))
      throw ExprError(
          "constraint: multiplier recovery requires coefficients free of "
          "formal-derivative symbols");
    out.lambdas.push_back(lambda);
    reconstruction.push_back(mul(lambda, c.expr));
  }
  out.residual = sub(F, sum_of(reconstruction));
  out.exact = is_zero(out.residual);
  return out;
}

}  // namespace jetlag
