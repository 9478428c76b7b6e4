#include "jetlag/jet.hpp"

#include <string>

namespace jetlag {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long acc = 1;
  for (int j = 1; j <= k; ++j) acc = acc * (n - k + j) / j;
  return acc;
}

long long multi_index_count(int n, int order) {
  return binomial(order + n - 1, n - 1);
}

std::vector<MultiIndex> multi_indices_of_order(int n, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur;
  cur.reserve(order);
  // Nondecreasing entry sequences enumerate each multiset exactly once.
  auto rec = [&](auto&& self, int lo) -> void {
    if (static_cast<int>(cur.size()) == order) {
      out.push_back(MultiIndex(cur));
      return;
    }
    for (int i = lo; i <= n; ++i) {
      cur.push_back(i);
      self(self, i);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int max_order) {
  std::vector<MultiIndex> out;
  for (int q = 0; q <= max_order; ++q)
    for (auto& I : multi_indices_of_order(n, q)) out.push_back(std::move(I));
  return out;
}

std::vector<std::pair<MultiIndex, int>> decompositions(const MultiIndex& K) {
  std::vector<std::pair<MultiIndex, int>> out;
  int last = 0;
  for (int j : K.entries()) {
    if (j == last) continue;
    last = j;
    out.emplace_back(K.remove_one(j), j);
  }
  return out;
}

Expr total_derivative(const Expr& e, int i, const BundleSignature& sig,
                      DerivMode mode, int max_order) {
  if (i < 1 || i > sig.n)
    throw ExprError("jet: derivative direction " + std::to_string(i) +
                    " outside base dimension " + std::to_string(sig.n));
  if (max_order < 0) max_order = sig.k + 2;

  Expr out = partial(e, indep_var(i));
  for (const Expr& a : collect_atoms(e)) {
    Expr da;
    switch (a->kind) {
      case NodeKind::Indep:
        continue;  // explicit dependence already accounted for
      case NodeKind::Jet:
        if (mode == DerivMode::Prolongation) {
          if (a->index.order() + 1 > max_order)
            throw ExprError("jet: prolongation of " + atom_name(a) +
                            " exceeds jet order cap " +
                            std::to_string(max_order));
          da = jet_var(a->dep, a->index.append(i));
        } else {
          da = formal_deriv(a, i);
        }
        break;
      case NodeKind::Mom:
        if (mode == DerivMode::Prolongation)
          throw ExprError(
              "jet: momentum symbols have no prolongation; use the formal "
              "mode");
        da = formal_deriv(a, i);
        break;
      case NodeKind::FormalDeriv:
        // Rejected by the factory: keeps every produced system first order.
        da = formal_deriv(a, i);
        break;
      default:
        continue;
    }
    Expr coef = partial(e, a);
    if (coef->kind == NodeKind::Rational && coef->value.is_zero()) continue;
    out = add(out, mul(coef, da));
  }
  return out;
}

Expr iterated_total_derivative(const Expr& e, const MultiIndex& I,
                               const BundleSignature& sig, DerivMode mode,
                               int max_order) {
  Expr out = e;
  for (int i : I.entries())
    out = total_derivative(out, i, sig, mode, max_order);
  return out;
}

void validate_density(const Expr& e, const BundleSignature& sig) {
  if (contains_kind(e, NodeKind::Mom))
    throw ExprError("jet: a density may not depend on momentum symbols");
  if (contains_kind(e, NodeKind::FormalDeriv))
    throw ExprError("jet: a density may not contain formal derivative symbols");
  for (const Expr& a : collect_atoms(e)) {
    if (a->kind == NodeKind::Indep && a->coord > sig.n)
      throw ExprError("jet: base coordinate " + atom_name(a) +
                      " outside base dimension " + std::to_string(sig.n));
    if (a->kind == NodeKind::Jet) {
      if (a->dep > sig.m)
        throw ExprError("jet: dependent index of " + atom_name(a) +
                        " outside fiber dimension " + std::to_string(sig.m));
      for (int entry : a->index.entries())
        if (entry > sig.n)
          throw ExprError("jet: multi-index entry of " + atom_name(a) +
                          " outside base dimension " + std::to_string(sig.n));
      if (a->index.order() > sig.k)
        throw ExprError("jet: jet order of " + atom_name(a) +
                        " exceeds the declared order " + std::to_string(sig.k));
    }
  }
}

}  // namespace jetlag
