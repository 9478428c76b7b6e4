#include "jetlag/variational.hpp"

#include <algorithm>

namespace jetlag {

namespace {

const char* kind_name(LabelKind k) {
  switch (k) {
    case LabelKind::ELKth: return "ELKth";
    case LabelKind::ELHu: return "ELH-u";
    case LabelKind::ELHp: return "ELH-p";
    case LabelKind::DWu: return "DW-u";
    case LabelKind::DWp: return "DW-p";
    case LabelKind::DWalg: return "DW-algebraic";
  }
  return "?";
}

bool has_index(LabelKind k) { return k != LabelKind::ELKth; }
bool has_dir(LabelKind k) {
  return k == LabelKind::ELHp || k == LabelKind::DWu;
}

}  // namespace

std::string Label::str() const {
  std::string s = std::string(kind_name(kind)) + "(" + std::to_string(alpha);
  if (has_index(kind)) s += "," + index.str();
  if (has_dir(kind)) s += "," + std::to_string(dir);
  s += ")";
  return s;
}

int Label::cmp(const Label& o) const {
  if (kind != o.kind)
    return static_cast<int>(kind) < static_cast<int>(o.kind) ? -1 : 1;
  if (alpha != o.alpha) return alpha < o.alpha ? -1 : 1;
  if (int c = index.cmp(o.index)) return c;
  return dir == o.dir ? 0 : (dir < o.dir ? -1 : 1);
}

Label label_elkth(int alpha) { return {LabelKind::ELKth, alpha, {}, 0}; }
Label label_elh_u(int alpha, const MultiIndex& K) {
  return {LabelKind::ELHu, alpha, K, 0};
}
Label label_elh_p(int alpha, const MultiIndex& I, int i) {
  return {LabelKind::ELHp, alpha, I, i};
}
Label label_dw_u(int alpha, const MultiIndex& I, int i) {
  return {LabelKind::DWu, alpha, I, i};
}
Label label_dw_p(int alpha, const MultiIndex& I) {
  return {LabelKind::DWp, alpha, I, 0};
}
Label label_dw_alg(int alpha, const MultiIndex& K) {
  return {LabelKind::DWalg, alpha, K, 0};
}

const Expr* EquationSystem::find(const Label& l) const {
  for (const auto& eq : equations)
    if (eq.label == l) return &eq.residual;
  return nullptr;
}

EquationSystem euler_lagrange(const Expr& L, const BundleSignature& sig) {
  if (contains_kind(L, NodeKind::Mom) ||
      contains_kind(L, NodeKind::FormalDeriv))
    throw ExprError("variational: not a pure Lagrangian density");
  validate_density(L, sig);

  // Iterated total derivatives reach jet order k + |I| <= 2k.
  const int cap = 2 * sig.k;
  EquationSystem sys{sig, {}};
  for (int alpha = 1; alpha <= sig.m; ++alpha) {
    std::vector<Expr> terms;
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k)) {
      Expr dLdu = partial(L, jet_var(alpha, I));
      Expr term = iterated_total_derivative(dLdu, I, sig,
                                            DerivMode::Prolongation, cap);
      terms.push_back(I.order() % 2 == 0 ? term : neg(term));
    }
    sys.equations.push_back({label_elkth(alpha), sum_of(terms)});
  }
  return sys;
}

EquationSystem euler_lagrange_first_order_augmented(
    const Expr& L1, const BundleSignature& sig) {
  EquationSystem sys{sig, {}};
  auto first_order_eq = [&](const Expr& field) -> Expr {
    std::vector<Expr> divergence;
    for (int i = 1; i <= sig.n; ++i) {
      Expr momentum = partial(L1, formal_deriv(field, i));
      if (momentum->kind == NodeKind::Rational && momentum->value.is_zero())
        continue;
      divergence.push_back(
          total_derivative(momentum, i, sig, DerivMode::Formal));
    }
    return sub(partial(L1, field), sum_of(divergence));
  };

  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& K : enumerate_multi_indices(sig.n, sig.k))
      sys.equations.push_back(
          {label_elh_u(alpha, K), first_order_eq(jet_var(alpha, K))});
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int i = 1; i <= sig.n; ++i)
        sys.equations.push_back(
            {label_elh_p(alpha, I, i), first_order_eq(mom_var(alpha, I, i))});
  return sys;
}

}  // namespace jetlag
