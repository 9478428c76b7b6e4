#include "jetlag/dedonder.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace jetlag {

bool TheoremCertificate::pass() const {
  if (!structural_ok) return false;
  return std::all_of(matches.begin(), matches.end(),
                     [](const EquationMatch& m) { return m.zero; });
}

bool TheoremCertificate::all_exact() const {
  return std::none_of(matches.begin(), matches.end(),
                      [](const EquationMatch& m) { return m.probabilistic; });
}

EquationSystem elh_system(const AugmentedLagrangian& aug) {
  const BundleSignature& sig = aug.sig;
  EquationSystem sys{sig, {}};
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& K : enumerate_multi_indices(sig.n, sig.k)) {
      std::vector<Expr> terms{partial(aug.L, jet_var(alpha, K))};
      for (const auto& [J, j] : decompositions(K))
        terms.push_back(neg(mom_var(alpha, J, j)));
      if (K.order() <= sig.k - 1)
        for (int i = 1; i <= sig.n; ++i)
          terms.push_back(neg(formal_deriv(mom_var(alpha, K, i), i)));
      sys.equations.push_back({label_elh_u(alpha, K), sum_of(terms)});
    }
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int i = 1; i <= sig.n; ++i)
        sys.equations.push_back(
            {label_elh_p(alpha, I, i),
             sub(formal_deriv(jet_var(alpha, I), i),
                 jet_var(alpha, I.append(i)))});
  return sys;
}

namespace {

// Pairs two systems by a label correspondence and zero-tests the signed
// differences. Unmatched labels on either side are structural failures.
TheoremCertificate match_systems(
    const EquationSystem& left, const EquationSystem& right,
    const std::function<std::pair<Label, int>(const Label&)>& correspond) {
  TheoremCertificate cert;
  std::map<std::string, bool> right_used;
  for (const auto& eq : right.equations) right_used[eq.label.str()] = false;

  for (const auto& eq : left.equations) {
    auto [target, sign] = correspond(eq.label);
    const Expr* other = right.find(target);
    if (other == nullptr) {
      cert.structural_ok = false;
      cert.structural_notes.push_back("no counterpart for " + eq.label.str() +
                                      " (expected " + target.str() + ")");
      continue;
    }
    right_used[target.str()] = true;
    Expr diff = sign >= 0 ? sub(eq.residual, *other)
                          : add(eq.residual, *other);
    ZeroResult z = zero_check(diff);
    cert.matches.push_back({eq.label, target, sign, z.zero, z.probabilistic});
  }
  for (const auto& [name, used] : right_used)
    if (!used) {
      cert.structural_ok = false;
      cert.structural_notes.push_back("unmatched equation " + name);
    }
  return cert;
}

}  // namespace

TheoremCertificate check_theorem2(const AugmentedLagrangian& aug) {
  EquationSystem direct = elh_system(aug);
  EquationSystem generic =
      euler_lagrange_first_order_augmented(aug.L1, aug.sig);
  return match_systems(direct, generic,
                       [](const Label& l) { return std::pair(l, +1); });
}

LegendreMap legendre_transform(const AugmentedLagrangian& aug) {
  const BundleSignature& sig = aug.sig;
  LegendreMap map{sig, {}, {}};
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k))
      for (int i = 1; i <= sig.n; ++i) {
        Expr value = I.order() <= sig.k - 1
                         ? mom_var(alpha, I, i)
                         : make_int(0);
        map.p_assignments.push_back({alpha, I, i, value});
      }
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& J : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int j = 1; j <= sig.n; ++j)
        for (int i = 1; i <= sig.n; ++i)
          map.q_assignments.push_back({alpha, J, j, i, make_int(0)});
  return map;
}

bool legendre_fiber_check(const AugmentedLagrangian& aug,
                          const LegendreMap& map) {
  for (const auto& a : map.p_assignments) {
    Expr fiber = partial(aug.L1, formal_deriv(jet_var(a.alpha, a.index), a.dir));
    if (!expr_equal(normalize(fiber), normalize(a.value))) return false;
  }
  for (const auto& a : map.q_assignments) {
    Expr fiber = partial(
        aug.L1, formal_deriv(mom_var(a.alpha, a.index, a.slot), a.dir));
    if (!expr_equal(normalize(fiber), normalize(a.value))) return false;
  }
  return true;
}

DWData dw_data(const AugmentedLagrangian& aug) {
  const BundleSignature& sig = aug.sig;
  DWData data;

  std::vector<Expr> hterms;
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1))
      for (int i = 1; i <= sig.n; ++i) {
        Expr u = jet_var(alpha, I);
        Expr p = mom_var(alpha, I, i);
        data.pairs.push_back({alpha, I, i, u, p});
        hterms.push_back(mul(p, jet_var(alpha, I.append(i))));
      }
  hterms.push_back(neg(aug.L));
  data.H = sum_of(hterms);

  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& K : multi_indices_of_order(sig.n, sig.k))
      data.non_dynamical.push_back(jet_var(alpha, K));

  EquationSystem sys{sig, {}};
  for (const auto& pair : data.pairs)
    sys.equations.push_back(
        {label_dw_u(pair.alpha, pair.index, pair.dir),
         sub(formal_deriv(pair.u, pair.dir), partial(data.H, pair.p))});
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& I : enumerate_multi_indices(sig.n, sig.k - 1)) {
      std::vector<Expr> terms;
      for (int i = 1; i <= sig.n; ++i)
        terms.push_back(formal_deriv(mom_var(alpha, I, i), i));
      terms.push_back(partial(data.H, jet_var(alpha, I)));
      sys.equations.push_back({label_dw_p(alpha, I), sum_of(terms)});
    }
  for (int alpha = 1; alpha <= sig.m; ++alpha)
    for (const MultiIndex& K : multi_indices_of_order(sig.n, sig.k))
      sys.equations.push_back(
          {label_dw_alg(alpha, K), partial(data.H, jet_var(alpha, K))});
  data.system = std::move(sys);
  return data;
}

TheoremCertificate check_theorem3(const AugmentedLagrangian& aug) {
  DWData data = dw_data(aug);
  EquationSystem elh = elh_system(aug);
  return match_systems(
      data.system, elh, [](const Label& l) -> std::pair<Label, int> {
        switch (l.kind) {
          case LabelKind::DWu:
            return {label_elh_p(l.alpha, l.index, l.dir), +1};
          case LabelKind::DWp:
            return {label_elh_u(l.alpha, l.index), -1};
          case LabelKind::DWalg:
            return {label_elh_u(l.alpha, l.index), -1};
          default:
            return {l, +1};
        }
      });
}

}  // namespace jetlag
