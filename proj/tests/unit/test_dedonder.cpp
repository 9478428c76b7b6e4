#include "doctest.h"

#include "jetlag/dedonder.hpp"
#include "support/gen.hpp"

using namespace jetlag;

namespace {
Expr u(std::vector<int> I) { return jet_var(1, MultiIndex(std::move(I))); }
Expr half() { return make_rational(Rational(1, 2)); }

Expr pu_density() {
  return half() * (pow_expr(u({1, 1}), 2) - make_int(5) * pow_expr(u({1}), 2) +
                   make_int(4) * pow_expr(u({}), 2));
}

Expr residual_of(const EquationSystem& sys, const Label& l) {
  const Expr* e = sys.find(l);
  REQUIRE(e != nullptr);
  return *e;
}
}  // namespace

TEST_CASE("first-order system of the fourth-order oscillator, written out") {
  AugmentedLagrangian aug = augment(pu_density(), BundleSignature(1, 1, 2));
  EquationSystem sys = elh_system(aug);
  REQUIRE(sys.equations.size() == 5);

  Expr p0 = mom_var(1, MultiIndex{}, 1);
  Expr p1 = mom_var(1, MultiIndex({1}), 1);
  CHECK(expr_equal(residual_of(sys, label_elh_u(1, MultiIndex{})),
                   make_int(4) * u({}) - formal_deriv(p0, 1)));
  CHECK(expr_equal(residual_of(sys, label_elh_u(1, MultiIndex({1}))),
                   neg(make_int(5) * u({1})) - p0 - formal_deriv(p1, 1)));
  CHECK(expr_equal(residual_of(sys, label_elh_u(1, MultiIndex({1, 1}))),
                   u({1, 1}) - p1));
  CHECK(expr_equal(residual_of(sys, label_elh_p(1, MultiIndex{}, 1)),
                   formal_deriv(u({}), 1) - u({1})));
  CHECK(expr_equal(residual_of(sys, label_elh_p(1, MultiIndex({1}), 1)),
                   formal_deriv(u({1}), 1) - u({1, 1})));
}

TEST_CASE("direct first-order system agrees with the variational one") {
  for (Expr L : {pu_density(), half() * pow_expr(u({1, 1}), 2)}) {
    AugmentedLagrangian aug = augment(L, BundleSignature(1, 1, 2));
    TheoremCertificate cert = check_theorem2(aug);
    CHECK(cert.structural_ok);
    CHECK(cert.pass());
    CHECK(cert.all_exact());
    CHECK(cert.matches.size() == 5);
  }
  // third order
  AugmentedLagrangian jerk =
      augment(half() * pow_expr(u({1, 1, 1}), 2), BundleSignature(1, 1, 3));
  TheoremCertificate cert = check_theorem2(jerk);
  CHECK(cert.pass());
  CHECK(cert.all_exact());
  // two base dimensions
  Expr lap = u({1, 1}) + u({2, 2});
  AugmentedLagrangian bi =
      augment(half() * pow_expr(lap, 2), BundleSignature(2, 1, 2));
  cert = check_theorem2(bi);
  CHECK(cert.pass());
  CHECK(cert.all_exact());
}

TEST_CASE("first-order equivalence on random densities") {
  testgen::Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    BundleSignature sig(testgen::pick(rng, 1, 2), testgen::pick(rng, 1, 2),
                        testgen::pick(rng, 1, 3));
    AugmentedLagrangian aug = augment(testgen::random_density(rng, sig), sig);
    TheoremCertificate cert = check_theorem2(aug);
    CHECK(cert.pass());
    CHECK(cert.all_exact());
  }
}

TEST_CASE("Hamiltonian and conjugate pairs of the oscillator") {
  AugmentedLagrangian aug = augment(pu_density(), BundleSignature(1, 1, 2));
  DWData dw = dw_data(aug);
  Expr p0 = mom_var(1, MultiIndex{}, 1);
  Expr p1 = mom_var(1, MultiIndex({1}), 1);
  Expr expected_H = p0 * u({1}) + p1 * u({1, 1}) - pu_density();
  CHECK(expr_equal(dw.H, expected_H));
  REQUIRE(dw.pairs.size() == 2);
  CHECK(expr_equal(dw.pairs[0].u, u({})));
  CHECK(expr_equal(dw.pairs[0].p, p0));
  CHECK(expr_equal(dw.pairs[1].u, u({1})));
  CHECK(expr_equal(dw.pairs[1].p, p1));
  REQUIRE(dw.non_dynamical.size() == 1);
  CHECK(expr_equal(dw.non_dynamical[0], u({1, 1})));
  CHECK(dw.system.equations.size() == 5);
}

TEST_CASE("Hamiltonian is affine in each momentum") {
  testgen::Rng rng(47);
  for (int trial = 0; trial < 6; ++trial) {
    BundleSignature sig(testgen::pick(rng, 1, 2), 1, testgen::pick(rng, 1, 2));
    AugmentedLagrangian aug = augment(testgen::random_density(rng, sig), sig);
    DWData dw = dw_data(aug);
    for (const ConjugatePair& pr : dw.pairs) {
      Expr second = partial(partial(dw.H, pr.p), pr.p);
      CHECK(is_zero(second));
    }
  }
}

TEST_CASE("covariant equations written out for first order") {
  BundleSignature sig(1, 1, 1);
  Expr L = half() * pow_expr(u({1}), 2) - half() * pow_expr(u({}), 2);
  DWData dw = dw_data(augment(L, sig));
  Expr p = mom_var(1, MultiIndex{}, 1);
  CHECK(expr_equal(residual_of(dw.system, label_dw_u(1, MultiIndex{}, 1)),
                   formal_deriv(u({}), 1) - u({1})));
  CHECK(expr_equal(residual_of(dw.system, label_dw_p(1, MultiIndex{})),
                   formal_deriv(p, 1) + u({})));
  CHECK(expr_equal(residual_of(dw.system, label_dw_alg(1, MultiIndex({1}))),
                   p - u({1})));
}

TEST_CASE("covariant equations match the first-order system with signs") {
  for (Expr L : {pu_density(), half() * pow_expr(u({1, 1}), 2)}) {
    TheoremCertificate cert =
        check_theorem3(augment(L, BundleSignature(1, 1, 2)));
    CHECK(cert.structural_ok);
    CHECK(cert.pass());
    CHECK(cert.all_exact());
    for (const EquationMatch& m : cert.matches) {
      if (m.left.kind == LabelKind::DWu) {
        CHECK(m.right.kind == LabelKind::ELHp);
        CHECK(m.sign == 1);
      } else {
        CHECK(m.right.kind == LabelKind::ELHu);
        CHECK(m.sign == -1);
      }
    }
  }
}

TEST_CASE("covariant equivalence on random densities") {
  testgen::Rng rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    BundleSignature sig(testgen::pick(rng, 1, 2), testgen::pick(rng, 1, 2),
                        testgen::pick(rng, 1, 3));
    AugmentedLagrangian aug = augment(testgen::random_density(rng, sig), sig);
    TheoremCertificate cert = check_theorem3(aug);
    CHECK(cert.pass());
    CHECK(cert.all_exact());
  }
}

TEST_CASE("fiber transform depends only on the bundle shape") {
  BundleSignature sig(1, 1, 2);
  LegendreMap a = legendre_transform(augment(pu_density(), sig));
  LegendreMap b =
      legendre_transform(augment(half() * pow_expr(u({1, 1}), 2), sig));
  REQUIRE(a.p_assignments.size() == b.p_assignments.size());
  REQUIRE(a.q_assignments.size() == b.q_assignments.size());
  for (size_t i = 0; i < a.p_assignments.size(); ++i) {
    CHECK(a.p_assignments[i].alpha == b.p_assignments[i].alpha);
    CHECK(a.p_assignments[i].index == b.p_assignments[i].index);
    CHECK(a.p_assignments[i].dir == b.p_assignments[i].dir);
    CHECK(expr_equal(a.p_assignments[i].value, b.p_assignments[i].value));
  }
  for (size_t i = 0; i < a.q_assignments.size(); ++i)
    CHECK(expr_equal(a.q_assignments[i].value, b.q_assignments[i].value));
}

TEST_CASE("fiber transform structure: momenta pass through, the rest dies") {
  BundleSignature sig(2, 1, 2);
  AugmentedLagrangian aug =
      augment(half() * pow_expr(u({1, 1}) + u({2, 2}), 2), sig);
  LegendreMap map = legendre_transform(aug);
  for (const auto& a : map.p_assignments) {
    if (a.index.order() <= sig.k - 1)
      CHECK(expr_equal(a.value, mom_var(a.alpha, a.index, a.dir)));
    else
      CHECK(expr_equal(a.value, make_int(0)));
  }
  for (const auto& a : map.q_assignments)
    CHECK(expr_equal(a.value, make_int(0)));
  CHECK(legendre_fiber_check(aug, map));
}
