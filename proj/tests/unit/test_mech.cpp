#include "doctest.h"

#include <cmath>
#include <sstream>

#include "jetlag/mech.hpp"
#include "support/gen.hpp"

using namespace jetlag;

namespace {
Expr u(std::vector<int> I) { return jet_var(1, MultiIndex(std::move(I))); }
Expr half() { return make_rational(Rational(1, 2)); }

Expr pu_density() {
  return half() * (pow_expr(u({1, 1}), 2) - make_int(5) * pow_expr(u({1}), 2) +
                   make_int(4) * pow_expr(u({}), 2));
}

MechanicalSystem pu_system() {
  AugmentedLagrangian aug = augment(pu_density(), BundleSignature(1, 1, 2));
  return index_reduce(compile_mechanics(aug, {"q"}));
}

const std::map<std::string, double> pu_initial = {
    {"q", 1.0}, {"q'", 0.0}, {"q''", -1.0}, {"p0", 0.0}};
}  // namespace

TEST_CASE("state layout of a second-order problem") {
  MechanicalSystem sys = pu_system();
  CHECK(sys.state_names ==
        std::vector<std::string>{"q", "q'", "q''", "p0", "p1"});
  CHECK(sys.free_initial_count == 4);
  CHECK(sys.states_per_dep() == 5);
  CHECK(sys.u_index(1, 0) == 0);
  CHECK(sys.u_index(1, 2) == 2);
  CHECK(sys.p_index(1, 0) == 3);
  CHECK(sys.p_index(1, 1) == 4);
  CHECK(sys.reduced);
}

TEST_CASE("initial-state assembly derives the top momentum") {
  MechanicalSystem sys = pu_system();
  std::vector<double> y = assemble_initial_state(sys, pu_initial);
  REQUIRE(y.size() == 5);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == -1.0);
  CHECK(y[3] == 0.0);
  CHECK(y[4] == -1.0);  // p1 = dL/dq'' = q''

  auto constrained = pu_initial;
  constrained["p1"] = 0.0;
  CHECK_THROWS_AS(assemble_initial_state(sys, constrained), Error);
  auto unknown = pu_initial;
  unknown["bogus"] = 1.0;
  CHECK_THROWS_AS(assemble_initial_state(sys, unknown), Error);
  auto missing = pu_initial;
  missing.erase("q''");
  CHECK_THROWS_AS(assemble_initial_state(sys, missing), Error);
}

TEST_CASE("oscillator trajectory follows cos t") {
  MechanicalSystem sys = pu_system();
  Trajectory traj = integrate(sys, pu_initial, 2.0, 1e-3);
  REQUIRE(traj.completed);
  double max_err = 0;
  for (size_t i = 0; i < traj.times.size(); ++i)
    max_err = std::max(max_err,
                       std::abs(traj.values[i][0] - std::cos(traj.times[i])));
  CHECK(max_err < 1e-9);
  CHECK(traj.max_alg_residual < 1e-12);
  CHECK(traj.has_energy);
  CHECK(traj.energy_drift < 1e-10);
}

TEST_CASE("free particle in the second derivative runs on a line") {
  AugmentedLagrangian aug =
      augment(half() * pow_expr(u({1, 1}), 2), BundleSignature(1, 1, 2));
  MechanicalSystem sys = index_reduce(compile_mechanics(aug, {"q"}));
  Trajectory traj = integrate(
      sys, {{"q", 0.0}, {"q'", 1.0}, {"q''", 0.0}, {"p0", 0.0}}, 2.0, 1e-3);
  REQUIRE(traj.completed);
  for (size_t i = 0; i < traj.times.size(); ++i)
    CHECK(std::abs(traj.values[i][0] - traj.times[i]) < 1e-10);
}

TEST_CASE("unreduced systems refuse to integrate") {
  AugmentedLagrangian aug = augment(pu_density(), BundleSignature(1, 1, 2));
  MechanicalSystem sys = compile_mechanics(aug, {"q"});
  CHECK_FALSE(sys.reduced);
  CHECK_THROWS_AS(integrate(sys, pu_initial, 1.0, 1e-3), Error);
}

TEST_CASE("degenerate top Hessian is rejected at reduction") {
  AugmentedLagrangian aug =
      augment(u({1, 1}) * u({}), BundleSignature(1, 1, 2));
  MechanicalSystem sys = compile_mechanics(aug, {"q"});
  CHECK_THROWS_AS(index_reduce(sys), Error);
}

TEST_CASE("coupled top Hessian across dependents is rejected") {
  Expr q1tt = jet_var(1, MultiIndex({1, 1}));
  Expr q2tt = jet_var(2, MultiIndex({1, 1}));
  BundleSignature sig(1, 2, 2);
  CHECK_THROWS_AS(
      index_reduce(compile_mechanics(augment(q1tt * q2tt, sig), {})), Error);
  // block-diagonal top order is fine
  AugmentedLagrangian ok =
      augment(half() * (pow_expr(q1tt, 2) + pow_expr(q2tt, 2)), sig);
  MechanicalSystem sys = index_reduce(compile_mechanics(ok, {"a", "b"}));
  CHECK(sys.state_names.size() == 10);
  CHECK(sys.state_names[0] == "a");
  CHECK(sys.state_names[3] == "p0[a]");
  CHECK(sys.state_names[5] == "b");
}

TEST_CASE("singular top Hessian at the start is a hard error") {
  // L = 1/2 q q''^2: the top Hessian is q itself.
  AugmentedLagrangian aug =
      augment(half() * u({}) * pow_expr(u({1, 1}), 2), BundleSignature(1, 1, 2));
  MechanicalSystem sys = index_reduce(compile_mechanics(aug, {"q"}));
  CHECK_THROWS_AS(
      integrate(sys, {{"q", 0.0}, {"q'", 1.0}, {"q''", 1.0}, {"p0", 0.0}}, 1.0,
                1e-3),
      NumericError);
}

TEST_CASE("finite-time blow-up stops the run with a record") {
  // q'''' = exp(q) diverges in finite time.
  AugmentedLagrangian aug = augment(
      half() * pow_expr(u({1, 1}), 2) - apply_fn(Func::Exp, u({})),
      BundleSignature(1, 1, 2));
  MechanicalSystem sys = index_reduce(compile_mechanics(aug, {"q"}));
  Trajectory traj = integrate(
      sys, {{"q", 2.0}, {"q'", 2.0}, {"q''", 2.0}, {"p0", 0.0}}, 10.0, 1e-3);
  CHECK_FALSE(traj.completed);
  CHECK_FALSE(traj.error.empty());
  CHECK(traj.times.size() < 10001);
}

TEST_CASE("momenta lists follow the descending recursion") {
  BundleSignature sig(1, 1, 2);
  auto momenta = ostrogradsky_momenta(pu_density(), sig);
  REQUIRE(momenta.size() == 1);
  REQUIRE(momenta[0].size() == 2);
  // p1 = dL/du2 = u2 ; p0 = dL/du1 - D_t p1 = -5 u1 - u3
  CHECK(expr_equal(momenta[0][1], u({1, 1})));
  CHECK(expr_equal(momenta[0][0],
                   neg(make_int(5) * u({1})) - u({1, 1, 1})));
}

TEST_CASE("oracle initial data inverts the augmented state") {
  MechanicalSystem sys = pu_system();
  std::vector<double> y0 = assemble_initial_state(sys, pu_initial);
  std::vector<double> derivs = oracle_initial_from_augmented(sys, y0);
  REQUIRE(derivs.size() == 4);
  CHECK(derivs[0] == doctest::Approx(1.0));
  CHECK(derivs[1] == doctest::Approx(0.0));
  CHECK(derivs[2] == doctest::Approx(-1.0));
  // p0 = -5 q' - q''' and p0 = 0 force q'''(0) = 0
  CHECK(derivs[3] == doctest::Approx(0.0));
}

TEST_CASE("independent oracle agrees with the constrained run") {
  MechanicalSystem sys = pu_system();
  Trajectory traj = integrate(sys, pu_initial, 2.0, 1e-3);
  std::vector<double> derivs = oracle_initial_from_augmented(
      sys, assemble_initial_state(sys, pu_initial));
  Trajectory oracle = oracle_integrate(pu_density(), BundleSignature(1, 1, 2),
                                       {"q"}, derivs, 2.0, 1e-3);
  REQUIRE(oracle.completed);
  REQUIRE(oracle.times.size() == traj.times.size());
  double gap = 0;
  for (size_t i = 0; i < traj.times.size(); ++i)
    gap = std::max(gap, std::abs(traj.values[i][0] - oracle.values[i][0]));
  CHECK(gap < 1e-9);
}

TEST_CASE("covering holds in both directions") {
  AugmentedLagrangian aug = augment(pu_density(), BundleSignature(1, 1, 2));
  MechanicalSystem sys = index_reduce(compile_mechanics(aug, {"q"}));
  Trajectory traj = integrate(sys, pu_initial, 2.0, 1e-3);
  std::vector<double> derivs = oracle_initial_from_augmented(
      sys, assemble_initial_state(sys, pu_initial));
  Trajectory oracle = oracle_integrate(pu_density(), BundleSignature(1, 1, 2),
                                       {"q"}, derivs, 2.0, 1e-3);
  CoveringReport rep = covering_check(aug, sys, traj, oracle, 1e-5);
  CHECK(rep.projection_ok);
  CHECK(rep.lift_ok);
  CHECK(rep.pass());
  CHECK(rep.projection_max_error < 1e-10);
}

TEST_CASE("first-order densities reduce to ordinary Hamiltonian flow") {
  BundleSignature sig(1, 1, 1);
  Expr L = half() * pow_expr(u({1}), 2) - half() * pow_expr(u({}), 2);
  MechanicalSystem sys = index_reduce(compile_mechanics(augment(L, sig), {"q"}));
  CHECK(sys.state_names == std::vector<std::string>{"q", "q'", "p0"});
  Trajectory traj = integrate(sys, {{"q", 1.0}, {"q'", 0.0}}, 2.0, 1e-3);
  REQUIRE(traj.completed);
  double max_err = 0;
  for (size_t i = 0; i < traj.times.size(); ++i)
    max_err = std::max(max_err,
                       std::abs(traj.values[i][0] - std::cos(traj.times[i])));
  CHECK(max_err < 1e-9);
}

TEST_CASE("csv round-trips header and precision") {
  MechanicalSystem sys = pu_system();
  Trajectory traj = integrate(sys, pu_initial, 0.01, 1e-3);
  std::ostringstream out;
  write_csv(traj, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,q,q',q'',p0,p1,alg_residual");
  std::string row;
  std::getline(in, row);
  std::getline(in, row);  // second sample
  double t, q;
  CHECK(std::sscanf(row.c_str(), "%lg,%lg", &t, &q) == 2);
  CHECK(t == traj.times[1]);
  CHECK(q == traj.values[1][0]);
}

TEST_CASE("time-dependent densities have no conserved monitor") {
  BundleSignature sig(1, 1, 1);
  Expr L = half() * pow_expr(u({1}), 2) - indep_var(1) * u({});
  MechanicalSystem sys = index_reduce(compile_mechanics(augment(L, sig), {"q"}));
  Trajectory traj = integrate(sys, {{"q", 0.0}, {"q'", 0.0}}, 1.0, 1e-3);
  CHECK(traj.completed);
  CHECK_FALSE(traj.has_energy);
}
