#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "jetlag/dedonder.hpp"

namespace jetlag {

/// The n = 1 augmented system in semi-explicit DAE form. States per
/// dependent variable, in order: u_0 .. u_k, p^0 .. p^{k-1}. Everything but
/// the top jet has an explicit derivative from the start; u_k' appears only
/// after index_reduce. One algebraic relation per dependent variable:
/// p^{k-1} - dL/du_k = 0.
struct MechanicalSystem {
  BundleSignature sig;  // sig.n == 1
  Expr L;
  std::vector<std::string> dep_names;
  std::vector<std::string> state_names;  // flat, per-dependent blocks
  std::vector<Expr> state_syms;          // jet/momentum symbol per state
  std::vector<Expr> rhs;                 // d(state)/dt; u_k slot null until reduced
  std::vector<Expr> algebraic_residual;  // per dependent variable
  std::vector<Expr> hessian;             // per dependent variable, d2L/du_k2
  Expr energy;                           // conserved monitor; null if L depends on time
  int free_initial_count = 0;            // 2k per dependent variable
  bool reduced = false;

  int states_per_dep() const { return 2 * sig.k + 1; }
  int u_index(int alpha, int j) const {
    return (alpha - 1) * states_per_dep() + j;
  }
  int p_index(int alpha, int j) const {
    return (alpha - 1) * states_per_dep() + (sig.k + 1) + j;
  }
};

struct Trajectory {
  std::vector<std::string> state_names;
  double dt = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // one row per time sample
  std::vector<double> alg_residual;         // per row; worst dependent variable
  double max_alg_residual = 0;
  double max_constraint_defect = 0;  // central-difference holonomy check
  double energy_drift = 0;
  bool has_energy = false;
  bool completed = true;  // false: integration stopped early
  std::string error;
  double error_time = 0;
};

struct CoveringReport {
  double projection_max_error = 0;  // |u_0 - oracle q| over the shared grid
  double lift_max_residual = 0;     // augmented equations on the lifted oracle
  double tolerance = 0;
  bool projection_ok = false;
  bool lift_ok = false;
  bool pass() const { return projection_ok && lift_ok; }
};

/// Names default to q (or q1..qm); pass the problem's dependent names to get
/// matching state names q, q', .., p0, p1, ..
MechanicalSystem compile_mechanics(const AugmentedLagrangian& aug,
                                   std::vector<std::string> dep_names = {});

/// Differentiates the algebraic relation once and solves for u_k', turning
/// the index-1 DAE into an ODE. Requires a nowhere-degenerate top Hessian;
/// for several dependent variables the top Hessian must be diagonal.
MechanicalSystem index_reduce(const MechanicalSystem& sys);

/// Completes the 2k free initial values per dependent variable (u_0..u_k and
/// p^0..p^{k-2}) into the full state vector, deriving p^{k-1} from the
/// algebraic relation. Throws on missing, unknown, or constrained names.
std::vector<double> assemble_initial_state(
    const MechanicalSystem& sys, const std::map<std::string, double>& given);

/// Fixed-step classical Runge-Kutta. The algebraic residual is monitored,
/// never projected: its drift is a diagnostic. A singular Hessian or a
/// non-finite state stops the run and leaves the partial trajectory with an
/// error record.
Trajectory integrate(const MechanicalSystem& sys,
                     const std::map<std::string, double>& initial,
                     double t_end, double dt);

/// Ostrogradsky momenta as jet expressions: per dependent variable the list
/// p^0 .. p^{k-1} with p^{k-1} = dL/du_k and p^{j} = dL/du_{j+1} - D_t p^{j+1}.
std::vector<std::vector<Expr>> ostrogradsky_momenta(const Expr& L,
                                                    const BundleSignature& sig);

/// Initial derivatives q(0) .. q^(2k-1)(0) per dependent variable matching an
/// augmented initial state: the top half is read off the jets, the rest
/// solved sequentially from the momentum values (each momentum is linear in
/// one new derivative, with the top Hessian as coefficient).
std::vector<double> oracle_initial_from_augmented(const MechanicalSystem& sys,
                                                  const std::vector<double>& y0);

/// Integrates the order-2k stationarity equation directly: reduces it to 2k
/// first-order states per dependent variable by a symbolic linear solve for
/// the top derivative, then runs the same Runge-Kutta scheme. Shares no
/// equation construction with `integrate`; this is the independent oracle.
Trajectory oracle_integrate(const Expr& L, const BundleSignature& sig,
                            const std::vector<std::string>& dep_names,
                            const std::vector<double>& initial_derivs,
                            double t_end, double dt);

/// The two halves of the covering property, both at the given tolerance:
/// projection (the augmented run's u_0 matches the oracle) and lift (the
/// oracle solution, lifted to momenta via ostrogradsky_momenta, satisfies
/// every augmented-system equation with derivatives taken by central
/// differences).
CoveringReport covering_check(const AugmentedLagrangian& aug,
                              const MechanicalSystem& sys,
                              const Trajectory& mech_traj,
                              const Trajectory& oracle_traj, double tolerance);

/// CSV: header `t,<state names>,alg_residual`, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace jetlag
