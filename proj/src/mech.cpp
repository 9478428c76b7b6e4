#include "jetlag/mech.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace jetlag {

namespace {

constexpr double kSingularTol = 1e-12;

MultiIndex ones(int j) { return MultiIndex(std::vector<int>(j, 1)); }

std::string prime_name(const std::string& base, int j) {
  std::string s = base;
  s.append(j, '\'');
  return s;
}

bool depends_on(const Expr& e, const Expr& atom) {
  if (is_symbol(e)) return expr_equal(e, atom);
  for (const auto& kid : e->kids)
    if (depends_on(kid, atom)) return true;
  return false;
}

using RHS =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

void rk4_step(const RHS& f, double t, std::vector<double>& y, double dt) {
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(t, y, k1);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  for (size_t i = 0; i < n; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

long long step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw NumericError("mech: step size must be positive", 0.0);
  if (!(t_end > 0.0))
    throw NumericError("mech: end time must be positive", 0.0);
  return std::max<long long>(1, std::llround(t_end / dt));
}

}  // namespace

MechanicalSystem compile_mechanics(const AugmentedLagrangian& aug,
                                   std::vector<std::string> dep_names) {
  const BundleSignature& sig = aug.sig;
  if (sig.n != 1)
    throw ExprError("mech: numerics are mechanics-only (base dimension 1)");
  if (dep_names.empty()) {
    if (sig.m == 1) {
      dep_names = {"q"};
    } else {
      for (int a = 1; a <= sig.m; ++a)
        dep_names.push_back("q" + std::to_string(a));
    }
  }
  if (static_cast<int>(dep_names.size()) != sig.m)
    throw ExprError("mech: expected one name per dependent variable");

  const int k = sig.k;
  MechanicalSystem sys;
  sys.sig = sig;
  sys.L = aug.L;
  sys.dep_names = dep_names;
  for (int alpha = 1; alpha <= sig.m; ++alpha) {
    const std::string& dep = dep_names[alpha - 1];
    for (int j = 0; j <= k; ++j) {
      sys.state_names.push_back(prime_name(dep, j));
      sys.state_syms.push_back(jet_var(alpha, ones(j)));
    }
    for (int j = 0; j <= k - 1; ++j) {
      std::string pn = "p" + std::to_string(j);
      if (sig.m > 1) pn += "[" + dep + "]";
      sys.state_names.push_back(pn);
      sys.state_syms.push_back(mom_var(alpha, ones(j), 1));
    }
  }

  sys.rhs.assign(sys.state_syms.size(), nullptr);
  for (int alpha = 1; alpha <= sig.m; ++alpha) {
    for (int j = 0; j <= k - 1; ++j)
      sys.rhs[sys.u_index(alpha, j)] = jet_var(alpha, ones(j + 1));
    for (int j = 0; j <= k - 1; ++j) {
      Expr below = j > 0 ? mom_var(alpha, ones(j - 1), 1) : make_int(0);
      sys.rhs[sys.p_index(alpha, j)] =
          sub(partial(aug.L, jet_var(alpha, ones(j))), below);
    }
    sys.algebraic_residual.push_back(
        sub(mom_var(alpha, ones(k - 1), 1),
            partial(aug.L, jet_var(alpha, ones(k)))));
    Expr uk = jet_var(alpha, ones(k));
    sys.hessian.push_back(partial(partial(aug.L, uk), uk));
  }

  if (!contains_kind(aug.L, NodeKind::Indep)) {
    std::vector<Expr> terms;
    for (int alpha = 1; alpha <= sig.m; ++alpha)
      for (int j = 0; j <= k - 1; ++j)
        terms.push_back(
            mul(mom_var(alpha, ones(j), 1), jet_var(alpha, ones(j + 1))));
    terms.push_back(neg(aug.L));
    sys.energy = sum_of(terms);
  }

  sys.free_initial_count = 2 * k * sig.m;
  return sys;
}

MechanicalSystem index_reduce(const MechanicalSystem& sys) {
  const int k = sys.sig.k;
  MechanicalSystem out = sys;
  for (int alpha = 1; alpha <= sys.sig.m; ++alpha) {
    if (is_zero(sys.hessian[alpha - 1]))
      throw ExprError(
          "mech: degenerate density (top-order Hessian vanishes identically)");
    Expr uak = jet_var(alpha, ones(k));
    for (int beta = 1; beta <= sys.sig.m; ++beta) {
      if (beta == alpha) continue;
      Expr cross = partial(partial(sys.L, uak), jet_var(beta, ones(k)));
      if (!is_zero(cross))
        throw ExprError(
            "mech: top-order Hessian couples dependent variables; "
            "only block-diagonal top order is supported");
    }
  }
  // d/dt of the algebraic relation, solved for the top jet velocity.
  for (int alpha = 1; alpha <= sys.sig.m; ++alpha) {
    Expr dLduk = partial(sys.L, jet_var(alpha, ones(k)));
    std::vector<Expr> num;
    num.push_back(partial(sys.L, jet_var(alpha, ones(k - 1))));
    if (k >= 2) num.push_back(neg(mom_var(alpha, ones(k - 2), 1)));
    num.push_back(neg(partial(dLduk, indep_var(1))));
    for (int beta = 1; beta <= sys.sig.m; ++beta)
      for (int j = 0; j <= k - 1; ++j)
        num.push_back(neg(mul(partial(dLduk, jet_var(beta, ones(j))),
                              jet_var(beta, ones(j + 1)))));
    out.rhs[out.u_index(alpha, k)] =
        div(sum_of(num), sys.hessian[alpha - 1]);
  }
  out.reduced = true;
  return out;
}

std::vector<double> assemble_initial_state(
    const MechanicalSystem& sys, const std::map<std::string, double>& given) {
  const int k = sys.sig.k;
  std::map<std::string, int> index_of;
  for (size_t s = 0; s < sys.state_names.size(); ++s)
    index_of[sys.state_names[s]] = static_cast<int>(s);
  std::set<int> constrained;
  for (int alpha = 1; alpha <= sys.sig.m; ++alpha)
    constrained.insert(sys.p_index(alpha, k - 1));

  std::vector<double> y(sys.state_syms.size(), 0.0);
  std::set<int> seen;
  for (const auto& [name, value] : given) {
    auto it = index_of.find(name);
    if (it == index_of.end())
      throw ExprError("mech: unknown state '" + name + "' in initial data");
    if (constrained.count(it->second))
      throw ExprError("mech: initial value for '" + name +
                      "' is determined by the algebraic relation");
    if (!std::isfinite(value))
      throw NumericError("mech: non-finite initial value for '" + name + "'",
                         0.0);
    y[it->second] = value;
    seen.insert(it->second);
  }
  std::string missing;
  for (size_t s = 0; s < sys.state_names.size(); ++s) {
    if (constrained.count(static_cast<int>(s)) || seen.count(static_cast<int>(s)))
      continue;
    if (!missing.empty()) missing += ", ";
    missing += sys.state_names[s];
  }
  if (!missing.empty())
    throw ExprError("mech: missing initial values for " + missing);

  AtomValues vals;
  vals[indep_var(1)] = 0.0;
  for (size_t s = 0; s < sys.state_syms.size(); ++s)
    vals[sys.state_syms[s]] = y[s];
  for (int alpha = 1; alpha <= sys.sig.m; ++alpha)
    y[sys.p_index(alpha, k - 1)] =
        evaluate(partial(sys.L, jet_var(alpha, ones(k))), vals);
  return y;
}

Trajectory integrate(const MechanicalSystem& sys,
                     const std::map<std::string, double>& initial,
                     double t_end, double dt) {
  if (!sys.reduced)
    throw ExprError("mech: integration requires an index-reduced system");
  const long long nsteps = step_count(t_end, dt);
  std::vector<double> y = assemble_initial_state(sys, initial);

  auto bind = [&](double t, const std::vector<double>& yy) {
    AtomValues v;
    v[indep_var(1)] = t;
    for (size_t s = 0; s < yy.size(); ++s) v[sys.state_syms[s]] = yy[s];
    return v;
  };

  {
    AtomValues v0 = bind(0.0, y);
    for (const Expr& h : sys.hessian)
      if (std::abs(evaluate(h, v0)) < kSingularTol)
        throw NumericError(
            "mech: singular top-order Hessian at the initial point", 0.0);
  }

  RHS f = [&](double t, const std::vector<double>& yy,
              std::vector<double>& dy) {
    AtomValues v = bind(t, yy);
    for (size_t s = 0; s < dy.size(); ++s) dy[s] = evaluate(sys.rhs[s], v);
  };

  Trajectory traj;
  traj.state_names = sys.state_names;
  traj.dt = dt;
  traj.has_energy = sys.energy != nullptr;
  double energy0 = 0.0;

  auto record = [&](double t, const std::vector<double>& yy) {
    AtomValues v = bind(t, yy);
    double r = 0.0;
    for (const Expr& res : sys.algebraic_residual)
      r = std::max(r, std::abs(evaluate(res, v)));
    traj.times.push_back(t);
    traj.values.push_back(yy);
    traj.alg_residual.push_back(r);
    traj.max_alg_residual = std::max(traj.max_alg_residual, r);
    if (traj.has_energy) {
      double e = evaluate(sys.energy, v);
      if (traj.times.size() == 1) energy0 = e;
      traj.energy_drift =
          std::max(traj.energy_drift, std::abs(e - energy0));
    }
  };
  record(0.0, y);

  for (long long i = 1; i <= nsteps; ++i) {
    const double t = static_cast<double>(i - 1) * dt;
    AtomValues v = bind(t, y);
    bool singular = false;
    for (const Expr& h : sys.hessian)
      if (std::abs(evaluate(h, v)) < kSingularTol) singular = true;
    if (singular) {
      traj.completed = false;
      traj.error = "mech: singular top-order Hessian";
      traj.error_time = t;
      break;
    }
    rk4_step(f, t, y, dt);
    if (!std::all_of(y.begin(), y.end(),
                     [](double x) { return std::isfinite(x); })) {
      traj.completed = false;
      traj.error = "mech: non-finite state";
      traj.error_time = static_cast<double>(i) * dt;
      break;
    }
    record(static_cast<double>(i) * dt, y);
  }

  // Holonomy diagnostic: u_j against the centered difference of u_{j-1}.
  for (size_t s = 1; s + 1 < traj.values.size(); ++s)
    for (int alpha = 1; alpha <= sys.sig.m; ++alpha)
      for (int j = 1; j <= sys.sig.k; ++j) {
        double dd = (traj.values[s + 1][sys.u_index(alpha, j - 1)] -
                     traj.values[s - 1][sys.u_index(alpha, j - 1)]) /
                    (2.0 * dt);
        traj.max_constraint_defect =
            std::max(traj.max_constraint_defect,
                     std::abs(dd - traj.values[s][sys.u_index(alpha, j)]));
      }
  return traj;
}

std::vector<std::vector<Expr>> ostrogradsky_momenta(
    const Expr& L, const BundleSignature& sig) {
  if (sig.n != 1)
    throw ExprError("mech: numerics are mechanics-only (base dimension 1)");
  const int k = sig.k;
  std::vector<std::vector<Expr>> out;
  for (int alpha = 1; alpha <= sig.m; ++alpha) {
    std::vector<Expr> ps(k);
    ps[k - 1] = partial(L, jet_var(alpha, ones(k)));
    for (int j = k - 2; j >= 0; --j)
      ps[j] = sub(partial(L, jet_var(alpha, ones(j + 1))),
                  total_derivative(ps[j + 1], 1, sig, DerivMode::Prolongation,
                                   2 * k));
    out.push_back(std::move(ps));
  }
  return out;
}

std::vector<double> oracle_initial_from_augmented(
    const MechanicalSystem& sys, const std::vector<double>& y0) {
  const int k = sys.sig.k;
  const int m = sys.sig.m;
  if (y0.size() != sys.state_syms.size())
    throw ExprError("mech: state vector size mismatch");
  auto momenta = ostrogradsky_momenta(sys.L, sys.sig);

  AtomValues vals;
  vals[indep_var(1)] = 0.0;
  for (int alpha = 1; alpha <= m; ++alpha)
    for (int j = 0; j <= k; ++j)
      vals[jet_var(alpha, ones(j))] = y0[sys.u_index(alpha, j)];

  // Each momentum level is linear in exactly one new derivative; two
  // evaluations recover the affine form.
  for (int r = 1; r <= k - 1; ++r)
    for (int alpha = 1; alpha <= m; ++alpha) {
      const Expr& pexpr = momenta[alpha - 1][k - 1 - r];
      Expr unknown = jet_var(alpha, ones(k + r));
      AtomValues probe = vals;
      probe[unknown] = 0.0;
      double b = evaluate(pexpr, probe);
      probe[unknown] = 1.0;
      double c = evaluate(pexpr, probe) - b;
      if (std::abs(c) < kSingularTol)
        throw NumericError(
            "mech: singular momentum relation while lifting initial data",
            0.0);
      vals[unknown] = (y0[sys.p_index(alpha, k - 1 - r)] - b) / c;
    }

  std::vector<double> out;
  out.reserve(2 * k * m);
  for (int alpha = 1; alpha <= m; ++alpha)
    for (int j = 0; j <= 2 * k - 1; ++j)
      out.push_back(j <= k ? y0[sys.u_index(alpha, j)]
                           : vals[jet_var(alpha, ones(j))]);
  return out;
}

Trajectory oracle_integrate(const Expr& L, const BundleSignature& sig,
                            const std::vector<std::string>& dep_names,
                            const std::vector<double>& initial_derivs,
                            double t_end, double dt) {
  if (sig.n != 1)
    throw ExprError("mech: numerics are mechanics-only (base dimension 1)");
  const int k = sig.k;
  const int m = sig.m;
  const int ord = 2 * k;
  if (static_cast<int>(initial_derivs.size()) != ord * m)
    throw ExprError("mech: oracle expects 2k initial derivatives per "
                    "dependent variable");
  if (static_cast<int>(dep_names.size()) != m)
    throw ExprError("mech: expected one name per dependent variable");
  const long long nsteps = step_count(t_end, dt);

  EquationSystem el = euler_lagrange(L, sig);
  std::vector<Expr> top_rhs(m);
  std::vector<Expr> top_coeff(m);
  for (int alpha = 1; alpha <= m; ++alpha) {
    const Expr& E = el.equations[alpha - 1].residual;
    Expr utop = jet_var(alpha, ones(ord));
    for (int beta = 1; beta <= m; ++beta) {
      if (beta == alpha) continue;
      if (depends_on(E, jet_var(beta, ones(ord))))
        throw ExprError(
            "mech: stationarity equations couple top derivatives; "
            "only block-diagonal top order is supported");
    }
    Expr A = partial(E, utop);
    if (is_zero(A))
      throw ExprError(
          "mech: stationarity equation cannot be solved for the top "
          "derivative (its coefficient vanishes identically)");
    if (depends_on(A, utop))
      throw ExprError(
          "mech: stationarity equation is not linear in the top derivative");
    ExprMap kill;
    kill[utop] = make_int(0);
    Expr B = substitute(E, kill);
    top_rhs[alpha - 1] = div(neg(B), A);
    top_coeff[alpha - 1] = A;
  }

  std::vector<Expr> syms;
  Trajectory traj;
  for (int alpha = 1; alpha <= m; ++alpha)
    for (int j = 0; j <= ord - 1; ++j) {
      syms.push_back(jet_var(alpha, ones(j)));
      traj.state_names.push_back(prime_name(dep_names[alpha - 1], j));
    }
  traj.dt = dt;

  auto bind = [&](double t, const std::vector<double>& yy) {
    AtomValues v;
    v[indep_var(1)] = t;
    for (size_t s = 0; s < yy.size(); ++s) v[syms[s]] = yy[s];
    return v;
  };
  RHS f = [&](double t, const std::vector<double>& yy,
              std::vector<double>& dy) {
    AtomValues v = bind(t, yy);
    for (int alpha = 1; alpha <= m; ++alpha) {
      for (int j = 0; j <= ord - 2; ++j)
        dy[(alpha - 1) * ord + j] = yy[(alpha - 1) * ord + j + 1];
      dy[(alpha - 1) * ord + ord - 1] = evaluate(top_rhs[alpha - 1], v);
    }
  };

  std::vector<double> y = initial_derivs;
  auto record = [&](double t, const std::vector<double>& yy) {
    traj.times.push_back(t);
    traj.values.push_back(yy);
    traj.alg_residual.push_back(0.0);
  };
  record(0.0, y);
  for (long long i = 1; i <= nsteps; ++i) {
    const double t = static_cast<double>(i - 1) * dt;
    AtomValues v = bind(t, y);
    bool singular = false;
    for (const Expr& a : top_coeff)
      if (std::abs(evaluate(a, v)) < kSingularTol) singular = true;
    if (singular) {
      traj.completed = false;
      traj.error = "mech: singular top-derivative coefficient";
      traj.error_time = t;
      break;
    }
    rk4_step(f, t, y, dt);
    if (!std::all_of(y.begin(), y.end(),
                     [](double x) { return std::isfinite(x); })) {
      traj.completed = false;
      traj.error = "mech: non-finite state";
      traj.error_time = static_cast<double>(i) * dt;
      break;
    }
    record(static_cast<double>(i) * dt, y);
  }
  return traj;
}

CoveringReport covering_check(const AugmentedLagrangian& aug,
                              const MechanicalSystem& sys,
                              const Trajectory& mech_traj,
                              const Trajectory& oracle_traj,
                              double tolerance) {
  const int k = sys.sig.k;
  const int m = sys.sig.m;
  const int ord = 2 * k;
  CoveringReport rep;
  rep.tolerance = tolerance;

  const size_t rows =
      std::min(mech_traj.values.size(), oracle_traj.values.size());
  for (size_t s = 0; s < rows; ++s)
    for (int alpha = 1; alpha <= m; ++alpha)
      rep.projection_max_error = std::max(
          rep.projection_max_error,
          std::abs(mech_traj.values[s][sys.u_index(alpha, 0)] -
                   oracle_traj.values[s][(alpha - 1) * ord]));
  rep.projection_ok = rep.projection_max_error <= tolerance;

  // Lift: momenta along the oracle run, then every first-order equation of
  // the augmented system with centered differences standing in for the
  // formal derivatives.
  EquationSystem elh = elh_system(aug);
  auto momenta = ostrogradsky_momenta(aug.L, aug.sig);
  const size_t orows = oracle_traj.values.size();
  const double dt = oracle_traj.dt;

  std::vector<std::vector<double>> pseries(
      orows, std::vector<double>(static_cast<size_t>(m) * k, 0.0));
  for (size_t s = 0; s < orows; ++s) {
    AtomValues v;
    v[indep_var(1)] = oracle_traj.times[s];
    for (int alpha = 1; alpha <= m; ++alpha)
      for (int j = 0; j <= ord - 1; ++j)
        v[jet_var(alpha, ones(j))] =
            oracle_traj.values[s][(alpha - 1) * ord + j];
    for (int alpha = 1; alpha <= m; ++alpha)
      for (int j = 0; j <= k - 1; ++j)
        pseries[s][(alpha - 1) * k + j] =
            evaluate(momenta[alpha - 1][j], v);
  }

  for (size_t s = 1; s + 1 < orows; ++s) {
    AtomValues v;
    v[indep_var(1)] = oracle_traj.times[s];
    for (int alpha = 1; alpha <= m; ++alpha) {
      for (int j = 0; j <= std::min(ord - 1, k); ++j)
        v[jet_var(alpha, ones(j))] =
            oracle_traj.values[s][(alpha - 1) * ord + j];
      for (int j = 0; j <= k - 1; ++j) {
        v[mom_var(alpha, ones(j), 1)] = pseries[s][(alpha - 1) * k + j];
        v[formal_deriv(jet_var(alpha, ones(j)), 1)] =
            (oracle_traj.values[s + 1][(alpha - 1) * ord + j] -
             oracle_traj.values[s - 1][(alpha - 1) * ord + j]) /
            (2.0 * dt);
        v[formal_deriv(mom_var(alpha, ones(j), 1), 1)] =
            (pseries[s + 1][(alpha - 1) * k + j] -
             pseries[s - 1][(alpha - 1) * k + j]) /
            (2.0 * dt);
      }
    }
    for (const auto& eq : elh.equations)
      rep.lift_max_residual = std::max(
          rep.lift_max_residual, std::abs(evaluate(eq.residual, v)));
  }
  rep.lift_ok = rep.lift_max_residual <= tolerance;
  return rep;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "t";
  for (const auto& name : traj.state_names) out << "," << name;
  out << ",alg_residual\n";
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (size_t s = 0; s < traj.values.size(); ++s) {
    put(traj.times[s]);
    for (double x : traj.values[s]) {
      out << ",";
      put(x);
    }
    out << ",";
    put(traj.alg_residual[s]);
    out << "\n";
  }
}

}  // namespace jetlag
