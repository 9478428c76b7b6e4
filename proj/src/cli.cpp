#include "jetlag/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "jetlag/constraint.hpp"
#include "jetlag/dedonder.hpp"
#include "jetlag/jet.hpp"
#include "jetlag/lagfile.hpp"
#include "jetlag/mech.hpp"
#include "jetlag/render.hpp"
#include "jetlag/sexpr.hpp"
#include "jetlag/variational.hpp"

namespace jetlag {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Problem {
  ProblemFile pf;
  NameTable names;
  AugmentedLagrangian aug;
};

Problem load(const std::string& path) {
  Problem p{load_problem(path), {}, {}};
  p.names = NameTable{p.pf.independent, p.pf.dependent};
  p.aug = augment(p.pf.lagrangian, p.pf.sig);
  return p;
}

int with_output(const std::string& path, std::ostream& fallback,
                const std::function<int(std::ostream&)>& body) {
  if (path.empty()) return body(fallback);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli: cannot write output file '" + path + "'");
  int rc = body(f);
  if (!f.good()) throw Error("cli: write to '" + path + "' failed");
  return rc;
}

std::string signature_line(const BundleSignature& sig) {
  return "signature: n=" + std::to_string(sig.n) +
         ", m=" + std::to_string(sig.m) + ", k=" + std::to_string(sig.k);
}

void emit_system_text(const EquationSystem& sys, const NameTable& names,
                      std::ostream& out) {
  for (const Equation& eq : sys.equations)
    out << "  " << eq.label.str() << ": " << render_text(eq.residual, names)
        << " = 0\n";
}

void emit_system_latex(const EquationSystem& sys, const NameTable& names,
                       std::ostream& out) {
  out << "\\begin{aligned}\n";
  for (const Equation& eq : sys.equations)
    out << "  " << render_latex(eq.residual, names)
        << " &= 0 && \\text{" << eq.label.str() << "}\\\\\n";
  out << "\\end{aligned}\n";
}

// Display name of a constraint component, following the momentum notation:
// psi0, psi1[q2] in mechanics, psi(u[x];y) in field theory.
std::string psi_name(const NameTable& names, int alpha, const MultiIndex& I,
                     int dir) {
  if (names.indep.size() == 1) {
    std::string s = "psi" + std::to_string(I.order());
    if (names.dep.size() > 1) s += "[" + names.dep_name(alpha) + "]";
    return s;
  }
  std::string jet = names.dep_name(alpha);
  if (!I.empty()) {
    std::string sub;
    for (int i : I.entries()) {
      if (!sub.empty()) sub += ",";
      sub += names.indep_name(i);
    }
    jet += "[" + sub + "]";
  }
  return "psi(" + jet + ";" + names.indep_name(dir) + ")";
}

ordered_json regularity_to_json(const RegularityReport& rep) {
  return {{"rows", rep.rows},
          {"cols", rep.cols},
          {"rank", rep.rank},
          {"entries_zero_one", rep.entries_zero_one},
          {"identity_block", rep.identity_block},
          {"full_rank", rep.full_rank}};
}

ordered_json certificate_to_json(const TheoremCertificate& cert) {
  ordered_json matches = ordered_json::array();
  for (const EquationMatch& m : cert.matches)
    matches.push_back({{"left", m.left.str()},
                       {"right", m.right.str()},
                       {"sign", m.sign},
                       {"zero", m.zero},
                       {"probabilistic", m.probabilistic}});
  return {{"structural_ok", cert.structural_ok},
          {"structural_notes", cert.structural_notes},
          {"matches", matches},
          {"pass", cert.pass()},
          {"all_exact", cert.all_exact()}};
}

void emit_certificate_text(const TheoremCertificate& cert, std::ostream& out) {
  for (const std::string& note : cert.structural_notes)
    out << "    note: " << note << "\n";
  for (const EquationMatch& m : cert.matches) {
    out << "    " << m.left.str() << " ~ " << (m.sign < 0 ? "-" : "")
        << m.right.str() << ": " << (m.zero ? "zero" : "NONZERO") << " ("
        << (m.probabilistic ? "probabilistic" : "exact") << ")\n";
  }
}

int cmd_derive(const Problem& p, const std::string& format, std::ostream& out) {
  EquationSystem el = euler_lagrange(p.pf.lagrangian, p.pf.sig);
  if (format == "json") {
    out << system_to_json(el).dump(2) << "\n";
    return 0;
  }
  if (format == "latex") {
    emit_system_latex(el, p.names, out);
    return 0;
  }
  out << signature_line(p.pf.sig) << "\n";
  out << "stationarity equations of order " << 2 * p.pf.sig.k << ":\n";
  emit_system_text(el, p.names, out);
  return 0;
}

int cmd_augment(const Problem& p, const std::string& format,
                std::ostream& out) {
  const AugmentedLagrangian& aug = p.aug;
  if (format == "json") {
    ordered_json psi = ordered_json::array();
    for (const ConstraintComponent& c : aug.psi.components)
      psi.push_back({{"alpha", c.alpha},
                     {"index", c.index.str()},
                     {"dir", c.dir},
                     {"expr", to_sexpr(c.expr)}});
    ordered_json j = {{"signature",
                       {{"n", aug.sig.n}, {"m", aug.sig.m}, {"k", aug.sig.k}}},
                      {"L", to_sexpr(aug.L)},
                      {"L1", to_sexpr(aug.L1)},
                      {"psi", psi}};
    out << j.dump(2) << "\n";
    return 0;
  }
  if (format == "latex") {
    out << "L_1 = " << render_latex(aug.L1, p.names) << "\n";
    for (const ConstraintComponent& c : aug.psi.components)
      out << render_latex(c.expr, p.names) << " = 0\\\\\n";
    return 0;
  }
  out << signature_line(aug.sig) << "\n";
  out << "constraint components (" << aug.psi.components.size() << "):\n";
  for (const ConstraintComponent& c : aug.psi.components)
    out << "  " << psi_name(p.names, c.alpha, c.index, c.dir) << ": "
        << render_text(c.expr, p.names) << " = 0\n";
  out << "augmented first-order density:\n";
  out << "  L1 = " << render_text(aug.L1, p.names) << "\n";
  return 0;
}

int cmd_elh(const Problem& p, const std::string& format, std::ostream& out) {
  EquationSystem sys = elh_system(p.aug);
  if (format == "json") {
    out << system_to_json(sys).dump(2) << "\n";
    return 0;
  }
  if (format == "latex") {
    emit_system_latex(sys, p.names, out);
    return 0;
  }
  out << signature_line(p.pf.sig) << "\n";
  out << "first-order stationarity system on the augmented bundle:\n";
  emit_system_text(sys, p.names, out);
  return 0;
}

int cmd_dw(const Problem& p, const std::string& format, std::ostream& out) {
  DWData dw = dw_data(p.aug);
  const NameTable& names = p.names;
  if (format == "json") {
    ordered_json pairs = ordered_json::array();
    for (const ConjugatePair& pr : dw.pairs)
      pairs.push_back({{"u", atom_name(pr.u)}, {"p", atom_name(pr.p)}});
    ordered_json nd = ordered_json::array();
    for (const Expr& e : dw.non_dynamical) nd.push_back(atom_name(e));
    ordered_json j = {{"signature",
                       {{"n", p.pf.sig.n},
                        {"m", p.pf.sig.m},
                        {"k", p.pf.sig.k}}},
                      {"H", to_sexpr(dw.H)},
                      {"pairs", pairs},
                      {"non_dynamical", nd},
                      {"system", system_to_json(dw.system)}};
    out << j.dump(2) << "\n";
    return 0;
  }

  bool latex = format == "latex";
  std::string H = latex ? render_latex(dw.H, names) : render_text(dw.H, names);
  auto utext = [&](const Expr& e) {
    return latex ? render_latex(e, names) : render_text(e, names);
  };

  if (latex) {
    out << "H = " << H << "\\\\\n";
    emit_system_latex(dw.system, names, out);
    out << "\\omega = ";
    for (const ConjugatePair& pr : dw.pairs) {
      out << "d" << utext(pr.p) << "\\wedge d" << utext(pr.u);
      if (p.pf.sig.n > 1)
        out << "\\wedge \\iota_{\\partial_{" << names.indep_name(pr.dir)
            << "}}\\mathrm{vol}";
      out << " + ";
    }
    out << "d\\left(" << H << "\\right)\\wedge \\mathrm{vol}\n";
    return 0;
  }

  out << signature_line(p.pf.sig) << "\n";
  out << "Hamiltonian on the constrained multimomentum space:\n";
  out << "  H = " << H << "\n";
  out << "conjugate pairs:\n";
  for (const ConjugatePair& pr : dw.pairs)
    out << "  (" << render_text(pr.u, names) << ", " << render_text(pr.p, names)
        << ") along " << names.indep_name(pr.dir) << "\n";
  if (!dw.non_dynamical.empty()) {
    out << "non-dynamical coordinates (no conjugate momentum):";
    for (const Expr& e : dw.non_dynamical) out << " " << render_text(e, names);
    out << "\n";
  }
  out << "field equations:\n";
  emit_system_text(dw.system, names, out);
  out << "multisymplectic form (vol = ";
  for (size_t i = 0; i < names.indep.size(); ++i)
    out << (i ? "^" : "") << "d" << names.indep[i];
  out << "; vol_i contracts d/di into vol):\n";
  out << "  omega = ";
  for (const ConjugatePair& pr : dw.pairs) {
    out << "d" << render_text(pr.p, names) << " ^ d"
        << render_text(pr.u, names);
    if (p.pf.sig.n > 1) out << " ^ vol_" << names.indep_name(pr.dir);
    out << " + ";
  }
  out << "d(" << render_text(dw.H, names) << ") ^ vol\n";
  return 0;
}

int cmd_legendre(const Problem& p, const std::string& format,
                 std::ostream& out) {
  LegendreMap map = legendre_transform(p.aug);
  bool consistent = legendre_fiber_check(p.aug, map);
  const NameTable& names = p.names;

  auto jet_text = [&](int alpha, const MultiIndex& I) {
    return render_text(jet_var(alpha, I), names);
  };

  if (format == "json") {
    ordered_json pj = ordered_json::array();
    for (const auto& a : map.p_assignments)
      pj.push_back({{"alpha", a.alpha},
                    {"index", a.index.str()},
                    {"dir", a.dir},
                    {"value", to_sexpr(a.value)}});
    ordered_json qj = ordered_json::array();
    for (const auto& a : map.q_assignments)
      qj.push_back({{"alpha", a.alpha},
                    {"index", a.index.str()},
                    {"slot", a.slot},
                    {"dir", a.dir},
                    {"value", to_sexpr(a.value)}});
    ordered_json j = {{"signature",
                       {{"n", map.sig.n}, {"m", map.sig.m}, {"k", map.sig.k}}},
                      {"P", pj},
                      {"Q", qj},
                      {"fiber_check", consistent}};
    out << j.dump(2) << "\n";
    return 0;
  }

  bool latex = format == "latex";
  if (!latex) out << signature_line(map.sig) << "\n";
  if (!latex)
    out << "momenta conjugate to field velocities:\n";
  for (const auto& a : map.p_assignments) {
    std::string lhs = "P(" + jet_text(a.alpha, a.index) + ";" +
                      names.indep_name(a.dir) + ")";
    std::string rhs = latex ? render_latex(a.value, names)
                            : render_text(a.value, names);
    if (latex)
      out << lhs << " &\\mapsto " << rhs << "\\\\\n";
    else
      out << "  " << lhs << " -> " << rhs << "\n";
  }
  if (!latex)
    out << "momenta conjugate to multiplier velocities:\n";
  for (const auto& a : map.q_assignments) {
    std::string ptext = render_text(
        mom_var(a.alpha, a.index, a.slot), names);
    std::string lhs = "Q(" + ptext + ";" + names.indep_name(a.dir) + ")";
    if (latex)
      out << lhs << " &\\mapsto 0\\\\\n";
    else
      out << "  " << lhs << " -> 0\n";
  }
  if (!latex)
    out << "fiber derivative check: "
        << (consistent ? "consistent" : "INCONSISTENT") << "\n";
  return consistent ? 0 : 1;
}

int cmd_verify(const Problem& p, const std::string& format,
               std::ostream& out) {
  RegularityReport reg = regularity_certificate(p.aug.psi);
  TheoremCertificate th2 = check_theorem2(p.aug);
  TheoremCertificate th3 = check_theorem3(p.aug);
  bool reg_pass = reg.full_rank && reg.entries_zero_one && reg.identity_block;
  bool overall = reg_pass && th2.pass() && th3.pass();

  if (format == "json") {
    ordered_json j = {{"signature",
                       {{"n", p.pf.sig.n},
                        {"m", p.pf.sig.m},
                        {"k", p.pf.sig.k}}},
                      {"constraint_regularity", regularity_to_json(reg)},
                      {"first_order_equivalence", certificate_to_json(th2)},
                      {"dw_equivalence", certificate_to_json(th3)},
                      {"pass", overall}};
    out << j.dump(2) << "\n";
    return overall ? 0 : 1;
  }
  if (format == "latex")
    throw Error("cli: latex output is not available for 'verify'");

  out << signature_line(p.pf.sig) << "\n";
  out << "[1] constraint morphism regularity:\n";
  out << "    jacobian " << reg.rows << "x" << reg.cols << ", rank "
      << reg.rank << ", entries 0/1: " << (reg.entries_zero_one ? "yes" : "no")
      << ", identity block: " << (reg.identity_block ? "yes" : "no") << " -> "
      << (reg_pass ? "PASS" : "FAIL") << "\n";
  out << "[2] direct first-order system matches the variational one:\n";
  emit_certificate_text(th2, out);
  out << "    " << th2.matches.size() << " equation pairs -> "
      << (th2.pass() ? "PASS" : "FAIL")
      << (th2.pass() && th2.all_exact() ? " (exact)" : "") << "\n";
  out << "[3] covariant Hamiltonian equations match the first-order system:\n";
  emit_certificate_text(th3, out);
  out << "    " << th3.matches.size() << " equation pairs -> "
      << (th3.pass() ? "PASS" : "FAIL")
      << (th3.pass() && th3.all_exact() ? " (exact)" : "") << "\n";
  out << "overall: " << (overall ? "PASS" : "FAIL") << "\n";
  return overall ? 0 : 1;
}

struct SimulateOptions {
  std::string initial_override;
  double t_end = 0;
  double dt = 0;
  bool t_end_set = false;
  bool dt_set = false;
  double tolerance = 1e-5;
};

std::map<std::string, double> build_initial(
    const ProblemFile& pf, const std::string& override_text) {
  std::map<std::string, double> initial(pf.initial.begin(), pf.initial.end());
  if (override_text.empty()) return initial;
  std::stringstream items(override_text);
  std::string item;
  while (std::getline(items, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw Error("cli: --initial entries are name=value");
    std::string name = item.substr(0, eq);
    size_t a = name.find_first_not_of(" \t");
    size_t b = name.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw Error("cli: --initial entries are name=value");
    name = name.substr(a, b - a + 1);
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (end == value.c_str() || (end && *end))
      throw Error("cli: bad numeric value in --initial for '" + name + "'");
    initial[name] = v;
  }
  return initial;
}

int cmd_simulate(const Problem& p, const SimulateOptions& opt,
                 const std::string& format, const std::string& output,
                 std::ostream& out, std::ostream& err) {
  if (p.pf.sig.n != 1)
    throw Error("cli: numerics are mechanics-only (base dimension 1)");

  double t_end = opt.t_end_set ? opt.t_end : p.pf.t_end;
  double dt = opt.dt_set ? opt.dt : p.pf.dt;
  if (dt <= 0) throw Error("cli: dt must be positive");
  if (t_end <= 0) throw Error("cli: t_end must be positive");

  std::map<std::string, double> initial =
      build_initial(p.pf, opt.initial_override);

  MechanicalSystem sys = index_reduce(compile_mechanics(p.aug, p.pf.dependent));
  Trajectory traj = integrate(sys, initial, t_end, dt);

  // Oracle run: same density integrated through the order-2k equation.
  Trajectory oracle;
  CoveringReport covering;
  std::string oracle_error;
  bool have_oracle = false;
  try {
    std::vector<double> y0 = assemble_initial_state(sys, initial);
    std::vector<double> derivs = oracle_initial_from_augmented(sys, y0);
    oracle = oracle_integrate(p.pf.lagrangian, p.pf.sig, p.pf.dependent, derivs,
                              t_end, dt);
    covering = covering_check(p.aug, sys, traj, oracle, opt.tolerance);
    have_oracle = true;
  } catch (const Error& e) {
    oracle_error = e.what();
  }

  std::ostream& report = output.empty() ? err : out;

  if (format == "json") {
    ordered_json j = {{"dt", dt},
                      {"t_end", t_end},
                      {"steps", traj.times.empty() ? 0 : traj.times.size() - 1},
                      {"states", traj.state_names},
                      {"completed", traj.completed},
                      {"max_alg_residual", traj.max_alg_residual},
                      {"max_constraint_defect", traj.max_constraint_defect}};
    if (traj.has_energy) j["energy_drift"] = traj.energy_drift;
    if (!traj.completed) {
      j["error"] = traj.error;
      j["error_time"] = traj.error_time;
    }
    if (have_oracle) {
      j["covering"] = {{"projection_max_error", covering.projection_max_error},
                       {"lift_max_residual", covering.lift_max_residual},
                       {"tolerance", covering.tolerance},
                       {"pass", covering.pass()}};
    } else {
      j["covering"] = nullptr;
      j["oracle_error"] = oracle_error;
    }
    report << j.dump(2) << "\n";
  } else {
    report << "integration: " << (traj.times.empty() ? 0 : traj.times.size() - 1)
           << " steps, dt = " << fmt(dt) << ", t_end = " << fmt(t_end) << "\n";
    report << "states:";
    for (const std::string& s : traj.state_names) report << " " << s;
    report << "\n";
    if (!traj.completed)
      report << "stopped early at t = " << fmt17(traj.error_time) << ": "
             << traj.error << "\n";
    report << "max algebraic residual: " << fmt17(traj.max_alg_residual)
           << "\n";
    report << "max holonomy defect:    " << fmt17(traj.max_constraint_defect)
           << "\n";
    if (traj.has_energy)
      report << "energy drift:           " << fmt17(traj.energy_drift) << "\n";
    if (have_oracle) {
      report << "independent oracle comparison:\n";
      report << "  projection max error: "
             << fmt17(covering.projection_max_error) << "\n";
      report << "  lifted residual max:  " << fmt17(covering.lift_max_residual)
             << "\n";
      report << "  tolerance " << fmt(covering.tolerance) << " -> "
             << (covering.pass() ? "PASS" : "FAIL") << "\n";
    } else {
      report << "independent oracle unavailable: " << oracle_error << "\n";
    }
  }

  with_output(output, out, [&](std::ostream& csv) {
    write_csv(traj, csv);
    return 0;
  });

  bool ok = traj.completed && (!have_oracle || covering.pass());
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"constrained first-order reformulation of higher-order "
               "variational problems"};
  app.name("jetlag");
  app.require_subcommand(1);

  std::string file, format = "text", output;
  SimulateOptions sopt;

  auto add_common = [&](CLI::App* cmd, bool with_latex) {
    cmd->add_option("problem", file, "problem file")->required();
    std::vector<std::string> formats = {"text", "json"};
    if (with_latex) formats.insert(formats.begin() + 1, "latex");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember(formats));
    cmd->add_option("--output", output, "write the result to a file");
  };

  add_common(app.add_subcommand(
                 "derive", "stationarity equations of the given density"),
             true);
  add_common(app.add_subcommand(
                 "augment", "constraint morphism and multiplier density"),
             true);
  add_common(app.add_subcommand(
                 "elh", "first-order stationarity system on the augmented bundle"),
             true);
  add_common(app.add_subcommand(
                 "dw", "covariant Hamiltonian, conjugate pairs, field equations"),
             true);
  add_common(app.add_subcommand("legendre",
                                "degenerate fiber transform of the multiplier "
                                "density"),
             true);
  add_common(app.add_subcommand("verify",
                                "check the reformulation certificates; exit 1 "
                                "on failure"),
             false);
  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate the augmented system and compare with the "
                  "independent oracle");
  add_common(sim, false);
  sim->add_option("--t-end", sopt.t_end, "integration horizon");
  sim->add_option("--dt", sopt.dt, "fixed step size");
  sim->add_option("--initial", sopt.initial_override,
                  "comma-separated name=value pairs overriding the file");
  sim->add_option("--tolerance", sopt.tolerance,
                  "covering comparison tolerance");

  std::vector<const char*> argv;
  argv.push_back("jetlag");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()),
              const_cast<char**>(argv.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  sopt.t_end_set = sim->count("--t-end") > 0;
  sopt.dt_set = sim->count("--dt") > 0;

  try {
    Problem p = load(file);
    CLI::App* cmd = app.get_subcommands().front();
    const std::string& name = cmd->get_name();
    if (name == "simulate")
      return cmd_simulate(p, sopt, format, output, out, err);
    return with_output(output, out, [&](std::ostream& o) {
      if (name == "derive") return cmd_derive(p, format, o);
      if (name == "augment") return cmd_augment(p, format, o);
      if (name == "elh") return cmd_elh(p, format, o);
      if (name == "dw") return cmd_dw(p, format, o);
      if (name == "legendre") return cmd_legendre(p, format, o);
      return cmd_verify(p, format, o);
    });
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " (line " << e.line() << ", column "
        << e.col() << ")\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << " (t = " << fmt17(e.time()) << ")\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace jetlag
