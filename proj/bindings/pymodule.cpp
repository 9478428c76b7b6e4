#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jetlag/cli.hpp"
#include "jetlag/constraint.hpp"
#include "jetlag/dedonder.hpp"
#include "jetlag/jet.hpp"
#include "jetlag/lagfile.hpp"
#include "jetlag/mech.hpp"
#include "jetlag/render.hpp"
#include "jetlag/sexpr.hpp"
#include "jetlag/variational.hpp"

namespace py = pybind11;
using namespace jetlag;

namespace {

// Value wrapper so Python holds expression trees without touching the
// shared_ptr-to-const plumbing.
struct PyExpr {
  Expr e;
};

PyExpr wrap(const Expr& e) { return PyExpr{e}; }

NameTable table_for(const std::vector<std::string>& indep,
                    const std::vector<std::string>& dep) {
  return NameTable{indep, dep};
}

py::list system_to_list(const EquationSystem& sys) {
  py::list out;
  for (const Equation& eq : sys.equations)
    out.append(py::make_tuple(eq.label.str(), wrap(eq.residual)));
  return out;
}

py::dict certificate_to_dict(const TheoremCertificate& cert) {
  py::list matches;
  for (const EquationMatch& m : cert.matches)
    matches.append(py::dict(
        py::arg("left") = m.left.str(), py::arg("right") = m.right.str(),
        py::arg("sign") = m.sign, py::arg("zero") = m.zero,
        py::arg("probabilistic") = m.probabilistic));
  py::dict d;
  d["structural_ok"] = cert.structural_ok;
  d["structural_notes"] = cert.structural_notes;
  d["matches"] = matches;
  d["pass"] = cert.pass();
  d["all_exact"] = cert.all_exact();
  return d;
}

py::dict trajectory_to_dict(const Trajectory& traj) {
  py::dict d;
  d["state_names"] = traj.state_names;
  d["times"] = traj.times;
  d["values"] = traj.values;
  d["alg_residual"] = traj.alg_residual;
  d["max_alg_residual"] = traj.max_alg_residual;
  d["max_constraint_defect"] = traj.max_constraint_defect;
  d["has_energy"] = traj.has_energy;
  d["energy_drift"] = traj.energy_drift;
  d["completed"] = traj.completed;
  d["error"] = traj.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_jetlag, mod) {
  mod.doc() = "constrained first-order reformulation of higher-order "
              "variational problems";

  // translators run newest-first, so the derived type goes last
  py::register_exception<Error>(mod, "EngineError");
  py::register_exception<ParseError>(mod, "ProblemParseError");

  py::class_<BundleSignature>(mod, "Signature")
      .def(py::init<int, int, int>(), py::arg("n"), py::arg("m"), py::arg("k"))
      .def_readonly("n", &BundleSignature::n)
      .def_readonly("m", &BundleSignature::m)
      .def_readonly("k", &BundleSignature::k)
      .def("__repr__", &BundleSignature::str);

  py::class_<PyExpr>(mod, "Expr")
      .def("__repr__", [](const PyExpr& s) { return to_sexpr(s.e); })
      .def("__eq__", [](const PyExpr& a, const PyExpr& b) {
        return expr_equal(a.e, b.e);
      });

  mod.def("parse_sexpr", [](const std::string& s) { return wrap(from_sexpr(s)); });
  mod.def("sexpr", [](const PyExpr& e) { return to_sexpr(e.e); });
  mod.def(
      "render",
      [](const PyExpr& e, const std::vector<std::string>& indep,
         const std::vector<std::string>& dep) {
        return render_text(e.e, table_for(indep, dep));
      },
      py::arg("expr"), py::arg("independent"), py::arg("dependent"));
  mod.def("is_zero", [](const PyExpr& e) {
    ZeroResult r = zero_check(e.e);
    return py::make_tuple(r.zero, r.probabilistic);
  });

  py::class_<ProblemFile>(mod, "Problem")
      .def_readonly("independent", &ProblemFile::independent)
      .def_readonly("dependent", &ProblemFile::dependent)
      .def_readonly("signature", &ProblemFile::sig)
      .def_property_readonly(
          "lagrangian", [](const ProblemFile& p) { return wrap(p.lagrangian); })
      .def_readonly("initial", &ProblemFile::initial)
      .def_readonly("t_end", &ProblemFile::t_end)
      .def_readonly("dt", &ProblemFile::dt);

  mod.def("parse_problem", &parse_problem_text, py::arg("text"));
  mod.def("load_problem", &load_problem, py::arg("path"));

  mod.def(
      "euler_lagrange",
      [](const PyExpr& L, const BundleSignature& sig) {
        return system_to_list(euler_lagrange(L.e, sig));
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "constraint_components",
      [](const BundleSignature& sig) {
        py::list out;
        for (const ConstraintComponent& c : constraint_morphism(sig).components)
          out.append(py::make_tuple(c.alpha, c.index.str(), c.dir,
                                    wrap(c.expr)));
        return out;
      },
      py::arg("signature"));

  mod.def(
      "augmented_density",
      [](const PyExpr& L, const BundleSignature& sig) {
        return wrap(augment(L.e, sig).L1);
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "elh",
      [](const PyExpr& L, const BundleSignature& sig) {
        return system_to_list(elh_system(augment(L.e, sig)));
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "dw",
      [](const PyExpr& L, const BundleSignature& sig) {
        DWData data = dw_data(augment(L.e, sig));
        py::list pairs;
        for (const ConjugatePair& pr : data.pairs)
          pairs.append(py::make_tuple(atom_name(pr.u), atom_name(pr.p)));
        py::dict d;
        d["H"] = wrap(data.H);
        d["pairs"] = pairs;
        d["system"] = system_to_list(data.system);
        return d;
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "check_first_order_equivalence",
      [](const PyExpr& L, const BundleSignature& sig) {
        return certificate_to_dict(check_theorem2(augment(L.e, sig)));
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "check_dw_equivalence",
      [](const PyExpr& L, const BundleSignature& sig) {
        return certificate_to_dict(check_theorem3(augment(L.e, sig)));
      },
      py::arg("L"), py::arg("signature"));

  mod.def(
      "regularity",
      [](const BundleSignature& sig) {
        RegularityReport r = regularity_certificate(constraint_morphism(sig));
        py::dict d;
        d["rows"] = r.rows;
        d["cols"] = r.cols;
        d["rank"] = r.rank;
        d["entries_zero_one"] = r.entries_zero_one;
        d["identity_block"] = r.identity_block;
        d["full_rank"] = r.full_rank;
        return d;
      },
      py::arg("signature"));

  mod.def(
      "simulate",
      [](const std::string& problem_text, double tolerance) {
        ProblemFile pf = parse_problem_text(problem_text);
        AugmentedLagrangian aug = augment(pf.lagrangian, pf.sig);
        MechanicalSystem sys =
            index_reduce(compile_mechanics(aug, pf.dependent));
        std::map<std::string, double> initial(pf.initial.begin(),
                                              pf.initial.end());
        Trajectory traj = integrate(sys, initial, pf.t_end, pf.dt);
        py::dict d = trajectory_to_dict(traj);
        std::vector<double> y0 = assemble_initial_state(sys, initial);
        std::vector<double> derivs = oracle_initial_from_augmented(sys, y0);
        Trajectory oracle = oracle_integrate(pf.lagrangian, pf.sig,
                                             pf.dependent, derivs, pf.t_end,
                                             pf.dt);
        CoveringReport cov =
            covering_check(aug, sys, traj, oracle, tolerance);
        py::dict c;
        c["projection_max_error"] = cov.projection_max_error;
        c["lift_max_residual"] = cov.lift_max_residual;
        c["tolerance"] = cov.tolerance;
        c["pass"] = cov.pass();
        d["covering"] = c;
        return d;
      },
      py::arg("problem_text"), py::arg("tolerance") = 1e-5);

  mod.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int rc = run_cli(args, out, err);
    return py::make_tuple(rc, out.str(), err.str());
  });
}
