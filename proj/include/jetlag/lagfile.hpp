#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jetlag/expr.hpp"
#include "jetlag/signature.hpp"

namespace jetlag {

/// A parsed problem file. Lines are `key: value` with `#` comments:
///
///   independent: t
///   dependent: q
///   lagrangian: 1/2*(q[t,t]^2 - 5*q[t]^2 + 4*q^2)
///   initial: q=1, q'=0, q''=-1, p0=0
///   t_end: 10
///   dt: 0.001
///
/// Derivatives are bracket subscripts by independent-variable name, in any
/// order (q[t,t] == second derivative). The jet order k is inferred from the
/// deepest subscript; the numeric block is optional and only consulted by
/// the simulator.
struct ProblemFile {
  std::vector<std::string> independent;
  std::vector<std::string> dependent;
  BundleSignature sig;
  Expr lagrangian;
  std::vector<std::pair<std::string, double>> initial;
  double t_end = 10.0;
  double dt = 1e-3;
  bool has_t_end = false;
  bool has_dt = false;
};

ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::string& path);

}  // namespace jetlag
