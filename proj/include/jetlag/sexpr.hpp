#pragma once

#include <string>

#include "json.hpp"

#include "jetlag/expr.hpp"
#include "jetlag/variational.hpp"

namespace jetlag {

/// Canonical machine form: "(+ (* 4 u:1:[]) (^ p:1:[]:1 2))". Emission
/// normalizes first, so equal expressions produce byte-identical strings.
std::string to_sexpr(const Expr& e);

/// Inverse of to_sexpr. Accepts the operator heads +, *, ^, neg and the
/// function heads sin, cos, exp, log; atoms are rationals or coordinate
/// symbols (x:i, u:a:[I], p:a:[I]:i, du:a:[I]:i, dp:a:[I]:i:j).
Expr from_sexpr(const std::string& text);

Label label_from_string(const std::string& text);

nlohmann::ordered_json system_to_json(const EquationSystem& sys);
EquationSystem system_from_json(const nlohmann::ordered_json& j);

}  // namespace jetlag
