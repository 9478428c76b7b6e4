#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jetlag/errors.hpp"
#include "jetlag/multi_index.hpp"
#include "jetlag/rational.hpp"

namespace jetlag {

/// Expression trees are immutable and shared. Every Expr produced by the
/// factory functions below is in canonical normal form:
///   - sums are flat, like terms collected, terms sorted;
///   - products are flat, factors sorted, at most one leading rational;
///   - positive integer powers of sums are expanded; a sum survives as a
///     power base only with a negative exponent;
///   - coefficients are exact rationals.
/// Structural equality of canonical trees therefore decides equality of
/// polynomial expressions.
enum class NodeKind {
  Rational,
  Indep,        // base coordinate x^i
  Jet,          // jet coordinate u^alpha_I
  Mom,          // multimomentum p_alpha^{I,i}
  FormalDeriv,  // formal derivative of a single Jet or Mom symbol
  Sum,
  Product,
  Power,        // integer exponent
  Apply,        // unary analytic function
};

enum class Func { Sin, Cos, Exp, Log };

const char* func_name(Func f);

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind = NodeKind::Rational;
  Rational value;         // Rational
  int coord = 0;          // Indep: base coordinate, 1-based
  int dep = 0;            // Jet, Mom: dependent coordinate, 1-based
  MultiIndex index;       // Jet, Mom
  int dir = 0;            // Mom: contact direction; FormalDeriv: direction
  int exponent = 0;       // Power
  Func func = Func::Sin;  // Apply
  std::vector<Expr> kids; // Sum, Product; Power: {base}; Apply, FormalDeriv: {child}
};

// Leaf factories.
Expr make_rational(const Rational& r);
Expr make_int(long long n);
Expr indep_var(int i);
Expr jet_var(int alpha, const MultiIndex& I);
Expr mom_var(int alpha, const MultiIndex& I, int i);
/// Formal derivative symbol d(base)/dx^dir. The base must itself be a Jet or
/// Mom symbol; a formal derivative of a formal derivative is rejected so that
/// first-order systems stay first order.
Expr formal_deriv(const Expr& base, int dir);

// Combinators. All results are canonical.
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr sum_of(const std::vector<Expr>& terms);
Expr product_of(const std::vector<Expr>& factors);
Expr pow_expr(const Expr& base, int exponent);
Expr apply_fn(Func f, const Expr& arg);

/// Rebuild an arbitrary tree into canonical form. Idempotent.
Expr normalize(const Expr& e);

/// Total order on canonical trees: node kind first, then structural
/// lexicographic comparison. Returns <0, 0, >0.
int expr_cmp(const Expr& a, const Expr& b);
bool expr_equal(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const {
    return expr_cmp(a, b) < 0;
  }
};
using AtomValues = std::map<Expr, double, ExprLess>;
using ExprMap = std::map<Expr, Expr, ExprLess>;

/// True for the symbol leaves a valuation must bind: Indep, Jet, Mom,
/// FormalDeriv.
bool is_symbol(const Expr& e);

/// Distinct symbol leaves of e, sorted by expr_cmp.
std::vector<Expr> collect_atoms(const Expr& e);

bool contains_kind(const Expr& e, NodeKind k);

/// Largest |I| over the Jet symbols of e; 0 if none.
int max_jet_order(const Expr& e);

/// Wire name of a symbol leaf: "x:i", "u:a:[I]", "p:a:[I]:i", "du:a:[I]:i",
/// "dp:a:[I]:i:j".
std::string atom_name(const Expr& atom);

/// Partial derivative with respect to a symbol leaf.
Expr partial(const Expr& e, const Expr& atom);

/// Replace whole symbol leaves by expressions, renormalizing.
Expr substitute(const Expr& e, const ExprMap& replacements);

/// Numeric valuation. Throws EvalError on an unbound symbol; division by
/// zero and domain errors surface as non-finite doubles.
double evaluate(const Expr& e, const AtomValues& vals);

/// No Apply nodes and no negative exponents: canonical form is then a
/// genuine multivariate polynomial and equality is decidable.
bool is_polynomial(const Expr& e);

/// Outcome of a zero test. `probabilistic` is set when the decision rested
/// on numeric probes rather than on the normal form, so certificate emitters
/// can report exact vs sampled passes.
struct ZeroResult {
  bool zero = false;
  bool probabilistic = false;
};

/// Zero test. Exact for polynomial expressions (canonical form is unique);
/// otherwise evaluates at random admissible points (seeded from JETLAG_SEED,
/// default 0) and accepts zero only if every probe vanishes to tolerance.
ZeroResult zero_check(const Expr& e);
ZeroResult zero_check(const Expr& e, std::uint64_t seed);
bool is_zero(const Expr& e);
bool is_zero(const Expr& e, std::uint64_t seed);

/// Seed used by the probabilistic zero test, read once from JETLAG_SEED.
std::uint64_t zero_test_seed();

// Arithmetic sugar; structural equality stays expr_equal, not ==.
inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }

}  // namespace jetlag
