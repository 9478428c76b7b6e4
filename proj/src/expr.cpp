#include "jetlag/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

namespace jetlag {

namespace {

Expr raw(NodeKind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

int kind_rank(NodeKind k) { return static_cast<int>(k); }

// ---------------------------------------------------------------------------
// Normal form: a polynomial-like map monomial -> rational coefficient, where
// a monomial is a sorted list of (base, exponent) factors. Bases are symbol
// leaves, Apply nodes, or (for negative exponents only) whole canonical sums.

using Factor = std::pair<Expr, int>;

struct Monomial {
  std::vector<Factor> fs;  // sorted by base, bases distinct, exponents nonzero
};

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    size_t n = std::min(a.fs.size(), b.fs.size());
    for (size_t i = 0; i < n; ++i) {
      int c = expr_cmp(a.fs[i].first, b.fs[i].first);
      if (c != 0) return c < 0;
      if (a.fs[i].second != b.fs[i].second)
        return a.fs[i].second < b.fs[i].second;
    }
    return a.fs.size() < b.fs.size();
  }
};

using NF = std::map<Monomial, Rational, MonoLess>;

NF nf_mul(const NF& a, const NF& b);

NF nf_const(const Rational& c) {
  NF out;
  if (!c.is_zero()) out.emplace(Monomial{}, c);
  return out;
}

void nf_add_into(NF& acc, const NF& other) {
  for (const auto& [m, c] : other) {
    auto it = acc.find(m);
    if (it == acc.end()) {
      acc.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) acc.erase(it);
    }
  }
}

NF toNF(const Expr& e);
Expr fromNF(const NF& nf);

NF nf_pow_pos(const NF& base, int e) {
  NF acc = nf_const(Rational(1));
  NF sq = base;
  while (e > 0) {
    if (e & 1) acc = nf_mul(acc, sq);
    e >>= 1;
    if (e) sq = nf_mul(sq, sq);
  }
  return acc;
}

// Canonicalize one monomial: drop zero exponents, expand any positive power
// of a sum into polynomial terms. Expansions introduce no further positive
// sum powers, so the mutual recursion with nf_mul terminates.
NF monomial_nf(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return {};
  for (size_t i = 0; i < m.fs.size(); ++i) {
    const auto& [base, e] = m.fs[i];
    if (e == 0) {
      Monomial rest = m;
      rest.fs.erase(rest.fs.begin() + i);
      return monomial_nf(rest, c);
    }
    if (base->kind == NodeKind::Sum && e > 0) {
      Monomial rest = m;
      rest.fs.erase(rest.fs.begin() + i);
      return nf_mul(nf_pow_pos(toNF(base), e), monomial_nf(rest, c));
    }
  }
  NF out;
  out.emplace(m, c);
  return out;
}

NF nf_mul(const NF& a, const NF& b) {
  NF out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial merged;
      size_t i = 0, j = 0;
      while (i < ma.fs.size() && j < mb.fs.size()) {
        int c = expr_cmp(ma.fs[i].first, mb.fs[j].first);
        if (c < 0) {
          merged.fs.push_back(ma.fs[i++]);
        } else if (c > 0) {
          merged.fs.push_back(mb.fs[j++]);
        } else {
          int e = ma.fs[i].second + mb.fs[j].second;
          if (e != 0) merged.fs.emplace_back(ma.fs[i].first, e);
          ++i;
          ++j;
        }
      }
      for (; i < ma.fs.size(); ++i) merged.fs.push_back(ma.fs[i]);
      for (; j < mb.fs.size(); ++j) merged.fs.push_back(mb.fs[j]);
      nf_add_into(out, monomial_nf(merged, ca * cb));
    }
  }
  return out;
}

NF nf_pow(const NF& base, int e) {
  if (e == 0) return nf_const(Rational(1));
  if (base.empty()) {
    if (e < 0) throw ExprError("expr: zero raised to a negative power");
    return {};
  }
  if (e > 0 && base.size() > 1) return nf_pow_pos(base, e);
  if (base.size() == 1) {
    const auto& [m, c] = *base.begin();
    NF acc = nf_const(c.pow(e));
    for (const auto& [b, f] : m.fs) {
      Monomial single;
      single.fs.emplace_back(b, f * e);
      acc = nf_mul(acc, monomial_nf(single, Rational(1)));
    }
    return acc;
  }
  // Multi-term sum to a negative power stays a single opaque factor.
  Monomial m;
  m.fs.emplace_back(fromNF(base), e);
  NF out;
  out.emplace(std::move(m), Rational(1));
  return out;
}

NF toNF(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Rational:
      return nf_const(e->value);
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv:
    case NodeKind::Apply: {
      Monomial m;
      m.fs.emplace_back(e, 1);
      NF out;
      out.emplace(std::move(m), Rational(1));
      return out;
    }
    case NodeKind::Sum: {
      NF acc;
      for (const auto& kid : e->kids) nf_add_into(acc, toNF(kid));
      return acc;
    }
    case NodeKind::Product: {
      NF acc = nf_const(Rational(1));
      for (const auto& kid : e->kids) acc = nf_mul(acc, toNF(kid));
      return acc;
    }
    case NodeKind::Power:
      return nf_pow(toNF(e->kids[0]), e->exponent);
  }
  throw ExprError("expr: malformed node");
}

Expr factor_expr(const Factor& f) {
  if (f.second == 1) return f.first;
  Expr p = raw(NodeKind::Power);
  auto* n = const_cast<ExprNode*>(p.get());
  n->kids = {f.first};
  n->exponent = f.second;
  return p;
}

Expr term_expr(const Monomial& m, const Rational& c) {
  if (m.fs.empty()) return make_rational(c);
  std::vector<Expr> parts;
  if (!c.is_one()) parts.push_back(make_rational(c));
  for (const auto& f : m.fs) parts.push_back(factor_expr(f));
  if (parts.size() == 1) return parts[0];
  Expr p = raw(NodeKind::Product);
  const_cast<ExprNode*>(p.get())->kids = std::move(parts);
  return p;
}

Expr fromNF(const NF& nf) {
  if (nf.empty()) return make_int(0);
  if (nf.size() == 1) return term_expr(nf.begin()->first, nf.begin()->second);
  std::vector<Expr> terms;
  terms.reserve(nf.size());
  for (const auto& [m, c] : nf) terms.push_back(term_expr(m, c));
  Expr s = raw(NodeKind::Sum);
  const_cast<ExprNode*>(s.get())->kids = std::move(terms);
  return s;
}

double ipow(double b, int e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  double acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return acc;
}

void collect_atoms_into(const Expr& e, std::vector<Expr>& out) {
  if (is_symbol(e)) {
    out.push_back(e);
    return;
  }
  for (const auto& kid : e->kids) collect_atoms_into(kid, out);
}

double draw_coordinate(std::mt19937_64& rng) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double s = u * 3.0;
  // Uniform over [-2,-1/2) u [1/2,2): bounded away from zero and from
  // large values so probes neither cancel by magnitude nor overflow.
  return s < 1.5 ? s - 2.0 : s - 1.0;
}

}  // namespace

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
  }
  return "?";
}

Expr make_rational(const Rational& r) {
  Expr e = raw(NodeKind::Rational);
  const_cast<ExprNode*>(e.get())->value = r;
  return e;
}

Expr make_int(long long n) { return make_rational(Rational(n)); }

Expr indep_var(int i) {
  if (i < 1) throw ExprError("expr: base coordinate index must be >= 1");
  Expr e = raw(NodeKind::Indep);
  const_cast<ExprNode*>(e.get())->coord = i;
  return e;
}

Expr jet_var(int alpha, const MultiIndex& I) {
  if (alpha < 1) throw ExprError("expr: dependent index must be >= 1");
  Expr e = raw(NodeKind::Jet);
  auto* n = const_cast<ExprNode*>(e.get());
  n->dep = alpha;
  n->index = I;
  return e;
}

Expr mom_var(int alpha, const MultiIndex& I, int i) {
  if (alpha < 1) throw ExprError("expr: dependent index must be >= 1");
  if (i < 1) throw ExprError("expr: contact direction must be >= 1");
  Expr e = raw(NodeKind::Mom);
  auto* n = const_cast<ExprNode*>(e.get());
  n->dep = alpha;
  n->index = I;
  n->dir = i;
  return e;
}

Expr formal_deriv(const Expr& base, int dir) {
  if (dir < 1) throw ExprError("expr: derivative direction must be >= 1");
  if (base->kind == NodeKind::FormalDeriv)
    throw ExprError("expr: nested formal derivative is not first order");
  if (base->kind != NodeKind::Jet && base->kind != NodeKind::Mom)
    throw ExprError("expr: formal derivative base must be a jet or momentum symbol");
  Expr e = raw(NodeKind::FormalDeriv);
  auto* n = const_cast<ExprNode*>(e.get());
  n->kids = {base};
  n->dir = dir;
  return e;
}

Expr add(const Expr& a, const Expr& b) { return sum_of({a, b}); }

Expr sub(const Expr& a, const Expr& b) { return sum_of({a, neg(b)}); }

Expr neg(const Expr& a) { return mul(make_int(-1), a); }

Expr mul(const Expr& a, const Expr& b) { return product_of({a, b}); }

Expr div(const Expr& a, const Expr& b) { return mul(a, pow_expr(b, -1)); }

Expr sum_of(const std::vector<Expr>& terms) {
  NF acc;
  for (const auto& t : terms) nf_add_into(acc, toNF(t));
  return fromNF(acc);
}

Expr product_of(const std::vector<Expr>& factors) {
  NF acc = nf_const(Rational(1));
  for (const auto& f : factors) acc = nf_mul(acc, toNF(f));
  return fromNF(acc);
}

Expr pow_expr(const Expr& base, int exponent) {
  return fromNF(nf_pow(toNF(base), exponent));
}

Expr apply_fn(Func f, const Expr& arg) {
  Expr e = raw(NodeKind::Apply);
  auto* n = const_cast<ExprNode*>(e.get());
  n->func = f;
  n->kids = {normalize(arg)};
  return e;
}

Expr normalize(const Expr& e) { return fromNF(toNF(e)); }

int expr_cmp(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind)
    return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
  switch (a->kind) {
    case NodeKind::Rational:
      return a->value.cmp(b->value);
    case NodeKind::Indep:
      return a->coord == b->coord ? 0 : (a->coord < b->coord ? -1 : 1);
    case NodeKind::Jet: {
      if (a->dep != b->dep) return a->dep < b->dep ? -1 : 1;
      return a->index.cmp(b->index);
    }
    case NodeKind::Mom: {
      if (a->dep != b->dep) return a->dep < b->dep ? -1 : 1;
      if (int c = a->index.cmp(b->index)) return c;
      return a->dir == b->dir ? 0 : (a->dir < b->dir ? -1 : 1);
    }
    case NodeKind::FormalDeriv: {
      if (int c = expr_cmp(a->kids[0], b->kids[0])) return c;
      return a->dir == b->dir ? 0 : (a->dir < b->dir ? -1 : 1);
    }
    case NodeKind::Apply: {
      if (a->func != b->func)
        return static_cast<int>(a->func) < static_cast<int>(b->func) ? -1 : 1;
      return expr_cmp(a->kids[0], b->kids[0]);
    }
    case NodeKind::Power: {
      if (int c = expr_cmp(a->kids[0], b->kids[0])) return c;
      return a->exponent == b->exponent ? 0
                                        : (a->exponent < b->exponent ? -1 : 1);
    }
    case NodeKind::Sum:
    case NodeKind::Product: {
      size_t n = std::min(a->kids.size(), b->kids.size());
      for (size_t i = 0; i < n; ++i)
        if (int c = expr_cmp(a->kids[i], b->kids[i])) return c;
      if (a->kids.size() != b->kids.size())
        return a->kids.size() < b->kids.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

bool expr_equal(const Expr& a, const Expr& b) { return expr_cmp(a, b) == 0; }

bool is_symbol(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv:
      return true;
    default:
      return false;
  }
}

std::vector<Expr> collect_atoms(const Expr& e) {
  std::vector<Expr> out;
  collect_atoms_into(e, out);
  std::sort(out.begin(), out.end(), ExprLess{});
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Expr& a, const Expr& b) {
                          return expr_equal(a, b);
                        }),
            out.end());
  return out;
}

bool contains_kind(const Expr& e, NodeKind k) {
  if (e->kind == k) return true;
  for (const auto& kid : e->kids)
    if (contains_kind(kid, k)) return true;
  return false;
}

int max_jet_order(const Expr& e) {
  int best = 0;
  if (e->kind == NodeKind::Jet) best = e->index.order();
  for (const auto& kid : e->kids) best = std::max(best, max_jet_order(kid));
  return best;
}

std::string atom_name(const Expr& atom) {
  switch (atom->kind) {
    case NodeKind::Indep:
      return "x:" + std::to_string(atom->coord);
    case NodeKind::Jet:
      return "u:" + std::to_string(atom->dep) + ":" + atom->index.str();
    case NodeKind::Mom:
      return "p:" + std::to_string(atom->dep) + ":" + atom->index.str() +
             ":" + std::to_string(atom->dir);
    case NodeKind::FormalDeriv: {
      const Expr& b = atom->kids[0];
      if (b->kind == NodeKind::Jet)
        return "du:" + std::to_string(b->dep) + ":" + b->index.str() + ":" +
               std::to_string(atom->dir);
      return "dp:" + std::to_string(b->dep) + ":" + b->index.str() + ":" +
             std::to_string(b->dir) + ":" + std::to_string(atom->dir);
    }
    default:
      throw ExprError("expr: atom_name on a non-symbol node");
  }
}

Expr partial(const Expr& e, const Expr& atom) {
  if (!is_symbol(atom))
    throw ExprError("expr: partial derivative target must be a symbol");
  switch (e->kind) {
    case NodeKind::Rational:
      return make_int(0);
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv:
      return make_int(expr_equal(e, atom) ? 1 : 0);
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(e->kids.size());
      for (const auto& kid : e->kids) parts.push_back(partial(kid, atom));
      return sum_of(parts);
    }
    case NodeKind::Product: {
      std::vector<Expr> terms;
      for (size_t i = 0; i < e->kids.size(); ++i) {
        std::vector<Expr> fs = e->kids;
        fs[i] = partial(e->kids[i], atom);
        terms.push_back(product_of(fs));
      }
      return sum_of(terms);
    }
    case NodeKind::Power: {
      Expr inner = partial(e->kids[0], atom);
      return product_of({make_int(e->exponent),
                         pow_expr(e->kids[0], e->exponent - 1), inner});
    }
    case NodeKind::Apply: {
      Expr arg = e->kids[0];
      Expr inner = partial(arg, atom);
      Expr outer;
      switch (e->func) {
        case Func::Sin: outer = apply_fn(Func::Cos, arg); break;
        case Func::Cos: outer = neg(apply_fn(Func::Sin, arg)); break;
        case Func::Exp: outer = apply_fn(Func::Exp, arg); break;
        case Func::Log: outer = pow_expr(arg, -1); break;
      }
      return mul(outer, inner);
    }
  }
  throw ExprError("expr: malformed node");
}

Expr substitute(const Expr& e, const ExprMap& replacements) {
  switch (e->kind) {
    case NodeKind::Rational:
      return e;
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv: {
      auto it = replacements.find(e);
      return it == replacements.end() ? e : it->second;
    }
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(e->kids.size());
      for (const auto& kid : e->kids)
        parts.push_back(substitute(kid, replacements));
      return sum_of(parts);
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      parts.reserve(e->kids.size());
      for (const auto& kid : e->kids)
        parts.push_back(substitute(kid, replacements));
      return product_of(parts);
    }
    case NodeKind::Power:
      return pow_expr(substitute(e->kids[0], replacements), e->exponent);
    case NodeKind::Apply:
      return apply_fn(e->func, substitute(e->kids[0], replacements));
  }
  throw ExprError("expr: malformed node");
}

double evaluate(const Expr& e, const AtomValues& vals) {
  switch (e->kind) {
    case NodeKind::Rational:
      return e->value.to_double();
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv: {
      auto it = vals.find(e);
      if (it == vals.end())
        throw EvalError("expr: unbound symbol " + atom_name(e) +
                        " in evaluation");
      return it->second;
    }
    case NodeKind::Sum: {
      double acc = 0.0;
      for (const auto& kid : e->kids) acc += evaluate(kid, vals);
      return acc;
    }
    case NodeKind::Product: {
      double acc = 1.0;
      for (const auto& kid : e->kids) acc *= evaluate(kid, vals);
      return acc;
    }
    case NodeKind::Power:
      return ipow(evaluate(e->kids[0], vals), e->exponent);
    case NodeKind::Apply: {
      double a = evaluate(e->kids[0], vals);
      switch (e->func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log: return std::log(a);
      }
    }
  }
  throw EvalError("expr: malformed node");
}

bool is_polynomial(const Expr& e) {
  if (e->kind == NodeKind::Apply) return false;
  if (e->kind == NodeKind::Power && e->exponent < 0) return false;
  for (const auto& kid : e->kids)
    if (!is_polynomial(kid)) return false;
  return true;
}

ZeroResult zero_check(const Expr& e) { return zero_check(e, zero_test_seed()); }

bool is_zero(const Expr& e) { return zero_check(e).zero; }

bool is_zero(const Expr& e, std::uint64_t seed) {
  return zero_check(e, seed).zero;
}

ZeroResult zero_check(const Expr& e, std::uint64_t seed) {
  Expr c = normalize(e);
  if (is_polynomial(c))
    return {c->kind == NodeKind::Rational && c->value.is_zero(), false};

  // Not decidable by normal form alone: probe at random points. The scale
  // of the largest term guards against declaring a catastrophic cancellation
  // to be an identity.
  std::vector<Expr> atoms = collect_atoms(c);
  std::mt19937_64 rng(seed);
  constexpr int kProbes = 20;
  constexpr int kMaxResamples = 100;
  constexpr double kTol = 1e-9;
  int resamples = 0;
  for (int probe = 0; probe < kProbes; ++probe) {
    for (;;) {
      AtomValues vals;
      for (const auto& a : atoms) vals[a] = draw_coordinate(rng);
      double scale = 0.0;
      double value;
      if (c->kind == NodeKind::Sum) {
        value = 0.0;
        for (const auto& kid : c->kids) {
          double t = evaluate(kid, vals);
          value += t;
          scale = std::max(scale, std::abs(t));
        }
      } else {
        value = evaluate(c, vals);
        scale = std::abs(value);
      }
      if (std::isfinite(value) && std::isfinite(scale)) {
        if (std::abs(value) > kTol * (1.0 + scale)) return {false, true};
        break;
      }
      if (++resamples > kMaxResamples)
        throw EvalError(
            "expr: zero test could not find admissible sample points");
    }
  }
  return {true, true};
}

std::uint64_t zero_test_seed() {
  static const std::uint64_t seed = [] {
    const char* env = std::getenv("JETLAG_SEED");
    if (env == nullptr || *env == '\0') return std::uint64_t{0};
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
      throw ExprError("expr: JETLAG_SEED must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  }();
  return seed;
}

}  // namespace jetlag
