#include "jetlag/render.hpp"

#include <sstream>

namespace jetlag {

namespace {

std::string fallback_indep(int i) { return "x" + std::to_string(i); }
std::string fallback_dep(int alpha) { return "u" + std::to_string(alpha); }

enum Prec { kSum = 0, kProd = 1, kPow = 2, kAtom = 3 };

struct Renderer {
  const NameTable& names;
  bool latex = false;

  std::string indep(int i) const {
    if (i >= 1 && i <= static_cast<int>(names.indep.size())) return names.indep[i - 1];
    return fallback_indep(i);
  }
  std::string dep(int alpha) const {
    if (alpha >= 1 && alpha <= static_cast<int>(names.dep.size())) return names.dep[alpha - 1];
    return fallback_dep(alpha);
  }

  std::string rational(const Rational& r) const {
    if (!latex || r.den() == 1) return r.str();
    std::string sign = r.num() < 0 ? "-" : "";
    long long p = r.num() < 0 ? -r.num() : r.num();
    return sign + "\\tfrac{" + std::to_string(p) + "}{" + std::to_string(r.den()) + "}";
  }

  std::string jet(int alpha, const MultiIndex& I) const {
    std::string base = dep(alpha);
    if (I.order() == 0) return base;
    if (latex) {
      std::string sub;
      for (int i : I.entries()) sub += indep(i);
      return base + "_{" + sub + "}";
    }
    std::string sub;
    for (int i : I.entries()) {
      if (!sub.empty()) sub += ",";
      sub += indep(i);
    }
    return base + "[" + sub + "]";
  }

  std::string mom(int alpha, const MultiIndex& I, int dir) const {
    if (latex) {
      std::string out = "p";
      if (names.dep.size() > 1) out += "_{" + dep(alpha) + "}";
      std::string sup;
      for (int i : I.entries()) sup += indep(i);
      return out + "^{" + sup + "\\cdot " + indep(dir) + "}";
    }
    if (names.indep.size() == 1) {
      std::string out = "p" + std::to_string(I.order());
      if (names.dep.size() > 1) out += "[" + dep(alpha) + "]";
      return out;
    }
    return "p(" + jet(alpha, I) + ";" + indep(dir) + ")";
  }

  std::string atom(const Expr& e) const {
    switch (e->kind) {
      case NodeKind::Indep:
        return indep(e->coord);
      case NodeKind::Jet:
        return jet(e->dep, e->index);
      case NodeKind::Mom:
        return mom(e->dep, e->index, e->dir);
      case NodeKind::FormalDeriv: {
        std::string base = atom(e->kids[0]);
        if (latex) return "{" + base + "}_{\\cdot " + indep(e->dir) + "}";
        return "d(" + base + ")/d" + indep(e->dir);
      }
      default:
        throw ExprError("render: not an atomic symbol");
    }
  }

  std::string render(const Expr& e, int parent) const {
    switch (e->kind) {
      case NodeKind::Rational: {
        std::string s = rational(e->value);
        if (e->value.num() < 0 && parent > kSum) return "(" + s + ")";
        return s;
      }
      case NodeKind::Indep:
      case NodeKind::Jet:
      case NodeKind::Mom:
      case NodeKind::FormalDeriv:
        return atom(e);
      case NodeKind::Apply: {
        std::string fn = func_name(e->func);
        std::string arg = render(e->kids[0], kSum);
        if (latex) return "\\" + fn + "\\left(" + arg + "\\right)";
        return fn + "(" + arg + ")";
      }
      case NodeKind::Power: {
        std::string base = render(e->kids[0], kAtom);
        std::string out;
        if (latex)
          out = base + "^{" + std::to_string(e->exponent) + "}";
        else
          out = base + "^" + std::to_string(e->exponent);
        if (parent > kPow) out = "(" + out + ")";
        return out;
      }
      case NodeKind::Product: {
        std::string out = product_body(e, /*negate=*/false);
        if (parent > kProd) out = "(" + out + ")";
        return out;
      }
      case NodeKind::Sum: {
        std::string out;
        bool first = true;
        for (const Expr& kid : e->kids) {
          auto [neg, body] = signed_term(kid);
          if (first) {
            out = neg ? "-" + body : body;
            first = false;
          } else {
            out += neg ? " - " : " + ";
            out += body;
          }
        }
        if (parent > kSum) out = "(" + out + ")";
        return out;
      }
    }
    throw ExprError("render: unknown node kind");
  }

  // Splits a leading negative coefficient off a sum term so the sum can be
  // printed with infix minus signs.
  std::pair<bool, std::string> signed_term(const Expr& term) const {
    if (term->kind == NodeKind::Rational && term->value.num() < 0)
      return {true, rational(-term->value)};
    if (term->kind == NodeKind::Product && term->kids[0]->kind == NodeKind::Rational &&
        term->kids[0]->value.num() < 0)
      return {true, product_body(term, /*negate=*/true)};
    return {false, render(term, kProd)};
  }

  std::string product_body(const Expr& prod, bool negate) const {
    std::string sep = latex ? "\\," : "*";
    std::string out;
    bool first = true;
    for (const Expr& kid : prod->kids) {
      std::string piece;
      if (first && kid->kind == NodeKind::Rational) {
        Rational c = negate ? -kid->value : kid->value;
        if (c == Rational(1) && prod->kids.size() > 1) {
          first = false;
          continue;
        }
        if (c == Rational(-1) && prod->kids.size() > 1) {
          out = "-";
          first = false;
          continue;
        }
        piece = rational(c);
      } else {
        piece = render(kid, kProd);
      }
      if (!out.empty() && out != "-") out += sep;
      out += piece;
      first = false;
    }
    return out;
  }
};

}  // namespace

NameTable NameTable::defaults(const BundleSignature& sig) {
  NameTable t;
  if (sig.n == 1) {
    t.indep = {"t"};
  } else {
    static const char* axes[] = {"x", "y", "z"};
    for (int i = 0; i < sig.n; ++i) t.indep.push_back(axes[i]);
  }
  if (sig.m == 1) {
    t.dep = {"u"};
  } else {
    for (int a = 1; a <= sig.m; ++a) t.dep.push_back(fallback_dep(a));
  }
  return t;
}

const std::string& NameTable::indep_name(int i) const {
  if (i < 1 || i > static_cast<int>(indep.size()))
    throw ExprError("render: independent-variable index out of range");
  return indep[i - 1];
}

const std::string& NameTable::dep_name(int alpha) const {
  if (alpha < 1 || alpha > static_cast<int>(dep.size()))
    throw ExprError("render: dependent-variable index out of range");
  return dep[alpha - 1];
}

std::string render_text(const Expr& e, const NameTable& names) {
  Renderer r{names, false};
  return r.render(normalize(e), kSum);
}

std::string render_latex(const Expr& e, const NameTable& names) {
  Renderer r{names, true};
  return r.render(normalize(e), kSum);
}

}  // namespace jetlag
