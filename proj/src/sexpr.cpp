#include "jetlag/sexpr.hpp"

#include <cctype>
#include <cstdlib>

namespace jetlag {

namespace {

void emit(const Expr& e, std::string& out) {
  switch (e->kind) {
    case NodeKind::Rational:
      out += e->value.str();
      return;
    case NodeKind::Indep:
    case NodeKind::Jet:
    case NodeKind::Mom:
    case NodeKind::FormalDeriv:
      out += atom_name(e);
      return;
    case NodeKind::Sum:
    case NodeKind::Product:
      out += e->kind == NodeKind::Sum ? "(+" : "(*";
      for (const Expr& kid : e->kids) {
        out += ' ';
        emit(kid, out);
      }
      out += ')';
      return;
    case NodeKind::Power:
      out += "(^ ";
      emit(e->kids[0], out);
      out += ' ';
      out += std::to_string(e->exponent);
      out += ')';
      return;
    case NodeKind::Apply:
      out += '(';
      out += func_name(e->func);
      out += ' ';
      emit(e->kids[0], out);
      out += ')';
      return;
  }
  throw ExprError("expr: unknown node kind");
}

struct Token {
  std::string text;
  int col = 0;  // 1-based byte offset
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      toks.push_back({std::string(1, c), static_cast<int>(i + 1)});
      ++i;
      continue;
    }
    size_t j = i;
    while (j < s.size() && s[j] != '(' && s[j] != ')' &&
           !std::isspace(static_cast<unsigned char>(s[j])))
      ++j;
    toks.push_back({s.substr(i, j - i), static_cast<int>(i + 1)});
    i = j;
  }
  return toks;
}

long long parse_ll(const std::string& s, int col) {
  if (s.empty()) throw ParseError("expr: empty integer", 1, col);
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("expr: bad integer '" + s + "'", 1, col);
  }
  if (pos != s.size())
    throw ParseError("expr: bad integer '" + s + "'", 1, col);
  return v;
}

bool looks_numeric(const std::string& t) {
  if (t.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(t[0]))) return true;
  return t.size() > 1 && t[0] == '-' &&
         std::isdigit(static_cast<unsigned char>(t[1]));
}

Expr parse_rational_token(const std::string& t, int col) {
  size_t slash = t.find('/');
  if (slash == std::string::npos) return make_rational(Rational(parse_ll(t, col)));
  long long num = parse_ll(t.substr(0, slash), col);
  long long den = parse_ll(t.substr(slash + 1), col);
  if (den == 0) throw ParseError("expr: zero denominator", 1, col);
  return make_rational(Rational(num, den));
}

std::vector<std::string> split_colons(const std::string& t) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t stop = t.find(':', start);
    if (stop == std::string::npos) {
      parts.push_back(t.substr(start));
      return parts;
    }
    parts.push_back(t.substr(start, stop - start));
    start = stop + 1;
  }
}

MultiIndex parse_multi_index(const std::string& t, int col) {
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw ParseError("expr: bad multi-index '" + t + "'", 1, col);
  std::string body = t.substr(1, t.size() - 2);
  std::vector<int> entries;
  size_t start = 0;
  while (start < body.size()) {
    size_t stop = body.find(',', start);
    if (stop == std::string::npos) stop = body.size();
    entries.push_back(
        static_cast<int>(parse_ll(body.substr(start, stop - start), col)));
    start = stop + 1;
  }
  try {
    return MultiIndex(entries);
  } catch (const ExprError& e) {
    throw ParseError(e.what(), 1, col);
  }
}

Expr parse_symbol_token(const std::string& t, int col) {
  std::vector<std::string> parts = split_colons(t);
  const std::string& head = parts[0];
  auto need = [&](size_t count) {
    if (parts.size() != count)
      throw ParseError("expr: bad symbol '" + t + "'", 1, col);
  };
  if (head == "x") {
    need(2);
    return indep_var(static_cast<int>(parse_ll(parts[1], col)));
  }
  if (head == "u") {
    need(3);
    return jet_var(static_cast<int>(parse_ll(parts[1], col)),
                   parse_multi_index(parts[2], col));
  }
  if (head == "p") {
    need(4);
    return mom_var(static_cast<int>(parse_ll(parts[1], col)),
                   parse_multi_index(parts[2], col),
                   static_cast<int>(parse_ll(parts[3], col)));
  }
  if (head == "du") {
    need(4);
    return formal_deriv(jet_var(static_cast<int>(parse_ll(parts[1], col)),
                                parse_multi_index(parts[2], col)),
                        static_cast<int>(parse_ll(parts[3], col)));
  }
  if (head == "dp") {
    need(5);
    return formal_deriv(mom_var(static_cast<int>(parse_ll(parts[1], col)),
                                parse_multi_index(parts[2], col),
                                static_cast<int>(parse_ll(parts[3], col))),
                        static_cast<int>(parse_ll(parts[4], col)));
  }
  throw ParseError("expr: unknown symbol '" + t + "'", 1, col);
}

struct SexprParser {
  const std::vector<Token>& toks;
  size_t pos = 0;

  const Token& peek() const {
    if (pos >= toks.size())
      throw ParseError("expr: unexpected end of expression", 1,
                       toks.empty() ? 1 : toks.back().col);
    return toks[pos];
  }
  Token next() {
    const Token& t = peek();
    ++pos;
    return t;
  }

  Expr parse() {
    Token t = next();
    if (t.text == ")")
      throw ParseError("expr: unexpected ')'", 1, t.col);
    if (t.text != "(") {
      if (looks_numeric(t.text)) return parse_rational_token(t.text, t.col);
      return parse_symbol_token(t.text, t.col);
    }
    Token head = next();
    std::vector<Expr> args;
    while (peek().text != ")") args.push_back(parse());
    next();  // ')'
    if (head.text == "+") {
      if (args.empty())
        throw ParseError("expr: '+' needs at least one argument", 1, head.col);
      return sum_of(args);
    }
    if (head.text == "*") {
      if (args.empty())
        throw ParseError("expr: '*' needs at least one argument", 1, head.col);
      return product_of(args);
    }
    if (head.text == "neg") {
      if (args.size() != 1)
        throw ParseError("expr: 'neg' takes one argument", 1, head.col);
      return neg(args[0]);
    }
    if (head.text == "^") {
      if (args.size() != 2 || args[1]->kind != NodeKind::Rational ||
          args[1]->value.den() != 1)
        throw ParseError("expr: '^' takes a base and an integer exponent", 1,
                         head.col);
      return pow_expr(args[0], static_cast<int>(args[1]->value.num()));
    }
    for (Func f : {Func::Sin, Func::Cos, Func::Exp, Func::Log}) {
      if (head.text == func_name(f)) {
        if (args.size() != 1)
          throw ParseError("expr: '" + head.text + "' takes one argument", 1,
                           head.col);
        return apply_fn(f, args[0]);
      }
    }
    throw ParseError("expr: unknown operator '" + head.text + "'", 1, head.col);
  }
};

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::string out;
  emit(normalize(e), out);
  return out;
}

Expr from_sexpr(const std::string& text) {
  std::vector<Token> toks = tokenize(text);
  if (toks.empty()) throw ParseError("expr: empty expression", 1, 1);
  SexprParser p{toks};
  Expr e = p.parse();
  if (p.pos != toks.size())
    throw ParseError("expr: trailing input after expression", 1,
                     toks[p.pos].col);
  return e;
}

Label label_from_string(const std::string& text) {
  auto fail = [&]() -> ParseError {
    return ParseError("expr: bad equation label '" + text + "'", 1, 1);
  };
  size_t open = text.find('(');
  if (open == std::string::npos || text.back() != ')') throw fail();
  std::string name = text.substr(0, open);
  std::string body = text.substr(open + 1, text.size() - open - 2);

  std::vector<std::string> args;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || (body[i] == ',' && depth == 0)) {
      args.push_back(body.substr(start, i - start));
      start = i + 1;
    } else if (body[i] == '[') {
      ++depth;
    } else if (body[i] == ']') {
      --depth;
    }
  }
  if (args.empty() || args[0].empty()) throw fail();
  int alpha = static_cast<int>(parse_ll(args[0], 1));

  auto index_arg = [&](size_t pos) {
    if (args.size() <= pos) throw fail();
    return parse_multi_index(args[pos], 1);
  };
  auto dir_arg = [&](size_t pos) {
    if (args.size() <= pos) throw fail();
    return static_cast<int>(parse_ll(args[pos], 1));
  };

  if (name == "ELKth") {
    if (args.size() != 1) throw fail();
    return label_elkth(alpha);
  }
  if (name == "ELH-u") {
    if (args.size() != 2) throw fail();
    return label_elh_u(alpha, index_arg(1));
  }
  if (name == "ELH-p") {
    if (args.size() != 3) throw fail();
    return label_elh_p(alpha, index_arg(1), dir_arg(2));
  }
  if (name == "DW-u") {
    if (args.size() != 3) throw fail();
    return label_dw_u(alpha, index_arg(1), dir_arg(2));
  }
  if (name == "DW-p") {
    if (args.size() != 2) throw fail();
    return label_dw_p(alpha, index_arg(1));
  }
  if (name == "DW-algebraic") {
    if (args.size() != 2) throw fail();
    return label_dw_alg(alpha, index_arg(1));
  }
  throw fail();
}

nlohmann::ordered_json system_to_json(const EquationSystem& sys) {
  nlohmann::ordered_json j;
  j["signature"] = {{"n", sys.sig.n}, {"m", sys.sig.m}, {"k", sys.sig.k}};
  j["equations"] = nlohmann::ordered_json::array();
  for (const Equation& eq : sys.equations)
    j["equations"].push_back(
        {{"label", eq.label.str()}, {"expr", to_sexpr(eq.residual)}});
  return j;
}

EquationSystem system_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("signature") || !j.contains("equations"))
    throw ParseError("expr: system JSON needs 'signature' and 'equations'", 1, 1);
  const auto& s = j.at("signature");
  BundleSignature sig(s.at("n").get<int>(), s.at("m").get<int>(),
                      s.at("k").get<int>());
  EquationSystem sys{sig, {}};
  for (const auto& entry : j.at("equations")) {
    Equation eq;
    eq.label = label_from_string(entry.at("label").get<std::string>());
    eq.residual = from_sexpr(entry.at("expr").get<std::string>());
    sys.equations.push_back(std::move(eq));
  }
  return sys;
}

}  // namespace jetlag
