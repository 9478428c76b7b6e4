#include "jetlag/lagfile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace jetlag {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool is_function_name(const std::string& s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "log";
}

struct RawEntry {
  std::string value;
  int line = 0;
  int col = 0;  // start of value on its line, 1-based
};

enum class Tok { Num, Ident, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Rational value;  // Num
  int line = 0;
  int col = 0;
};

// Tokenizer for the lagrangian value. Numbers are exact: "0.001" becomes
// 1/1000, never a binary double.
class Lexer {
 public:
  Lexer(const std::string& src, int line, int base_col)
      : src_(src), line_(line), base_col_(base_col) {
    advance();
  }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = base_col_ + static_cast<int>(pos_);
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (is_ident_start(c)) {
      size_t j = pos_;
      while (j < src_.size() && is_ident_char(src_[j])) ++j;
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(pos_, j - pos_);
      pos_ = j;
      return;
    }
    static const std::string punct = "+-*/^()[],";
    if (punct.find(c) != std::string::npos) {
      tok_.kind = Tok::Punct;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw ParseError("cli: unexpected character '" + std::string(1, c) + "'",
                     line_, tok_.col);
  }

  void lex_number() {
    size_t j = pos_;
    std::string digits;
    int frac = 0;
    bool seen_dot = false;
    while (j < src_.size()) {
      char c = src_[j];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        if (seen_dot) ++frac;
        ++j;
      } else if (c == '.' && !seen_dot) {
        seen_dot = true;
        ++j;
      } else {
        break;
      }
    }
    tok_.kind = Tok::Num;
    tok_.text = src_.substr(pos_, j - pos_);
    try {
      Rational v(std::stoll(digits));
      if (frac > 0) v = v / Rational(10).pow(frac);
      tok_.value = v;
    } catch (const std::exception&) {
      throw ParseError("cli: number literal too large", line_, tok_.col);
    }
    pos_ = j;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_;
  int base_col_;
  Token tok_;
};

// Recursive-descent parser for density expressions. Precedence, loosest to
// tightest: +- , */ , unary minus, ^.
class DensityParser {
 public:
  DensityParser(Lexer& lex, const std::vector<std::string>& indep,
                const std::vector<std::string>& dep)
      : lex_(lex), indep_(indep), dep_(dep) {}

  Expr parse() {
    Expr e = expression();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError("cli: unexpected '" + t.text + "'", t.line, t.col);
    return e;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError("cli: " + msg, t.line, t.col);
  }

  bool punct(const char* p) {
    const Token& t = lex_.peek();
    return t.kind == Tok::Punct && t.text == p;
  }

  Token expect_punct(const char* p, const std::string& what) {
    if (!punct(p)) fail(lex_.peek(), "expected '" + std::string(p) + "' " + what);
    return lex_.take();
  }

  template <typename F>
  Expr combine(const Token& op, F&& f) {
    try {
      return f();
    } catch (const ExprError& e) {
      throw ParseError(std::string("cli: ") + e.what(), op.line, op.col);
    }
  }

  Expr expression() {
    Expr e = term();
    while (punct("+") || punct("-")) {
      Token op = lex_.take();
      Expr rhs = term();
      e = combine(op, [&] { return op.text == "+" ? add(e, rhs) : sub(e, rhs); });
    }
    return e;
  }

  Expr term() {
    Expr e = unary();
    while (punct("*") || punct("/")) {
      Token op = lex_.take();
      Expr rhs = unary();
      e = combine(op, [&] { return op.text == "*" ? mul(e, rhs) : div(e, rhs); });
    }
    return e;
  }

  Expr unary() {
    if (punct("-")) {
      Token op = lex_.take();
      Expr e = unary();
      return combine(op, [&] { return neg(e); });
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    if (punct("^")) {
      Token op = lex_.take();
      int sign = 1;
      if (punct("-")) {
        lex_.take();
        sign = -1;
      }
      const Token& t = lex_.peek();
      if (t.kind != Tok::Num || t.value.den() != 1)
        fail(t, "exponent must be an integer");
      Token num = lex_.take();
      long long ex = sign * num.value.num();
      if (ex < -64 || ex > 64) fail(num, "exponent out of range");
      return combine(op, [&] { return pow_expr(e, static_cast<int>(ex)); });
    }
    return e;
  }

  Expr primary() {
    Token t = lex_.take();
    if (t.kind == Tok::Num) return make_rational(t.value);
    if (t.kind == Tok::Punct && t.text == "(") {
      Expr e = expression();
      expect_punct(")", "to close the parenthesis");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t, "expected a name, number, or '('");

    if (is_function_name(t.text)) {
      expect_punct("(", "after the function name");
      Expr arg = expression();
      expect_punct(")", "to close the function argument");
      Func f = t.text == "sin"   ? Func::Sin
               : t.text == "cos" ? Func::Cos
               : t.text == "exp" ? Func::Exp
                                 : Func::Log;
      return apply_fn(f, arg);
    }

    int indep_id = lookup(indep_, t.text);
    int dep_id = lookup(dep_, t.text);
    if (indep_id == 0 && dep_id == 0) fail(t, "unknown name '" + t.text + "'");

    if (!punct("[")) {
      if (indep_id) return indep_var(indep_id);
      return jet_var(dep_id, MultiIndex{});
    }
    if (indep_id)
      fail(t, "only dependent variables take derivative subscripts");
    lex_.take();  // '['
    std::vector<int> entries;
    while (true) {
      const Token& s = lex_.peek();
      if (s.kind != Tok::Ident) fail(s, "expected an independent-variable name");
      int axis = lookup(indep_, s.text);
      if (axis == 0)
        fail(s, "'" + s.text + "' is not an independent variable");
      entries.push_back(axis);
      lex_.take();
      if (punct(",")) {
        lex_.take();
        continue;
      }
      expect_punct("]", "to close the derivative subscript");
      break;
    }
    return jet_var(dep_id, MultiIndex(entries));
  }

  static int lookup(const std::vector<std::string>& names,
                    const std::string& s) {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == s) return static_cast<int>(i + 1);
    return 0;
  }

  Lexer& lex_;
  const std::vector<std::string>& indep_;
  const std::vector<std::string>& dep_;
};

std::vector<std::string> parse_name_list(const RawEntry& entry,
                                         const char* key) {
  std::vector<std::string> names;
  std::stringstream ss(entry.value);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::string name = trim(piece);
    if (name.empty())
      throw ParseError(std::string("cli: empty name in '") + key + "'",
                       entry.line, entry.col);
    if (!is_ident_start(name[0]) ||
        !std::all_of(name.begin(), name.end(), is_ident_char))
      throw ParseError("cli: invalid name '" + name + "'", entry.line,
                       entry.col);
    if (is_function_name(name))
      throw ParseError("cli: name '" + name + "' collides with a built-in function",
                       entry.line, entry.col);
    names.push_back(name);
  }
  if (names.empty())
    throw ParseError(std::string("cli: '") + key + "' declares no names",
                     entry.line, entry.col);
  return names;
}

double parse_number(const RawEntry& entry, const std::string& text,
                    const char* what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || (end && *end) || !std::isfinite(v))
    throw ParseError(std::string("cli: ") + what + " is not a finite number: '" +
                         text + "'",
                     entry.line, entry.col);
  return v;
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text) {
  static const char* keys[] = {"independent", "dependent", "lagrangian",
                               "initial",     "t_end",     "dt"};
  std::map<std::string, RawEntry> entries;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("cli: expected 'key: value'", lineno, 1);
    std::string key = trim(line.substr(0, colon));
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known)
      throw ParseError("cli: unknown key '" + key + "'", lineno, 1);
    if (entries.count(key))
      throw ParseError("cli: duplicate key '" + key + "'", lineno, 1);
    size_t vstart = colon + 1;
    while (vstart < line.size() &&
           std::isspace(static_cast<unsigned char>(line[vstart])))
      ++vstart;
    entries[key] = RawEntry{trim(line.substr(vstart)), lineno,
                            static_cast<int>(vstart + 1)};
  }

  for (const char* required : {"independent", "dependent", "lagrangian"})
    if (!entries.count(required))
      throw ParseError(std::string("cli: missing '") + required + "' line", 1, 1);

  ProblemFile pf;
  pf.independent = parse_name_list(entries.at("independent"), "independent");
  pf.dependent = parse_name_list(entries.at("dependent"), "dependent");

  {
    std::vector<std::string> all = pf.independent;
    all.insert(all.end(), pf.dependent.begin(), pf.dependent.end());
    std::sort(all.begin(), all.end());
    auto dup = std::adjacent_find(all.begin(), all.end());
    if (dup != all.end())
      throw ParseError("cli: name '" + *dup + "' declared twice", 1, 1);
  }
  if (pf.independent.size() > 3)
    throw ParseError("cli: independent dimension capped at n <= 3",
                     entries.at("independent").line, 1);
  if (pf.dependent.size() > 4)
    throw ParseError("cli: dependent dimension capped at m <= 4",
                     entries.at("dependent").line, 1);

  const RawEntry& lag = entries.at("lagrangian");
  Lexer lex(lag.value, lag.line, lag.col);
  DensityParser parser(lex, pf.independent, pf.dependent);
  pf.lagrangian = parser.parse();

  int k = max_jet_order(pf.lagrangian);
  if (k == 0)
    throw ParseError("cli: order-0 density has trivial dynamics", lag.line,
                     lag.col);
  if (k > 4)
    throw ParseError("cli: differential order capped at k <= 4", lag.line,
                     lag.col);
  pf.sig = BundleSignature(static_cast<int>(pf.independent.size()),
                           static_cast<int>(pf.dependent.size()), k);

  if (entries.count("initial")) {
    const RawEntry& init = entries.at("initial");
    std::stringstream items(init.value);
    std::string item;
    while (std::getline(items, item, ',')) {
      std::string piece = trim(item);
      if (piece.empty())
        throw ParseError("cli: empty entry in 'initial'", init.line, init.col);
      size_t eq = piece.find('=');
      if (eq == std::string::npos)
        throw ParseError("cli: 'initial' entries are name=value", init.line,
                         init.col);
      std::string name = trim(piece.substr(0, eq));
      std::string value = trim(piece.substr(eq + 1));
      if (name.empty())
        throw ParseError("cli: 'initial' entries are name=value", init.line,
                         init.col);
      for (const auto& [existing, unused] : pf.initial)
        if (existing == name)
          throw ParseError("cli: duplicate initial value for '" + name + "'",
                           init.line, init.col);
      pf.initial.emplace_back(
          name, parse_number(init, value, "initial value"));
    }
  }

  if (entries.count("t_end")) {
    const RawEntry& e = entries.at("t_end");
    pf.t_end = parse_number(e, e.value, "t_end");
    pf.has_t_end = true;
    if (pf.t_end <= 0)
      throw ParseError("cli: t_end must be positive", e.line, e.col);
  }
  if (entries.count("dt")) {
    const RawEntry& e = entries.at("dt");
    pf.dt = parse_number(e, e.value, "dt");
    pf.has_dt = true;
    if (pf.dt <= 0)
      throw ParseError("cli: dt must be positive", e.line, e.col);
  }

  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cli: cannot read problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

}  // namespace jetlag
