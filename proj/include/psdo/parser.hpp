#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "laurent.hpp"
#include "multi_index.hpp"
#include "operator.hpp"
#include "rational.hpp"
#include "time_poly.hpp"
#include "wave.hpp"

namespace psdo {

// Grammar:
//   expr    := term (('+'|'-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | power
//   power   := postfix ('^' ['-'] int)*          right-associative
//   postfix := primary | '(' expr ')' ('+'|'-')   projection when the sign is glued to ')'
//   primary := int | int '/' int | d<i> | z<i> | s<i> | s'<i> | t[...] | ident | ident '_{' dirs '}'
//            | 'O(' d-monomial ')' | '(' expr ')'
// dirs is a run of t[...] and registered aliases (x, y, ...).

struct Expr {
  enum class Kind { Number, Var, Symbol, Time, Sum, Product, Power, Neg, Project, Tail };
  Kind kind = Kind::Number;
  std::size_t pos = 0;
  Rational number;
  std::string group;  // Var: "d", "z", "s", "s'"
  std::size_t index = 0;
  JetVariable jet;
  MultiIndex time;
  int exponent = 0;  // Power; Project: +1 / -1
  std::vector<int> tail;  // Tail: exponent per component, kUnbounded if absent
  std::vector<std::shared_ptr<const Expr>> args;
};

using ExprPtr = std::shared_ptr<const Expr>;

struct ParseContext {
  std::size_t n = 2;
  JetStyle style = JetStyle::standard(2);
  std::map<std::string, ExprPtr> defs;
  std::optional<Window> window;  // used where a product or inverse needs truncation
  int degree = 4;                // cap for series inverses

  explicit ParseContext(std::size_t dim = 2) : n(dim), style(JetStyle::standard(dim)) {}
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const ParseContext& ctx) : s_(text), ctx_(ctx) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip();
    if (p_ != s_.size()) fail(std::string("unexpected '") + s_[p_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, p_); }

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  char peek() {
    skip();
    return p_ < s_.size() ? s_[p_] : '\0';
  }

  static ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
  static ExprPtr binary(Expr::Kind k, std::size_t pos, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = k;
    e.pos = pos;
    e.args = {std::move(a), std::move(b)};
    return node(std::move(e));
  }

  ExprPtr expr() {
    ExprPtr left = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return left;
      const std::size_t at = p_++;
      ExprPtr right = term();
      if (c == '-') {
        Expr neg;
        neg.kind = Expr::Kind::Neg;
        neg.pos = at;
        neg.args = {right};
        right = node(std::move(neg));
      }
      left = binary(Expr::Kind::Sum, at, left, right);
    }
  }

  ExprPtr term() {
    ExprPtr left = unary();
    while (peek() == '*') {
      const std::size_t at = p_++;
      left = binary(Expr::Kind::Product, at, left, unary());
    }
    return left;
  }

  ExprPtr unary() {
    if (peek() == '-') {
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.pos = p_++;
      e.args = {unary()};
      return node(std::move(e));
    }
    return power();
  }

  int integer(bool allow_sign) {
    skip();
    const std::size_t start = p_;
    bool neg = false;
    if (allow_sign && p_ < s_.size() && (s_[p_] == '-' || s_[p_] == '+')) {
      neg = s_[p_] == '-';
      ++p_;
      skip();
    }
    if (p_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[p_]))) fail("expected an integer");
    long v = 0;
    while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) {
      v = v * 10 + (s_[p_++] - '0');
      if (v > 1000000) {
        p_ = start;
        fail("integer too large");
      }
    }
    return static_cast<int>(neg ? -v : v);
  }

  ExprPtr power() {
    ExprPtr base = postfix();
    if (peek() != '^') return base;
    // right-associative chain of integer exponents
    std::vector<std::pair<std::size_t, int>> chain;
    while (peek() == '^') {
      const std::size_t at = p_++;
      chain.emplace_back(at, integer(true));
    }
    long k = chain.back().second;
    for (std::size_t i = chain.size() - 1; i-- > 0;) {
      const int b = chain[i].second;
      if (k < 0 || k > 64) fail("exponent tower too large");
      long v = 1;
      for (long j = 0; j < k; ++j) {
        v *= b;
        if (v > 1000000 || v < -1000000) fail("exponent tower too large");
      }
      k = v;
    }
    Expr e;
    e.kind = Expr::Kind::Power;
    e.pos = chain.front().first;
    e.exponent = static_cast<int>(k);
    e.args = {base};
    return node(std::move(e));
  }

  ExprPtr postfix() {
    skip();
    if (p_ < s_.size() && s_[p_] == '(') {
      const std::size_t at = p_++;
      ExprPtr inner = expr();
      expect(')');
      // glued sign followed by something that cannot start a term
      if (p_ < s_.size() && (s_[p_] == '+' || s_[p_] == '-')) {
        std::size_t q = p_ + 1;
        while (q < s_.size() && std::isspace(static_cast<unsigned char>(s_[q]))) ++q;
        if (q == s_.size() || s_[q] == ')' || s_[q] == '*' || s_[q] == '^' || s_[q] == '+' || s_[q] == '-') {
          Expr e;
          e.kind = Expr::Kind::Project;
          e.pos = at;
          e.exponent = s_[p_] == '+' ? 1 : -1;
          e.args = {inner};
          ++p_;
          return node(std::move(e));
        }
      }
      return inner;
    }
    return primary();
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  static bool is_indexed(const std::string& id, const std::string& prefix, std::size_t* index) {
    if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return false;
    std::size_t v = 0;
    for (std::size_t i = prefix.size(); i < id.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
      v = v * 10 + static_cast<std::size_t>(id[i] - '0');
      if (v > 1000) return false;
    }
    *index = v;
    return true;
  }

  MultiIndex time_index() {
    // at "t["
    const std::size_t at = p_;
    p_ += 2;
    std::vector<int> v{integer(true)};
    while (eat(',')) v.push_back(integer(true));
    expect(']');
    if (v.size() != ctx_.n) {
      p_ = at;
      fail("time index has " + std::to_string(v.size()) + " components, expected " + std::to_string(ctx_.n));
    }
    MultiIndex m(std::move(v));
    if (!mi_in_zplus(m)) {
      p_ = at;
      fail("time index t[" + m.to_string() + "] is not a nonzero nonnegative index");
    }
    return m;
  }

  bool at_time() const { return p_ + 1 < s_.size() && s_[p_] == 't' && s_[p_ + 1] == '['; }

  ExprPtr primary() {
    skip();
    const std::size_t at = p_;
    if (p_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[p_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const int num = integer(false);
      Rational q(num);
      if (peek() == '/') {
        ++p_;
        skip();
        const int den = integer(false);
        if (den == 0) {
          p_ = at;
          fail("zero denominator");
        }
        q = Rational(num, den);
        q.canonicalize();
      }
      Expr e;
      e.kind = Expr::Kind::Number;
      e.pos = at;
      e.number = q;
      return node(std::move(e));
    }
    if (at_time()) {
      Expr e;
      e.kind = Expr::Kind::Time;
      e.pos = at;
      e.time = time_index();
      return node(std::move(e));
    }
    if (c == 'O' && p_ + 1 < s_.size() && s_[p_ + 1] == '(') return tail();
    if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");

    if (c == 's' && p_ + 1 < s_.size() && s_[p_ + 1] == '\'') {
      p_ += 2;
      std::string digits;
      while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) digits += s_[p_++];
      if (digits.empty()) fail("expected an index after s'");
      return var("s'", std::stoul(digits), at);
    }

    std::string id;
    while (p_ < s_.size() && ident_char(s_[p_])) {
      if (s_[p_] == '_' && p_ + 1 < s_.size() && s_[p_ + 1] == '{') break;
      id += s_[p_++];
    }
    std::size_t index = 0;
    for (const char* g : {"d", "z", "s"})
      if (is_indexed(id, g, &index)) return var(g, index, at);

    if (auto it = ctx_.defs.find(id); it != ctx_.defs.end()) {
      if (p_ < s_.size() && s_[p_] == '_') fail("cannot take derivatives of the definition " + id);
      return it->second;
    }

    JetVariable::Profile prof;
    if (p_ + 1 < s_.size() && s_[p_] == '_' && s_[p_ + 1] == '{') {
      p_ += 2;
      while (true) {
        skip();
        if (p_ >= s_.size()) fail("unterminated derivative suffix");
        if (s_[p_] == '}') {
          ++p_;
          break;
        }
        if (at_time()) {
          prof.emplace_back(time_index(), 1);
          continue;
        }
        bool matched = false;
        std::size_t best = 0;
        MultiIndex dir;
        for (const auto& [d, name] : ctx_.style.aliases)
          if (name.size() > best && s_.compare(p_, name.size(), name) == 0) {
            best = name.size();
            dir = d;
            matched = true;
          }
        if (!matched) fail("unknown derivative direction");
        p_ += best;
        prof.emplace_back(dir, 1);
      }
      if (prof.empty()) fail("empty derivative suffix");
    }
    Expr e;
    e.kind = Expr::Kind::Symbol;
    e.pos = at;
    e.jet = JetVariable(id, std::move(prof));
    return node(std::move(e));
  }

  ExprPtr var(const std::string& g, std::size_t index, std::size_t at) {
    if (index < 1 || index > ctx_.n) {
      p_ = at;
      fail(g + std::to_string(index) + " is out of range for n = " + std::to_string(ctx_.n));
    }
    Expr e;
    e.kind = Expr::Kind::Var;
    e.pos = at;
    e.group = g;
    e.index = index - 1;
    return node(std::move(e));
  }

  // O(d1^a*d2^b): the first unknown layer in each named component
  ExprPtr tail() {
    const std::size_t at = p_;
    p_ += 2;
    std::vector<int> t(ctx_.n, kUnbounded);
    do {
      skip();
      const std::size_t here = p_;
      std::string id;
      while (p_ < s_.size() && ident_char(s_[p_])) id += s_[p_++];
      std::size_t index = 0;
      if (!is_indexed(id, "d", &index) || index < 1 || index > ctx_.n) {
        p_ = here;
        fail("O(...) takes a product of powers of d1..d" + std::to_string(ctx_.n));
      }
      int k = 1;
      if (eat('^')) k = integer(true);
      if (t[index - 1] != kUnbounded) {
        p_ = here;
        fail("repeated component in O(...)");
      }
      t[index - 1] = k;
    } while (eat('*'));
    expect(')');
    Expr e;
    e.kind = Expr::Kind::Tail;
    e.pos = at;
    e.tail = std::move(t);
    return node(std::move(e));
  }

  std::string_view s_;
  const ParseContext& ctx_;
  std::size_t p_ = 0;
};

}  // namespace detail

inline ExprPtr parse(std::string_view text, const ParseContext& ctx) { return detail::Parser(text, ctx).parse(); }

/// Register `name = text`; later definitions may use earlier ones.
inline void define(ParseContext& ctx, const std::string& name, std::string_view text) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
    throw ParseError("bad definition name '" + name + "'", 0);
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') throw ParseError("bad definition name '" + name + "'", 0);
  ctx.defs[name] = parse(text, ctx);
}

namespace detail {

[[noreturn]] inline void eval_fail(const Expr& e, const std::string& what) { throw ParseError(what, e.pos); }

inline DiffPoly eval_diffpoly(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number: return DiffPoly(e.number);
    case K::Symbol: return jet(e.jet);
    case K::Sum: return eval_diffpoly(*e.args[0]) + eval_diffpoly(*e.args[1]);
    case K::Product: return eval_diffpoly(*e.args[0]) * eval_diffpoly(*e.args[1]);
    case K::Neg: return -eval_diffpoly(*e.args[0]);
    case K::Power:
      if (e.exponent < 0) eval_fail(e, "negative power in a differential polynomial");
      return eval_diffpoly(*e.args[0]).pow(e.exponent);
    default: eval_fail(e, "not allowed in a differential polynomial");
  }
}

inline TimePolynomial eval_time(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number: return TimePolynomial(e.number);
    case K::Time: return time_var(e.time);
    case K::Sum: return eval_time(*e.args[0]) + eval_time(*e.args[1]);
    case K::Product: return eval_time(*e.args[0]) * eval_time(*e.args[1]);
    case K::Neg: return -eval_time(*e.args[0]);
    case K::Power:
      if (e.exponent < 0) eval_fail(e, "negative power in a polynomial in t");
      return eval_time(*e.args[0]).pow(e.exponent);
    default: eval_fail(e, "not allowed in a polynomial in t");
  }
}

inline void collect_summands(const ExprPtr& e, std::vector<const Expr*>& out) {
  if (e->kind == Expr::Kind::Sum) {
    collect_summands(e->args[0], out);
    collect_summands(e->args[1], out);
  } else {
    out.push_back(e.get());
  }
}

inline Window tail_window(const Expr& e) {
  Window w(e.tail);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (is_finite(w[i])) w[i] += 1;
  return w;
}

/// `want` is the truncation in force: an O(...) summand sets it for its siblings.
inline PsdOp eval_operator(const Expr& e, const ParseContext& ctx, const std::optional<Window>& want) {
  using K = Expr::Kind;
  const std::size_t n = ctx.n;
  auto mul = [&](const PsdOp& a, const PsdOp& b) {
    try {
      return ps_mul(a, b);
    } catch (const WindowError&) {
      if (!want) throw;
      return ps_mul(a, b, want);
    }
  };
  switch (e.kind) {
    case K::Number: return PsdOp::constant(n, DiffPoly(e.number));
    case K::Symbol: return PsdOp::constant(n, jet(e.jet));
    case K::Var:
      if (e.group != "d") eval_fail(e, "variable " + e.group + " not allowed in an operator");
      return PsdOp::partial(n, e.index);
    case K::Tail: return PsdOp::from_terms(n, {}, tail_window(e));
    case K::Sum: {
      std::vector<const Expr*> parts;
      collect_summands(e.args[0], parts);
      collect_summands(e.args[1], parts);
      std::optional<Window> inner = want;
      for (const Expr* p : parts)
        if (p->kind == K::Tail) inner = inner ? meet(*inner, tail_window(*p)) : tail_window(*p);
      PsdOp acc = PsdOp::zero(n);
      for (const Expr* p : parts) acc = ps_add(acc, eval_operator(*p, ctx, inner));
      if (inner && inner != want) acc = acc.truncated(*inner);
      return acc;
    }
    case K::Neg: return ps_neg(eval_operator(*e.args[0], ctx, want));
    case K::Project: {
      PsdOp a = eval_operator(*e.args[0], ctx, want);
      return e.exponent > 0 ? ps_plus(a) : ps_minus(a);
    }
    case K::Product: return mul(eval_operator(*e.args[0], ctx, want), eval_operator(*e.args[1], ctx, want));
    case K::Power: {
      const Expr& base = *e.args[0];
      if (base.kind == K::Var && base.group == "d") return PsdOp::partial(n, base.index, e.exponent);
      PsdOp a = eval_operator(base, ctx, want);
      if (e.exponent < 0) a = ps_inverse(a, want);
      PsdOp acc = PsdOp::one(n);
      for (int i = 0; i < std::abs(e.exponent); ++i) acc = mul(acc, a);
      return acc;
    }
    case K::Time: eval_fail(e, "time variables are not allowed in an operator");
  }
  eval_fail(e, "unsupported expression");
}

template <class C, class Coef>
LaurentSeries<C> eval_series(const Expr& e, const ParseContext& ctx, const std::vector<std::string>& groups,
                             Coef&& coef) {
  using K = Expr::Kind;
  using S = LaurentSeries<C>;
  const std::size_t n = ctx.n;
  auto recurse = [&](const Expr& x) { return eval_series<C>(x, ctx, groups, coef); };
  switch (e.kind) {
    case K::Number: return S::constant(n, groups, C(e.number));
    case K::Symbol:
    case K::Time: return S::constant(n, groups, coef(e));
    case K::Var: {
      auto it = std::find(groups.begin(), groups.end(), e.group);
      if (it == groups.end()) eval_fail(e, "variable " + e.group + std::to_string(e.index + 1) + " not allowed here");
      std::vector<int> v(n * groups.size(), 0);
      v[static_cast<std::size_t>(it - groups.begin()) * n + e.index] = 1;
      return S::monomial(n, groups, MultiIndex(std::move(v)), C(1));
    }
    case K::Sum: return recurse(*e.args[0]) + recurse(*e.args[1]);
    case K::Product: return recurse(*e.args[0]) * recurse(*e.args[1]);
    case K::Neg: return -recurse(*e.args[0]);
    case K::Power: {
      S base = recurse(*e.args[0]);
      if (base.terms().size() == 1 && base.terms().begin()->second == C(1)) {
        // monomial: exact power
        return S::monomial(n, groups, e.exponent * base.terms().begin()->first, C(1));
      }
      S acc = S::constant(n, groups, C(1));
      if (e.exponent < 0) {
        for (std::size_t g = 0; g < groups.size(); ++g) base = base.with_cap(g, ctx.degree);
        acc = acc.with_cap(0, ctx.degree);
        base = series_inverse(base);
      }
      for (int i = 0; i < std::abs(e.exponent); ++i) acc = acc * base;
      return acc;
    }
    default: eval_fail(e, "not allowed in a series");
  }
}

}  // namespace detail

inline DiffPoly parse_diffpoly(std::string_view text, const ParseContext& ctx) {
  return detail::eval_diffpoly(*parse(text, ctx));
}
inline TimePolynomial parse_time_polynomial(std::string_view text, const ParseContext& ctx) {
  return detail::eval_time(*parse(text, ctx));
}
inline PsdOp parse_operator(std::string_view text, const ParseContext& ctx) {
  return detail::eval_operator(*parse(text, ctx), ctx, ctx.window);
}

/// Series in the given groups with differential-polynomial coefficients.
inline ZSeries parse_series(std::string_view text, const ParseContext& ctx,
                            const std::vector<std::string>& groups = {"z"}) {
  return detail::eval_series<DiffPoly>(*parse(text, ctx), ctx, groups, [](const Expr& e) {
    if (e.kind != Expr::Kind::Symbol) detail::eval_fail(e, "time variables are not allowed in this series");
    return jet(e.jet);
  });
}

/// Multi-index written as "1,-2" or "(1,-2)".
inline MultiIndex parse_multi_index(std::string_view text, std::size_t n) {
  std::string s(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::vector<int> v;
  std::size_t p = 0;
  while (p <= s.size()) {
    std::size_t q = s.find(',', p);
    if (q == std::string::npos) q = s.size();
    std::string part = s.substr(p, q - p);
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(part, &used));
      while (used < part.size() && std::isspace(static_cast<unsigned char>(part[used]))) ++used;
      if (used != part.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad multi-index component '" + part + "'", p);
    }
    p = q + 1;
  }
  if (v.size() != n)
    throw ParseError("multi-index '" + std::string(text) + "' has " + std::to_string(v.size()) + " components, expected " +
                         std::to_string(n),
                     0);
  return MultiIndex(std::move(v));
}

/// Time index given either as "t[1,2]" or as "1,2".
inline MultiIndex parse_time_index(std::string_view text, std::size_t n) {
  std::string s(text);
  if (s.size() > 3 && s.compare(0, 2, "t[") == 0 && s.back() == ']') s = s.substr(2, s.size() - 3);
  MultiIndex m = parse_multi_index(s, n);
  if (!mi_in_zplus(m)) throw ParseError("t[" + m.to_string() + "] is not a time index", 0);
  return m;
}

/// "t[1]=3, t[2]=1/2"
inline std::map<MultiIndex, Rational> parse_point(std::string_view text, const ParseContext& ctx) {
  std::map<MultiIndex, Rational> out;
  std::string s(text);
  std::size_t p = 0;
  while (p < s.size()) {
    std::size_t eq = s.find('=', p);
    if (eq == std::string::npos) throw ParseError("expected t[...]=value", p);
    // an assignment ends at ';' or at a ',' that starts the next t[...]
    std::size_t end = eq + 1;
    for (; end < s.size(); ++end) {
      if (s[end] == ';') break;
      if (s[end] == ',') {
        std::size_t q = s.find_first_not_of(' ', end + 1);
        if (q != std::string::npos && s.compare(q, 2, "t[") == 0) break;
      }
    }
    std::string lhs = s.substr(p, eq - p);
    std::string rhs = s.substr(eq + 1, end - eq - 1);
    while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.front()))) lhs.erase(lhs.begin());
    while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back()))) lhs.pop_back();
    MultiIndex idx = parse_time_index(lhs, ctx.n);
    TimePolynomial v = parse_time_polynomial(rhs, ctx);
    if (!v.is_constant()) throw ParseError("point value must be a rational number", eq + 1);
    out[idx] = v.constant_term();
    p = end + 1;
  }
  return out;
}

}  // namespace psdo
