#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace psdo {

/// Power product of commuting variables; factors sorted by variable, powers > 0.
template <class Var>
class Monomial {
 public:
  using Factor = std::pair<Var, int>;

  Monomial() = default;
  explicit Monomial(const Var& v, int power = 1) {
    if (power > 0) factors_.emplace_back(v, power);
  }
  explicit Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) { normalize(); }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& f : factors_) d += f.second;
    return d;
  }
  int power_of(const Var& v) const {
    for (const auto& f : factors_)
      if (f.first == v) return f.second;
    return 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
      if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
        r.factors_.push_back(*i++);
      } else if (i == a.factors_.end() || j->first < i->first) {
        r.factors_.push_back(*j++);
      } else {
        r.factors_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return r;
  }

  /// Copy with the power of `v` lowered by one (v must occur).
  Monomial without_one(const Var& v) const {
    Monomial r;
    for (const auto& f : factors_) {
      if (f.first == v) {
        if (f.second > 1) r.factors_.emplace_back(f.first, f.second - 1);
      } else {
        r.factors_.push_back(f);
      }
    }
    return r;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

  /// Graded lexicographic: total degree first, then the sorted factor lists.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return a.factors_ <=> b.factors_;
  }

 private:
  void normalize() {
    std::sort(factors_.begin(), factors_.end(),
              [](const Factor& x, const Factor& y) { return x.first < y.first; });
    std::vector<Factor> merged;
    for (auto& f : factors_) {
      if (f.second == 0) continue;
      if (f.second < 0) throw DomainError("negative power in a polynomial monomial");
      if (!merged.empty() && merged.back().first == f.first)
        merged.back().second += f.second;
      else
        merged.push_back(std::move(f));
    }
    factors_ = std::move(merged);
  }

  std::vector<Factor> factors_;
};

/// Sparse polynomial with exact rational coefficients over variables of type
/// `Var` (anything totally ordered). Canonical: graded-lex sorted, no zero
/// coefficients, like monomials merged.
template <class Var>
class Polynomial {
 public:
  using Mono = Monomial<Var>;
  using TermMap = std::map<Mono, Rational>;

  Polynomial() = default;
  Polynomial(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (!psdo::is_zero(c)) terms_.emplace(Mono{}, c);
  }
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Polynomial(int c) : Polynomial(Rational(c)) {}   // NOLINT(google-explicit-constructor)

  static Polynomial variable(const Var& v, int power = 1) {
    Polynomial p;
    p.terms_.emplace(Mono(v, power), Rational(1));
    return p;
  }
  static Polynomial term(const Mono& m, const Rational& c) {
    Polynomial p;
    if (!psdo::is_zero(c)) p.terms_.emplace(m, c);
    return p;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  Rational constant_term() const {
    auto it = terms_.find(Mono{});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational coefficient(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  /// The bare variable when this is exactly 1*v.
  std::optional<Var> as_variable() const {
    if (terms_.size() != 1) return std::nullopt;
    const auto& [m, c] = *terms_.begin();
    if (c != 1 || m.factors().size() != 1 || m.factors()[0].second != 1) return std::nullopt;
    return m.factors()[0].first;
  }

  std::set<Var> variables() const {
    std::set<Var> out;
    for (const auto& [m, c] : terms_)
      for (const auto& f : m.factors()) out.insert(f.first);
    return out;
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  void add_term(const Mono& m, const Rational& c) {
    if (psdo::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (psdo::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial operator-() const {
    Polynomial r(*this);
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    if (a.is_zero() || b.is_zero()) return r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator*(const Rational& k, const Polynomial& p) {
    Polynomial r;
    if (psdo::is_zero(k)) return r;
    r.terms_ = p.terms_;
    for (auto& [m, c] : r.terms_) c *= k;
    return r;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw DomainError("negative power of a polynomial");
    Polynomial r(1);
    for (int i = 0; i < k; ++i) r *= *this;
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Ring substitution: every variable replaced by image(v) (nullopt keeps it).
  template <class F>
  Polynomial substitute(F&& image) const {
    Polynomial r;
    std::map<Var, std::optional<Polynomial>> cache;
    for (const auto& [m, c] : terms_) {
      Polynomial prod(c);
      for (const auto& [v, e] : m.factors()) {
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, image(v)).first;
        const Polynomial base = it->second ? *it->second : variable(v);
        prod *= base.pow(e);
      }
      r += prod;
    }
    return r;
  }

  /// Derivation determined by its values on variables: D(v) = image(v).
  template <class F>
  Polynomial derive(F&& image) const {
    Polynomial r;
    std::map<Var, Polynomial> cache;
    for (const auto& [m, c] : terms_) {
      for (const auto& [v, e] : m.factors()) {
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, image(v)).first;
        if (it->second.is_zero()) continue;
        r += (c * Rational(e)) * (term(m.without_one(v), Rational(1)) * it->second);
      }
    }
    return r;
  }

  /// Exact value under an assignment of every occurring variable.
  template <class F>
  Rational evaluate(F&& value) const {
    Rational sum = 0;
    for (const auto& [m, c] : terms_) {
      Rational prod = c;
      for (const auto& [v, e] : m.factors()) {
        const Rational x = value(v);
        for (int i = 0; i < e; ++i) prod *= x;
      }
      sum += prod;
    }
    return sum;
  }

  /// Text such as `3/2*a_{y}*c - b + 2`: higher degree first, constant last.
  template <class R>
  std::string render(R&& render_var) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    std::vector<const typename TermMap::value_type*> order;
    for (const auto& t : terms_) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(),
                     [](auto* x, auto* y) { return x->first.degree() > y->first.degree(); });
    for (const auto* t : order) {
      const auto& [m, c] = *t;
      Rational mag = abs(c);
      if (first) {
        if (sgn(c) < 0) out += "-";
      } else {
        out += sgn(c) < 0 ? " - " : " + ";
      }
      first = false;
      std::string body;
      for (const auto& [v, e] : m.factors()) {
        if (!body.empty()) body += "*";
        body += render_var(v);
        if (e != 1) body += "^" + std::to_string(e);
      }
      if (body.empty()) {
        out += mag.get_str();
      } else if (mag == 1) {
        out += body;
      } else {
        out += mag.get_str() + "*" + body;
      }
    }
    return out;
  }

 private:
  TermMap terms_;
};

template <class Var>
bool is_zero(const Polynomial<Var>& p) {
  return p.is_zero();
}

}  // namespace psdo
