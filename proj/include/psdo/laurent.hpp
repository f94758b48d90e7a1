#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "multi_index.hpp"
#include "polynomial.hpp"
#include "rational.hpp"
#include "window.hpp"

namespace psdo {

namespace detail {

inline bool coeff_is_zero(const Rational& r) { return sgn(r) == 0; }
template <class V>
bool coeff_is_zero(const Polynomial<V>& p) {
  return p.is_zero();
}

inline Rational scale(const Rational& k, const Rational& c) { return k * c; }
template <class V>
Polynomial<V> scale(const Rational& k, const Polynomial<V>& c) {
  return k * c;
}

}  // namespace detail

/// Truncated multivariate Laurent series in named variable groups (z, s, s', ...),
/// each an n-tuple of commuting indeterminates. Exponent vectors concatenate the
/// groups. Precision is tracked two ways:
///  - a box window with a declared upper bound, exactly as for operators;
///  - per group an optional cap T on the inverse total degree -sum(e_g): terms
///    beyond it are dropped, and products keep the smaller cap.
/// Caps are sound for series whose group-g support has non-positive total
/// degree (expansions in s^{-1}, z^{-1}), which is how they are used.
template <class C>
class LaurentSeries {
 public:
  using TermMap = std::map<MultiIndex, C>;

  LaurentSeries() = default;
  LaurentSeries(std::size_t n, std::vector<std::string> groups)
      : n_(n),
        groups_(std::move(groups)),
        window_(Window::exact(n * groups_.size())),
        bound_(empty_bound(n * groups_.size())),
        caps_(groups_.size()) {}

  static LaurentSeries constant(std::size_t n, std::vector<std::string> groups, const C& c) {
    LaurentSeries s(n, std::move(groups));
    s.add_term(MultiIndex::zero(s.width()), c);
    s.refresh_bound();
    return s;
  }
  static LaurentSeries monomial(std::size_t n, std::vector<std::string> groups, const MultiIndex& e, const C& c) {
    LaurentSeries s(n, std::move(groups));
    s.add_term(e, c);
    s.refresh_bound();
    return s;
  }

  std::size_t dimension() const { return n_; }
  const std::vector<std::string>& groups() const { return groups_; }
  std::size_t width() const { return n_ * groups_.size(); }
  const TermMap& terms() const { return terms_; }
  const Window& window() const { return window_; }
  const Bound& bound() const { return bound_; }
  const std::vector<std::optional<int>>& caps() const { return caps_; }
  bool is_zero() const { return terms_.empty(); }

  std::size_t group_index(const std::string& name) const {
    auto it = std::find(groups_.begin(), groups_.end(), name);
    if (it == groups_.end()) throw DomainError("series has no variable group '" + name + "'");
    return static_cast<std::size_t>(it - groups_.begin());
  }

  /// Exponents of group g inside a full exponent vector.
  MultiIndex group_part(const MultiIndex& e, std::size_t g) const {
    std::vector<int> v(e.begin() + static_cast<long>(g * n_), e.begin() + static_cast<long>((g + 1) * n_));
    return MultiIndex(std::move(v));
  }

  bool admits(const MultiIndex& e) const {
    if (!window_.contains(e)) return false;
    for (std::size_t g = 0; g < caps_.size(); ++g)
      if (caps_[g] && -group_part(e, g).total() > *caps_[g]) return false;
    return true;
  }

  C coefficient(const MultiIndex& e) const {
    if (!admits(e)) throw WindowError("series coefficient at (" + e.to_string() + ") lies outside the truncation");
    auto it = terms_.find(e);
    return it == terms_.end() ? C() : it->second;
  }

  void add_term(const MultiIndex& e, const C& c) {
    if (e.size() != width()) throw DimensionError("series exponent dimension mismatch");
    if (detail::coeff_is_zero(c) || !admits(e)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (detail::coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  LaurentSeries with_window(const Window& w, std::optional<Bound> bound = std::nullopt) const {
    LaurentSeries r(*this);
    r.window_ = meet(window_, w);
    r.reapply();
    if (bound) r.bound_ = *bound;
    return r;
  }
  LaurentSeries with_cap(std::size_t g, int cap) const {
    LaurentSeries r(*this);
    r.caps_.at(g) = r.caps_[g] ? std::min(*r.caps_[g], cap) : cap;
    r.reapply();
    return r;
  }
  LaurentSeries with_bound(const Bound& b) const {
    LaurentSeries r(*this);
    r.bound_ = b;
    return r;
  }

  void refresh_bound() {
    Bound b = empty_bound(width());
    for (const auto& [e, c] : terms_)
      for (std::size_t i = 0; i < e.size(); ++i) b[i] = std::max(b[i], e[i]);
    bound_ = bound_max(bound_, b);
  }

  template <class F>
  auto map_coefficients(F&& f) const {
    using D = std::decay_t<decltype(f(std::declval<const C&>()))>;
    LaurentSeries<D> r(n_, groups_);
    r.set_precision(window_, bound_, caps_);
    for (const auto& [e, c] : terms_) r.add_term(e, f(c));
    return r;
  }

  void set_precision(const Window& w, const Bound& b, const std::vector<std::optional<int>>& caps) {
    window_ = w;
    bound_ = b;
    caps_ = caps;
    reapply();
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    check_compatible(a, b);
    LaurentSeries r(a.n_, a.groups_);
    r.set_precision(meet(a.window_, b.window_), bound_max(a.bound_, b.bound_), min_caps(a.caps_, b.caps_));
    for (const auto& [e, c] : a.terms_) r.add_term(e, c);
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  LaurentSeries operator-() const {
    return map_coefficients([](const C& c) { return detail::scale(Rational(-1), c); });
  }
  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    check_compatible(a, b);
    LaurentSeries r(a.n_, a.groups_);
    r.set_precision(product_window(a.window_, a.bound_, b.window_, b.bound_), bound_add(a.bound_, b.bound_),
                    min_caps(a.caps_, b.caps_));
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        MultiIndex e = ea + eb;
        if (r.admits(e)) r.add_term(e, ca * cb);
      }
    return r;
  }

  friend LaurentSeries operator*(const Rational& k, const LaurentSeries& a) {
    return a.map_coefficients([&](const C& c) { return detail::scale(k, c); });
  }

  /// Coefficientwise equality on the common truncation.
  friend std::optional<MultiIndex> first_difference(const LaurentSeries& a, const LaurentSeries& b) {
    check_compatible(a, b);
    LaurentSeries zero(a.n_, a.groups_);
    zero.set_precision(meet(a.window_, b.window_), bound_max(a.bound_, b.bound_), min_caps(a.caps_, b.caps_));
    std::vector<MultiIndex> keys;
    for (const auto& [e, c] : a.terms_) keys.push_back(e);
    for (const auto& [e, c] : b.terms_) keys.push_back(e);
    std::sort(keys.begin(), keys.end(), [](const MultiIndex& x, const MultiIndex& y) {
      if (x.total() != y.total()) return x.total() > y.total();
      return x > y;
    });
    for (const auto& e : keys) {
      if (!zero.admits(e)) continue;
      auto ia = a.terms_.find(e);
      auto ib = b.terms_.find(e);
      C ca = ia == a.terms_.end() ? C() : ia->second;
      C cb = ib == b.terms_.end() ? C() : ib->second;
      if (!(ca == cb)) return e;
    }
    return std::nullopt;
  }
  friend bool truncation_equal(const LaurentSeries& a, const LaurentSeries& b) {
    return !first_difference(a, b).has_value();
  }

  /// Text such as `1 - 1/3*z1^-1`, highest total degree first.
  template <class R>
  std::string render(R&& render_coeff) const {
    std::vector<std::pair<MultiIndex, const C*>> order;
    for (const auto& [e, c] : terms_) order.emplace_back(e, &c);
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
      if (x.first.total() != y.first.total()) return x.first.total() > y.first.total();
      return x.first > y.first;
    });
    std::string out;
    for (const auto& [e, cp] : order) {
      std::string mono = monomial_text(e);
      std::string coef = render_coeff(*cp);
      bool negative = false;
      if (!coef.empty() && coef[0] == '-' && coef.find(" + ") == std::string::npos &&
          coef.find(" - ") == std::string::npos) {
        negative = true;
        coef = coef.substr(1);
      } else if ((coef.find(" + ") != std::string::npos || coef.find(" - ") != std::string::npos) && !mono.empty()) {
        coef = "(" + coef + ")";
      }
      std::string term;
      if (mono.empty()) term = coef;
      else if (coef == "1") term = mono;
      else term = coef + "*" + mono;
      if (out.empty()) out = negative ? "-" + term : term;
      else out += (negative ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
  }

  std::string monomial_text(const MultiIndex& e) const {
    std::string s;
    for (std::size_t g = 0; g < groups_.size(); ++g)
      for (std::size_t i = 0; i < n_; ++i) {
        int v = e[g * n_ + i];
        if (v == 0) continue;
        if (!s.empty()) s += "*";
        s += groups_[g] + std::to_string(i + 1);
        if (v != 1) s += "^" + std::to_string(v);
      }
    return s;
  }

 private:
  static void check_compatible(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.n_ != b.n_ || a.groups_ != b.groups_) throw DimensionError("series variable groups differ");
  }
  static std::vector<std::optional<int>> min_caps(const std::vector<std::optional<int>>& a,
                                                  const std::vector<std::optional<int>>& b) {
    std::vector<std::optional<int>> r(a.size());
    for (std::size_t g = 0; g < a.size(); ++g) {
      if (a[g] && b[g]) r[g] = std::min(*a[g], *b[g]);
      else r[g] = a[g] ? a[g] : b[g];
    }
    return r;
  }
  void reapply() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (!admits(it->first)) it = terms_.erase(it);
      else ++it;
    }
  }

  std::size_t n_ = 0;
  std::vector<std::string> groups_;
  TermMap terms_;
  Window window_;
  Bound bound_;
  std::vector<std::optional<int>> caps_;
};

/// Coefficient at exponent -1 in group `group`; the result lives on the
/// remaining groups.
template <class C>
LaurentSeries<C> residue(const LaurentSeries<C>& h, const std::string& group) {
  const std::size_t n = h.dimension();
  const std::size_t g = h.group_index(group);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = g * n + i;
    if (h.window().finite(k) && h.window()[k] > -1)
      throw WindowError("residue: exponent -1 of " + group + " lies outside window " + h.window().to_string());
  }
  if (h.caps()[g] && *h.caps()[g] < static_cast<int>(n))
    throw WindowError("residue: exponent -1 of " + group + " exceeds the degree cap");

  std::vector<std::string> rest;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < h.groups().size(); ++j)
    if (j != g) {
      rest.push_back(h.groups()[j]);
      keep.push_back(j);
    }
  auto project = [&](const MultiIndex& e) {
    std::vector<int> v;
    for (std::size_t j : keep)
      for (std::size_t i = 0; i < n; ++i) v.push_back(e[j * n + i]);
    return MultiIndex(std::move(v));
  };
  LaurentSeries<C> r(n, rest);
  std::vector<int> w;
  Bound b;
  for (std::size_t j : keep)
    for (std::size_t i = 0; i < n; ++i) {
      w.push_back(h.window()[j * n + i]);
      b.push_back(h.bound()[j * n + i]);
    }
  std::vector<std::optional<int>> caps;
  for (std::size_t j : keep) caps.push_back(h.caps()[j]);
  r.set_precision(Window(w), b, caps);
  const MultiIndex m1 = -MultiIndex::ones(n);
  for (const auto& [e, c] : h.terms())
    if (h.group_part(e, g) == m1) r.add_term(project(e), c);
  return r;
}

/// Res_z of a single-group series.
template <class C>
C res_z(const LaurentSeries<C>& h) {
  if (h.groups().size() != 1) throw DimensionError("res_z expects a series in one variable group");
  LaurentSeries<C> r = residue(h, h.groups()[0]);
  auto it = r.terms().find(MultiIndex());
  return it == r.terms().end() ? C() : it->second;
}

/// Re-embed a series into a larger list of groups (missing groups get exponent 0).
template <class C>
LaurentSeries<C> embed(const LaurentSeries<C>& h, const std::vector<std::string>& groups) {
  const std::size_t n = h.dimension();
  std::vector<std::size_t> where;
  for (const auto& g : h.groups()) {
    auto it = std::find(groups.begin(), groups.end(), g);
    if (it == groups.end()) throw DomainError("embed: target lacks group " + g);
    where.push_back(static_cast<std::size_t>(it - groups.begin()));
  }
  const std::size_t width = n * groups.size();
  std::vector<int> w(width, kUnbounded);
  Bound b(width, 0);
  std::vector<std::optional<int>> caps(groups.size());
  for (std::size_t j = 0; j < where.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      w[where[j] * n + i] = h.window()[j * n + i];
      b[where[j] * n + i] = h.bound()[j * n + i];
    }
    caps[where[j]] = h.caps()[j];
  }
  if (h.is_zero() && bound_is_empty(h.bound())) b = empty_bound(width);
  LaurentSeries<C> r(n, groups);
  r.set_precision(Window(w), b, caps);
  for (const auto& [e, c] : h.terms()) {
    std::vector<int> v(width, 0);
    for (std::size_t j = 0; j < where.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) v[where[j] * n + i] = e[j * n + i];
    r.add_term(MultiIndex(std::move(v)), c);
  }
  return r;
}

/// Rename the variables of one group (e.g. z -> s).
template <class C>
LaurentSeries<C> rename_group(const LaurentSeries<C>& h, const std::string& from, const std::string& to) {
  auto groups = h.groups();
  groups.at(h.group_index(from)) = to;
  LaurentSeries<C> r(h.dimension(), groups);
  r.set_precision(h.window(), h.bound(), h.caps());
  for (const auto& [e, c] : h.terms()) r.add_term(e, c);
  return r;
}

/// exp(x) for a series whose terms all have positive inverse degree in some
/// capped group (so the powers die out under the caps).
template <class C>
LaurentSeries<C> series_exp(const LaurentSeries<C>& x) {
  auto one = LaurentSeries<C>::constant(x.dimension(), x.groups(), C(1));
  one.set_precision(one.window(), one.bound(), x.caps());
  auto sum = one;
  auto term = one;
  for (int k = 1; !x.is_zero(); ++k) {
    if (k > 4096) throw DomainError("series_exp: powers do not terminate under the degree caps");
    term = Rational(1, k) * (term * x);
    if (term.is_zero()) break;
    sum = sum + term;
  }
  return sum;
}

/// (1 + r)^{-1} = sum (-r)^k, under the same termination condition.
template <class C>
LaurentSeries<C> series_inverse(const LaurentSeries<C>& u) {
  const MultiIndex zero = MultiIndex::zero(u.width());
  if (!(u.coefficient(zero) == C(1))) throw DomainError("series_inverse: constant term must be 1");
  auto one = LaurentSeries<C>::constant(u.dimension(), u.groups(), C(1));
  one.set_precision(one.window(), one.bound(), u.caps());
  auto neg_r = one - u;
  auto sum = one;
  auto term = one;
  for (int k = 1; !neg_r.is_zero(); ++k) {
    if (k > 4096) throw DomainError("series_inverse: powers do not terminate under the degree caps");
    term = term * neg_r;
    if (term.is_zero()) break;
    sum = sum + term;
  }
  return sum;
}

}  // namespace psdo
