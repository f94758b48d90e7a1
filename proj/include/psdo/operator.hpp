#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "multi_index.hpp"
#include "window.hpp"

namespace psdo {

/// Window-truncated pseudodifferential operator sum_alpha f_alpha d^alpha with
/// DiffPoly coefficients stored to the left of the d-monomials.
///
/// `window` marks which exponents are known; `bound` is a declared upper bound
/// nu on the support of the untruncated operator. Truncation keeps the bound,
/// which is what makes product windows sound.
class PsdOp {
 public:
  using TermMap = std::map<MultiIndex, DiffPoly>;

  PsdOp() = default;
  explicit PsdOp(std::size_t n) : n_(n), window_(Window::exact(n)), bound_(empty_bound(n)) {}

  static PsdOp zero(std::size_t n) { return PsdOp(n); }
  static PsdOp constant(std::size_t n, const DiffPoly& c) { return monomial(n, MultiIndex::zero(n), c); }
  static PsdOp one(std::size_t n) { return constant(n, DiffPoly(1)); }
  static PsdOp monomial(std::size_t n, const MultiIndex& exponent, const DiffPoly& c = DiffPoly(1)) {
    TermMap t;
    if (!c.is_zero()) t.emplace(exponent, c);
    return from_terms(n, std::move(t));
  }
  static PsdOp partial(std::size_t n, std::size_t i, int power = 1) {
    MultiIndex e(n);
    e[i] = power;
    return monomial(n, e);
  }

  /// Bound defaults to the componentwise max of the stored support.
  static PsdOp from_terms(std::size_t n, TermMap terms, std::optional<Window> window = std::nullopt,
                          std::optional<Bound> bound = std::nullopt) {
    PsdOp op(n);
    if (window) {
      if (window->size() != n) throw DimensionError("window dimension mismatch");
      op.window_ = *window;
    }
    for (auto& [e, c] : terms) {
      if (e.size() != n) throw DimensionError("exponent dimension mismatch");
      if (c.is_zero() || !op.window_.contains(e)) continue;
      op.terms_.emplace(e, std::move(c));
    }
    op.bound_ = bound ? *bound : op.support_bound();
    if (op.bound_.size() != n) throw DimensionError("bound dimension mismatch");
    for (const auto& [e, c] : op.terms_)
      for (std::size_t i = 0; i < n; ++i)
        if (e[i] > op.bound_[i]) throw DomainError("stored term exceeds the declared bound");
    return op;
  }

  std::size_t dimension() const { return n_; }
  const Window& window() const { return window_; }
  const Bound& bound() const { return bound_; }
  const TermMap& terms() const { return terms_; }
  bool is_exact() const { return window_.is_exact(); }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient at `e`; throws when `e` lies outside the window.
  DiffPoly coefficient(const MultiIndex& e) const {
    if (!window_.contains(e)) throw WindowError("coefficient at (" + e.to_string() + ") lies outside window " + window_.to_string());
    auto it = terms_.find(e);
    return it == terms_.end() ? DiffPoly() : it->second;
  }

  Bound support_bound() const {
    Bound b = empty_bound(n_);
    for (const auto& [e, c] : terms_)
      for (std::size_t i = 0; i < n_; ++i) b[i] = std::max(b[i], e[i]);
    return b;
  }

  /// Restrict to a smaller known region (window meet); the bound is kept.
  PsdOp truncated(const Window& w) const {
    TermMap t = terms_;
    return from_terms(n_, std::move(t), meet(window_, w), bound_);
  }

  /// Same terms with an explicit declared bound.
  PsdOp with_bound(const Bound& b) const {
    TermMap t = terms_;
    return from_terms(n_, std::move(t), window_, b);
  }

  /// Structural identity: same terms on the same window (the bound is only a
  /// declared envelope and is not compared).
  friend bool operator==(const PsdOp& a, const PsdOp& b) {
    return a.n_ == b.n_ && a.window_ == b.window_ && a.terms_ == b.terms_;
  }

  template <class F>
  PsdOp map_coefficients(F&& f) const {
    TermMap t;
    for (const auto& [e, c] : terms_) t.emplace(e, f(c));
    return from_terms(n_, std::move(t), window_, bound_);
  }

 private:
  std::size_t n_ = 0;
  TermMap terms_;
  Window window_;
  Bound bound_;
};

namespace detail {

inline void check_same_dim(const PsdOp& a, const PsdOp& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("operator dimension mismatch");
}

}  // namespace detail

inline PsdOp ps_add(const PsdOp& a, const PsdOp& b) {
  detail::check_same_dim(a, b);
  Window w = meet(a.window(), b.window());
  PsdOp::TermMap t = a.terms();
  for (const auto& [e, c] : b.terms()) {
    auto [it, inserted] = t.try_emplace(e, c);
    if (!inserted) it->second += c;
  }
  return PsdOp::from_terms(a.dimension(), std::move(t), w, bound_max(a.bound(), b.bound()));
}

inline PsdOp ps_neg(const PsdOp& a) {
  return a.map_coefficients([](const DiffPoly& c) { return -c; });
}

inline PsdOp ps_sub(const PsdOp& a, const PsdOp& b) { return ps_add(a, ps_neg(b)); }

/// Left multiplication by a function (a zeroth-order operator).
inline PsdOp ps_scale(const DiffPoly& k, const PsdOp& a) {
  if (k.is_zero()) return PsdOp::zero(a.dimension());
  return a.map_coefficients([&](const DiffPoly& c) { return k * c; });
}

namespace detail {

/// Per-component upper limits of gamma in the Leibniz sum for the pair
/// (alpha, beta) under output window mu. -1 means the pair contributes nothing.
inline std::vector<int> gamma_limits(const MultiIndex& alpha, const MultiIndex& beta, const Window& mu,
                                     bool constant_right) {
  const std::size_t n = alpha.size();
  std::vector<int> lim(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (constant_right) {
      lim[i] = 0;
    } else {
      long cap = alpha[i] >= 0 ? alpha[i] : std::numeric_limits<int>::max();
      if (mu.finite(i)) cap = std::min<long>(cap, static_cast<long>(alpha[i]) + beta[i] - mu[i]);
      lim[i] = static_cast<int>(cap);
    }
    if (mu.finite(i) && alpha[i] + beta[i] < mu[i]) lim[i] = -1;
  }
  return lim;
}

inline Window leibniz_window(const Window& wa, const Bound& na, const Window& wb, const Bound& nb,
                             const std::optional<Window>& requested) {
  Window mu = product_window(wa, na, wb, nb);
  if (requested) {
    if (requested->size() != mu.size()) throw DimensionError("requested window dimension mismatch");
    mu = meet(mu, *requested);
  }
  return mu;
}

/// Every component where some left exponent is negative and some right
/// coefficient is non-constant produces an infinite Leibniz tail: it needs a
/// finite output window.
template <class LeftTerms, class RightTerms>
void require_finite_tails(const LeftTerms& left, const RightTerms& right, const Window& mu) {
  bool right_varies = false;
  for (const auto& [e, c] : right)
    if (!c.is_constant()) right_varies = true;
  if (!right_varies) return;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.finite(i)) continue;
    for (const auto& [e, c] : left)
      if (e[i] < 0)
        throw WindowError("no finite window derivable in component " + std::to_string(i + 1) +
                          " (negative exponent meets a non-constant coefficient); request one");
  }
}

/// Enumerate gamma in the box 0 <= gamma <= lim.
template <class F>
void for_each_gamma(const std::vector<int>& lim, F&& f) {
  const std::size_t n = lim.size();
  for (int v : lim)
    if (v < 0) return;
  MultiIndex g(n);
  while (true) {
    f(g);
    std::size_t i = 0;
    while (i < n) {
      if (g[i] < lim[i]) {
        ++g[i];
        break;
      }
      g[i] = 0;
      ++i;
    }
    if (i == n) return;
  }
}

/// Memoized x-derivatives d^gamma h.
class DerivativeTable {
 public:
  explicit DerivativeTable(const DiffPoly& h) { table_.emplace(MultiIndex(), h); }
  const DiffPoly& get(const MultiIndex& gamma) {
    if (auto it = table_.find(gamma); it != table_.end()) return it->second;
    if (gamma.is_zero()) {
      auto base = table_.at(MultiIndex());
      return table_.emplace(gamma, base).first->second;
    }
    std::size_t i = 0;
    while (gamma[i] == 0) ++i;
    MultiIndex prev = gamma;
    --prev[i];
    DiffPoly d = dp_derive(get(prev), MultiIndex::unit(gamma.size(), i));
    return table_.emplace(gamma, std::move(d)).first->second;
  }

 private:
  std::map<MultiIndex, DiffPoly> table_;
};

}  // namespace detail

namespace detail {

/// Accumulate sign * sum C(alpha,gamma) f (d^gamma h) d^{alpha+beta-gamma} into out;
/// skip_zero drops gamma = 0.
inline void leibniz_into(PsdOp::TermMap& out, const PsdOp& a, const PsdOp& b, const Window& mu, bool skip_zero,
                         const Rational& sign) {
  for (const auto& [beta, h] : b.terms()) {
    DerivativeTable derivs(h);
    const bool constant = h.is_constant();
    if (constant && skip_zero) continue;
    for (const auto& [alpha, f] : a.terms()) {
      auto lim = gamma_limits(alpha, beta, mu, constant);
      for_each_gamma(lim, [&](const MultiIndex& gamma) {
        if (skip_zero && gamma.is_zero()) return;
        Rational coef = mi_binomial(alpha, gamma);
        if (is_zero(coef)) return;
        const DiffPoly& dh = derivs.get(gamma);
        if (dh.is_zero()) return;
        MultiIndex e = alpha + beta - gamma;
        DiffPoly term = (sign * coef) * (f * dh);
        auto [it, inserted] = out.try_emplace(std::move(e), std::move(term));
        if (!inserted) it->second += term;
      });
    }
  }
}

}  // namespace detail

/// Leibniz product sum C(alpha,gamma) f_alpha (d^gamma h_beta) d^{alpha+beta-gamma},
/// complete on the derived window (optionally narrowed by `requested`).
inline PsdOp ps_mul(const PsdOp& a, const PsdOp& b, const std::optional<Window>& requested = std::nullopt) {
  detail::check_same_dim(a, b);
  const std::size_t n = a.dimension();
  if ((a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact())) return PsdOp::zero(n);
  Window mu = detail::leibniz_window(a.window(), a.bound(), b.window(), b.bound(), requested);
  detail::require_finite_tails(a.terms(), b.terms(), mu);
  PsdOp::TermMap out;
  detail::leibniz_into(out, a, b, mu, false, Rational(1));
  return PsdOp::from_terms(n, std::move(out), mu, bound_add(a.bound(), b.bound()));
}

/// psi* = sum (-1)^{|alpha|} d^alpha o f_alpha, re-expanded to coefficients-left form.
inline PsdOp ps_adjoint(const PsdOp& a, const std::optional<Window>& requested = std::nullopt) {
  const std::size_t n = a.dimension();
  // d^alpha o f only lowers exponents, so the input window stays sound.
  Window mu = a.window();
  if (requested) mu = meet(mu, *requested);
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.finite(i)) continue;
    for (const auto& [e, c] : a.terms())
      if (e[i] < 0 && !c.is_constant())
        throw WindowError("adjoint needs a finite window in component " + std::to_string(i + 1));
  }
  PsdOp::TermMap out;
  for (const auto& [alpha, f] : a.terms()) {
    detail::DerivativeTable derivs(f);
    const Rational sign = (alpha.total() % 2 == 0) ? 1 : -1;
    auto lim = detail::gamma_limits(alpha, MultiIndex::zero(n), mu, f.is_constant());
    detail::for_each_gamma(lim, [&](const MultiIndex& gamma) {
      Rational coef = sign * mi_binomial(alpha, gamma);
      if (is_zero(coef)) return;
      const DiffPoly& df = derivs.get(gamma);
      if (df.is_zero()) return;
      DiffPoly term = coef * df;
      auto [it, inserted] = out.try_emplace(alpha - gamma, term);
      if (!inserted) it->second += term;
    });
  }
  return PsdOp::from_terms(n, std::move(out), mu, a.bound());
}

/// Res_d psi = f_{(-1,...,-1)}.
inline DiffPoly ps_res_partial(const PsdOp& a) {
  const MultiIndex m1 = -MultiIndex::ones(a.dimension());
  if (!a.window().contains(m1))
    throw WindowError("residue at (-1,...,-1) lies outside window " + a.window().to_string());
  return a.coefficient(m1);
}

/// (psi_+, psi_-) by the sign of the d_n exponent.
inline std::pair<PsdOp, PsdOp> ps_split(const PsdOp& a) {
  const std::size_t n = a.dimension();
  PsdOp::TermMap plus, minus;
  for (const auto& [e, c] : a.terms()) (e[n - 1] >= 0 ? plus : minus).emplace(e, c);
  Window wp = a.window();
  // Every d_n exponent >= 0 is inside the window once mu_n <= 0.
  if (wp.finite(n - 1) && wp[n - 1] <= 0) wp[n - 1] = kUnbounded;
  Bound bm = a.bound();
  if (is_finite(bm[n - 1])) bm[n - 1] = std::min(bm[n - 1], -1);
  Bound bp = a.bound();
  if (is_finite(bp[n - 1]) && bp[n - 1] < 0) bp = empty_bound(n);
  return {PsdOp::from_terms(n, std::move(plus), wp, bp), PsdOp::from_terms(n, std::move(minus), a.window(), bm)};
}

inline PsdOp ps_plus(const PsdOp& a) { return ps_split(a).first; }
inline PsdOp ps_minus(const PsdOp& a) { return ps_split(a).second; }

/// Membership in P_-: every stored d_n exponent is negative.
inline bool ps_in_pminus(const PsdOp& a) {
  const std::size_t n = a.dimension();
  for (const auto& [e, c] : a.terms())
    if (e[n - 1] >= 0) return false;
  return true;
}

/// Membership in \hat P_-: every stored exponent is <= (-1,...,-1).
inline bool ps_in_phat(const PsdOp& a) {
  const MultiIndex m1 = -MultiIndex::ones(a.dimension());
  for (const auto& [e, c] : a.terms())
    if (!mi_leq(e, m1)) return false;
  return true;
}

/// Coefficientwise equality on the intersection of both windows.
inline std::optional<MultiIndex> first_difference(const PsdOp& a, const PsdOp& b) {
  detail::check_same_dim(a, b);
  Window w = meet(a.window(), b.window());
  std::set<MultiIndex> keys;
  for (const auto& [e, c] : a.terms()) keys.insert(e);
  for (const auto& [e, c] : b.terms()) keys.insert(e);
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
    if (!w.contains(*it)) continue;
    if (a.coefficient(*it) != b.coefficient(*it)) return *it;
  }
  return std::nullopt;
}

inline bool window_equal(const PsdOp& a, const PsdOp& b) { return !first_difference(a, b).has_value(); }

inline bool window_zero(const PsdOp& a) { return a.is_zero(); }

/// psi^{-1} for psi = 1 + r with every d_n exponent of r <= -1, by the Neumann
/// series sum (-r)^k; each factor lowers the d_n degree, so the series stops
/// once the powers leave the window.
inline PsdOp ps_inverse(const PsdOp& a, const std::optional<Window>& requested = std::nullopt) {
  const std::size_t n = a.dimension();
  const MultiIndex zero = MultiIndex::zero(n);
  if (!a.window().contains(zero) || a.coefficient(zero) != DiffPoly(1))
    throw DomainError("ps_inverse: operator is not of the form 1 + r with r in P_-");
  PsdOp::TermMap rest;
  for (const auto& [e, c] : a.terms()) {
    if (e == zero) continue;
    if (e[n - 1] > -1) throw DomainError("ps_inverse: operator is not of the form 1 + r with r in P_-");
    rest.emplace(e, -c);
  }
  Bound rb = a.bound();
  rb[n - 1] = std::min(rb[n - 1], -1);
  PsdOp neg_r = PsdOp::from_terms(n, std::move(rest), a.window(), rb);
  if (neg_r.is_zero() && a.is_exact()) return PsdOp::one(n);

  Window w = a.window();
  if (requested) w = meet(w, *requested);
  if (!w.finite(n - 1)) throw WindowError("ps_inverse: an infinite Neumann series needs a finite window in the last component");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (w.finite(i) && is_finite(rb[i]) && rb[i] > 0)
      throw WindowError("ps_inverse: positive exponents in windowed component " + std::to_string(i + 1) +
                        " give an unbounded support");

  std::vector<PsdOp> powers;
  PsdOp power = PsdOp::one(n);
  while (true) {
    power = ps_mul(power, neg_r, w);
    w = meet(w, power.window());
    const int top = power.bound()[n - 1];
    if (!is_finite(top) || top < w[n - 1]) break;
    powers.push_back(power);
  }
  PsdOp sum = PsdOp::one(n).truncated(w);
  for (const auto& p : powers) sum = ps_add(sum, p.truncated(w));
  Bound b(n, 0);
  for (const auto& p : powers) b = bound_max(b, p.bound());
  return sum.truncated(w).with_bound(bound_max(b, sum.support_bound()));
}

inline PsdOp ps_power(const PsdOp& a, int k, const std::optional<Window>& requested = std::nullopt) {
  if (k < 0) throw DomainError("ps_power: negative exponent");
  PsdOp r = PsdOp::one(a.dimension());
  for (int i = 0; i < k; ++i) r = ps_mul(r, a, requested);
  return r;
}

/// L_1^{alpha_1} ... L_n^{alpha_n}, multiplied strictly left to right.
inline PsdOp ps_power_multi(std::span<const PsdOp> ops, const MultiIndex& alpha,
                            const std::optional<Window>& requested = std::nullopt) {
  if (ops.empty() || ops.size() != alpha.size()) throw DimensionError("ps_power_multi: need one operator per component");
  for (int v : alpha)
    if (v < 0) throw DomainError("ps_power_multi: negative exponent");
  PsdOp r = PsdOp::one(ops[0].dimension());
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (int k = 0; k < alpha[i]; ++k) r = ps_mul(r, ops[i], requested);
  return r;
}

/// [a, b]. The gamma = 0 Leibniz terms f h d^{alpha+beta} cancel pairwise, known
/// or not, so they are never formed; for n = 1 every surviving term of an
/// unknown pair sits one layer lower, which widens the window by one.
inline PsdOp ps_commutator(const PsdOp& a, const PsdOp& b, const std::optional<Window>& requested = std::nullopt) {
  detail::check_same_dim(a, b);
  const std::size_t n = a.dimension();
  if ((a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact())) return PsdOp::zero(n);
  Window mu = product_window(a.window(), a.bound(), b.window(), b.bound());
  Bound nu = bound_add(a.bound(), b.bound());
  if (n == 1) {
    if (mu.finite(0)) mu[0] -= 1;
    if (is_finite(nu[0])) nu[0] -= 1;
  }
  if (requested) {
    if (requested->size() != n) throw DimensionError("requested window dimension mismatch");
    mu = meet(mu, *requested);
  }
  detail::require_finite_tails(a.terms(), b.terms(), mu);
  detail::require_finite_tails(b.terms(), a.terms(), mu);
  PsdOp::TermMap out;
  detail::leibniz_into(out, a, b, mu, true, Rational(1));
  detail::leibniz_into(out, b, a, mu, true, Rational(-1));
  return PsdOp::from_terms(n, std::move(out), mu, nu);
}

/// Coefficientwise t_dir-derivative (free or evolutionary).
inline PsdOp ps_derive(const PsdOp& a, const MultiIndex& dir, const FlowRules* rules = nullptr) {
  if (!rules) return a.map_coefficients([&](const DiffPoly& c) { return dp_derive(c, dir); });
  detail::EvolutionaryDeriver d(*rules);
  return a.map_coefficients([&](const DiffPoly& c) { return d.derive(c, dir); });
}

/// Text form `a*d1*d2^-1 + b*d2^-2`; terms by decreasing total order. A
/// truncated operator gets a trailing `O(...)` naming its first unknown layer.
inline std::string render(const PsdOp& a, const JetStyle& style, bool with_tail = true) {
  std::vector<std::pair<MultiIndex, const DiffPoly*>> order;
  for (const auto& [e, c] : a.terms()) order.emplace_back(e, &c);
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.first.total() != y.first.total()) return x.first.total() > y.first.total();
    return x.first > y.first;
  });
  std::string out;
  auto monomial_text = [](const MultiIndex& e) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!s.empty()) s += "*";
      s += "d" + std::to_string(i + 1);
      if (e[i] != 1) s += "^" + std::to_string(e[i]);
    }
    return s;
  };
  for (const auto& [e, c] : order) {
    std::string mono = monomial_text(e);
    std::string coef = c->render(style);
    bool negative = false;
    if (c->size() == 1 && coef[0] == '-') {
      negative = true;
      coef = coef.substr(1);
    } else if (c->size() > 1 && !mono.empty()) {
      coef = "(" + coef + ")";
    }
    std::string term;
    if (mono.empty()) term = coef;
    else if (coef == "1") term = mono;
    else term = coef + "*" + mono;
    if (out.empty()) out = negative ? "-" + term : term;
    else out += (negative ? " - " : " + ") + term;
  }
  if (out.empty()) out = "0";
  if (with_tail && !a.is_exact()) {
    std::string tail;
    const Window& w = a.window();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w.finite(i)) continue;
      if (!tail.empty()) tail += "*";
      tail += "d" + std::to_string(i + 1) + "^" + std::to_string(w[i] - 1);
    }
    out += " + O(" + tail + ")";
  }
  return out;
}

}  // namespace psdo
