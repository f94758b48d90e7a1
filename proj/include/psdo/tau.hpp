#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "laurent.hpp"
#include "multi_index.hpp"
#include "rational.hpp"
#include "time_poly.hpp"
#include "wave.hpp"

namespace psdo {

using TSeries = LaurentSeries<TimePolynomial>;
using QSeries = LaurentSeries<Rational>;

/// The monomial g^{e} in group `g` of a series over `groups`.
inline MultiIndex group_exponent(std::size_t n, const std::vector<std::string>& groups, const std::string& g,
                                 const MultiIndex& e) {
  std::vector<int> v(n * groups.size(), 0);
  auto it = std::find(groups.begin(), groups.end(), g);
  if (it == groups.end()) throw DomainError("unknown variable group " + g);
  const std::size_t k = static_cast<std::size_t>(it - groups.begin());
  for (std::size_t i = 0; i < n; ++i) v[k * n + i] = e[i];
  return MultiIndex(std::move(v));
}

namespace detail {

template <class C>
LaurentSeries<C> capped(std::size_t n, const std::vector<std::string>& groups, int T) {
  LaurentSeries<C> s(n, groups);
  for (std::size_t g = 0; g < groups.size(); ++g) s = s.with_cap(g, T);
  return s;
}

/// Substitute each time variable by a series; p polynomial, so this is a
/// finite computation under the caps.
template <class F>
TSeries substitute_times(const TimePolynomial& p, std::size_t n, const std::vector<std::string>& groups, int T,
                         F&& image) {
  TSeries out = capped<TimePolynomial>(n, groups, T);
  std::map<TimeVariable, std::vector<TSeries>> powers;
  for (const auto& [m, c] : p.terms()) {
    TSeries prod = capped<TimePolynomial>(n, groups, T);
    prod.add_term(MultiIndex::zero(prod.width()), TimePolynomial(c));
    for (const auto& [v, e] : m.factors()) {
      auto& pw = powers[v];
      if (pw.empty()) {
        TSeries one = capped<TimePolynomial>(n, groups, T);
        one.add_term(MultiIndex::zero(one.width()), TimePolynomial(1));
        pw.push_back(one);
      }
      while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * image(v));
      prod = prod * pw[static_cast<std::size_t>(e)];
    }
    out = out + prod;
  }
  return out;
}

}  // namespace detail

/// G applied in the listed groups at once: t_alpha -> t_alpha + sign * sum_g alpha^{-1} g^{-alpha}
/// (sign -1 is the shift G(s); +1 its inverse). Indices with a zero component
/// have no alpha^{-1} and are refused.
inline TSeries miwa_shift(const TimePolynomial& p, std::size_t n, const std::vector<std::string>& groups, int T,
                          int sign = -1) {
  for (const auto& v : p.variables()) {
    if (v.index.size() != n) throw DimensionError("time variable t[" + v.index.to_string() + "] has the wrong dimension");
    if (!mi_all_positive(v.index))
      throw DomainError("unsupported index t[" + v.index.to_string() + "]: the shift needs every component >= 1");
  }
  return detail::substitute_times(p, n, groups, T, [&](const TimeVariable& v) {
    TSeries img = detail::capped<TimePolynomial>(n, groups, T);
    img.add_term(MultiIndex::zero(img.width()), time_var(v.index));
    for (const auto& g : groups)
      img.add_term(group_exponent(n, groups, g, -v.index), TimePolynomial(Rational(sign) * mi_inverse_product(v.index)));
    img.refresh_bound();
    return img;
  });
}

inline TSeries miwa_shift(const TimePolynomial& p, std::size_t n, const std::string& group, int T) {
  return miwa_shift(p, n, std::vector<std::string>{group}, T);
}

/// Apply a shift in `group` (already present in F's groups) to the time
/// dependence of F's coefficients, multiplying into F's own variables.
inline TSeries shift_coefficients(const TSeries& f, const std::string& group, int T, int sign = -1) {
  const std::size_t n = f.dimension();
  TSeries out = detail::capped<TimePolynomial>(n, f.groups(), T);
  for (const auto& [e, c] : f.terms()) {
    TSeries img = embed(miwa_shift(c, n, std::vector<std::string>{group}, T, sign), f.groups());
    TSeries mono = detail::capped<TimePolynomial>(n, f.groups(), T);
    mono.add_term(e, TimePolynomial(1));
    out = out + img.with_cap(f.group_index(group), T) * mono;
  }
  return out;
}

inline QSeries evaluate_at(const TSeries& f, const std::map<MultiIndex, Rational>& point) {
  return f.map_coefficients([&](const TimePolynomial& c) { return time_eval(c, point); });
}

inline std::string render(const QSeries& s) {
  return s.render([](const Rational& q) { return q.get_str(); });
}
inline std::string render(const TSeries& s) {
  return s.render([](const TimePolynomial& p) { return render(p); });
}

enum class KernelKind {
  Product,     // sum_{beta >= 0} s^{-beta} z^beta, the expansion the lemmas' proofs use
  Multinomial  // (1 - sum z_r/s_r)^{-1} = sum_m (sum z_r/s_r)^m
};

/// sum over beta >= 0 with |beta| <= T of k(beta) s^{-beta} z^beta, over groups {z, s}.
template <class C = DiffPoly>
LaurentSeries<C> kernel_series(std::size_t n, int T, KernelKind kind, const std::string& z = "z",
                               const std::string& s = "s") {
  const std::vector<std::string> groups{z, s};
  LaurentSeries<C> k(n, groups);
  k = k.with_cap(1, T);
  for (int d = 0; d <= T; ++d)
    for (const auto& beta : compositions(n, d)) {
      std::vector<int> e(beta.begin(), beta.end());
      for (int v : beta) e.push_back(-v);
      Rational c = kind == KernelKind::Product ? Rational(1) : Rational(multinomial(beta));
      k.add_term(MultiIndex(std::move(e)), C(c));
    }
  k.refresh_bound();
  return k;
}

/// (1 - sum z_r/s_r)^{-1} expanded to degree T.
inline QSeries geometric_inverse(std::size_t n, int T) { return kernel_series<Rational>(n, T, KernelKind::Multinomial); }

/// prod_r (1 - z_r/s_r)^{-1} expanded to degree T.
inline QSeries product_kernel(std::size_t n, int T) { return kernel_series<Rational>(n, T, KernelKind::Product); }

namespace detail {

/// eta must be 1 + sum_{alpha <= -1} f_alpha z^alpha with every -alpha-1 inside degree T.
inline void check_lemma_input(const ZSeries& eta, int T) {
  if (eta.groups() != std::vector<std::string>{"z"}) throw DomainError("lemma: eta must be a series in z");
  const std::size_t n = eta.dimension();
  const MultiIndex m1 = -MultiIndex::ones(n);
  for (const auto& [e, c] : eta.terms()) {
    if (e.is_zero()) {
      if (c != DiffPoly(1)) throw DomainError("lemma: eta must have constant term 1");
      continue;
    }
    if (!mi_leq(e, m1)) throw DomainError("lemma: eta has a term at (" + e.to_string() + ") not <= -1");
    if (-(e + MultiIndex::ones(n)).total() > T)
      throw WindowError("lemma: degree T = " + std::to_string(T) + " cannot contain the pair for (" + e.to_string() + ")");
  }
  if (eta.terms().find(MultiIndex::zero(n)) == eta.terms().end())
    throw DomainError("lemma: eta must have constant term 1");
}

/// eta(z) -> eta(g) - 1 as a series over `groups`.
inline ZSeries tail_in(const ZSeries& eta, const std::vector<std::string>& groups, const std::string& g) {
  const std::size_t n = eta.dimension();
  ZSeries out(n, groups);
  for (const auto& [e, c] : eta.terms())
    if (!e.is_zero()) out.add_term(group_exponent(n, groups, g, e), c);
  out.refresh_bound();
  return out;
}

}  // namespace detail

struct SeriesComparison {
  ZSeries lhs;
  ZSeries rhs;
  bool equal = false;
  std::vector<MultiIndex> discrepancies;  // sorted deterministically
};

namespace detail {

inline SeriesComparison compare_series(ZSeries lhs, ZSeries rhs) {
  SeriesComparison r;
  std::set<MultiIndex> keys;
  for (const auto& [e, c] : lhs.terms()) keys.insert(e);
  for (const auto& [e, c] : rhs.terms()) keys.insert(e);
  for (const auto& e : keys) {
    auto a = lhs.terms().find(e);
    auto b = rhs.terms().find(e);
    DiffPoly ca = a == lhs.terms().end() ? DiffPoly() : a->second;
    DiffPoly cb = b == rhs.terms().end() ? DiffPoly() : b->second;
    if (ca != cb) r.discrepancies.push_back(e);
  }
  std::stable_sort(r.discrepancies.begin(), r.discrepancies.end(), [](const MultiIndex& x, const MultiIndex& y) {
    int dx = 0, dy = 0;
    for (int v : x) dx += std::abs(v);
    for (int v : y) dy += std::abs(v);
    if (dx != dy) return dx < dy;
    return x > y;
  });
  r.equal = r.discrepancies.empty();
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  return r;
}

}  // namespace detail

/// Res_z eta(z) K(z,s) against s^1 (eta(s) - 1).
inline SeriesComparison lemma41_check(const ZSeries& eta, int T, KernelKind kind = KernelKind::Product) {
  detail::check_lemma_input(eta, T);
  const std::size_t n = eta.dimension();
  const std::vector<std::string> zs{"z", "s"};
  ZSeries prod = embed(eta, zs) * kernel_series<DiffPoly>(n, T, kind);
  ZSeries lhs = residue(prod, "z");
  ZSeries rhs = detail::tail_in(eta, {"s"}, "s") * ZSeries::monomial(n, {"s"}, MultiIndex::ones(n), DiffPoly(1));
  return detail::compare_series(lhs, rhs.with_cap(0, T));
}

enum class Lemma42Mode { Constrained, Paper };

/// Res_z eta(z) K(z,s) K(z,s') against the regrouped right-hand side:
/// constrained sums gamma over 0 <= gamma <= -alpha-1 (exact); paper mode sums
/// every gamma >= 0 as displayed and so picks up extra monomials.
inline SeriesComparison lemma42_check(const ZSeries& eta, int T, Lemma42Mode mode,
                                      KernelKind kind = KernelKind::Product) {
  detail::check_lemma_input(eta, T);
  const std::size_t n = eta.dimension();
  const std::vector<std::string> g3{"z", "s", "s'"};
  ZSeries ks = embed(kernel_series<DiffPoly>(n, T, kind, "z", "s"), g3);
  ZSeries kt = embed(kernel_series<DiffPoly>(n, T, kind, "z", "s'"), g3);
  ZSeries lhs = residue(embed(eta, g3) * ks * kt, "z");

  const std::vector<std::string> ss{"s", "s'"};
  ZSeries rhs(n, ss);
  rhs = rhs.with_cap(0, T).with_cap(1, T);
  for (const auto& [alpha, f] : eta.terms()) {
    if (alpha.is_zero()) continue;
    // f_alpha s^alpha sum_gamma s^{gamma+1} s'^{-gamma}
    const MultiIndex top = -alpha - MultiIndex::ones(n);
    for (int d = 0; d <= T; ++d)
      for (const auto& gamma : compositions(n, d)) {
        if (mode == Lemma42Mode::Constrained && !mi_leq(gamma, top)) continue;
        std::vector<int> e;
        for (std::size_t i = 0; i < n; ++i) e.push_back(alpha[i] + gamma[i] + 1);
        for (std::size_t i = 0; i < n; ++i) e.push_back(-gamma[i]);
        rhs.add_term(MultiIndex(std::move(e)), f);
      }
  }
  return detail::compare_series(lhs, rhs);
}

/// Rigidity: the coefficients at s^0 s'^{alpha+1} of Res_z eta K K' are f_alpha,
/// so a vanishing residue forces eta = 1.
inline ZSeries recover_tail(const ZSeries& residue_ss) {
  const std::size_t n = residue_ss.dimension();
  if (residue_ss.groups() != std::vector<std::string>{"s", "s'"}) throw DomainError("recover_tail: expected a series in s, s'");
  ZSeries out(n, {"z"});
  for (const auto& [e, c] : residue_ss.terms()) {
    if (!residue_ss.group_part(e, 0).is_zero()) continue;
    out.add_term(residue_ss.group_part(e, 1) - MultiIndex::ones(n), c);
  }
  out.refresh_bound();
  return out;
}

struct KernelAudit {
  std::size_t n = 0;
  int T = 0;
  QSeries exp_kernel;     // exp(-sum_{alpha >= 1} alpha^{-1} s^{-alpha} z^alpha)
  QSeries reciprocal;     // 1 - sum z_r/s_r
  QSeries log_geometric;  // -ln(1 - sum z_r/s_r)
  QSeries kernel;         // sum_{alpha >= 1} alpha^{-1} s^{-alpha} z^alpha
  bool exp_equal = false;
  bool log_equal = false;
  std::optional<MultiIndex> first_mismatch;      // exp side, lowest degree first
  std::optional<MultiIndex> first_log_mismatch;  // log side
  std::vector<MultiIndex> log_agreements;        // nonzero monomials where both logs agree
};

namespace detail {

inline std::optional<MultiIndex> lowest_difference(const QSeries& a, const QSeries& b, std::vector<MultiIndex>* agree) {
  std::set<MultiIndex> keys;
  for (const auto& [e, c] : a.terms()) keys.insert(e);
  for (const auto& [e, c] : b.terms()) keys.insert(e);
  std::vector<MultiIndex> order(keys.begin(), keys.end());
  const std::size_t n = a.dimension();
  std::stable_sort(order.begin(), order.end(), [&](const MultiIndex& x, const MultiIndex& y) {
    int dx = 0, dy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dx += x[i];
      dy += y[i];
    }
    if (dx != dy) return dx < dy;
    return x > y;
  });
  std::optional<MultiIndex> first;
  for (const auto& e : order) {
    auto ia = a.terms().find(e);
    auto ib = b.terms().find(e);
    Rational ca = ia == a.terms().end() ? Rational(0) : ia->second;
    Rational cb = ib == b.terms().end() ? Rational(0) : ib->second;
    if (ca != cb) {
      if (!first) first = e;
    } else if (agree && !is_zero(ca)) {
      agree->push_back(e);
    }
  }
  return first;
}

}  // namespace detail

/// Compare the shift kernel over alpha >= 1 with the logarithm of the
/// geometric series, and exp(-kernel) with 1 - sum z_r/s_r, to degree T.
inline KernelAudit kernel_vs_geometric(std::size_t n, int T) {
  if (T < 1) throw DomainError("kernel_vs_geometric: T must be >= 1");
  const std::vector<std::string> zs{"z", "s"};
  KernelAudit a;
  a.n = n;
  a.T = T;
  a.kernel = detail::capped<Rational>(n, {"z", "s"}, T);
  a.kernel = QSeries(n, zs).with_cap(1, T);
  for (const auto& alpha : positive_indices(n, T)) {
    std::vector<int> e(alpha.begin(), alpha.end());
    for (int v : alpha) e.push_back(-v);
    a.kernel.add_term(MultiIndex(std::move(e)), mi_inverse_product(alpha));
  }
  a.kernel.refresh_bound();

  QSeries u = QSeries(n, zs).with_cap(1, T);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<int> e(2 * n, 0);
    e[r] = 1;
    e[n + r] = -1;
    u.add_term(MultiIndex(std::move(e)), Rational(1));
  }
  u.refresh_bound();
  QSeries one = QSeries::constant(n, zs, Rational(1)).with_cap(1, T);
  a.reciprocal = one - u;
  a.exp_kernel = series_exp(Rational(-1) * a.kernel);

  a.log_geometric = QSeries(n, zs).with_cap(1, T);
  QSeries power = one;
  for (int m = 1; m <= T; ++m) {
    power = power * u;
    a.log_geometric = a.log_geometric + Rational(1, m) * power;
  }
  a.first_mismatch = detail::lowest_difference(a.exp_kernel, a.reciprocal, nullptr);
  a.first_log_mismatch = detail::lowest_difference(a.log_geometric, a.kernel, &a.log_agreements);
  a.exp_equal = !a.first_mismatch;
  a.log_equal = !a.first_log_mismatch;
  return a;
}

/// D_k(z) F = sum_{alpha >= 1, |alpha| <= T} alpha_k alpha^{-1} z^{-alpha-e_k} d_{t_alpha} F - dF/dz_k
/// for F a series in z alone.
inline TSeries dk_apply(std::size_t k, const TSeries& f, int T) {
  const std::size_t n = f.dimension();
  if (k >= n) throw DimensionError("dk_apply: direction out of range");
  if (f.groups().size() != 1) throw DimensionError("dk_apply: F must be a series in one group");
  TSeries out(n, f.groups());
  out = out.with_cap(0, T);
  out.set_precision(f.window(), empty_bound(n), out.caps());
  for (const auto& alpha : positive_indices(n, T)) {
    const MultiIndex shift = -alpha - MultiIndex::unit(n, k);
    const Rational w = Rational(alpha[k]) * mi_inverse_product(alpha);
    for (const auto& [e, c] : f.terms()) {
      TimePolynomial d = time_derive(c, alpha);
      if (!d.is_zero()) out.add_term(e + shift, w * d);
    }
  }
  for (const auto& [e, c] : f.terms())
    if (e[k] != 0) out.add_term(e - MultiIndex::unit(n, k), Rational(-e[k]) * c);
  out.refresh_bound();
  return out;
}

/// tau(t) with the data needed to expand G(z) tau.
struct TauContext {
  std::size_t n = 1;
  int T = 4;
  TimePolynomial tau;

  std::set<MultiIndex> active() const {
    std::set<MultiIndex> out;
    for (const auto& v : tau.variables()) out.insert(v.index);
    return out;
  }
  void validate() const {
    for (const auto& a : active()) {
      if (a.size() != n) throw DimensionError("tau uses t[" + a.to_string() + "] in dimension " + std::to_string(n));
      if (!mi_in_zplus(a)) throw DomainError("tau uses t[" + a.to_string() + "], which is not a time index");
    }
  }
};

struct DkReport {
  bool zero = true;
  int sound_degree = 0;
  std::optional<MultiIndex> witness;
  TSeries result;
};

/// D_k(z) G(z) tau vanishes through degree T: both G(z) tau and D_k only use
/// shift indices with |alpha| <= T, and every term of degree <= T involves no
/// other index, so the truncation is exact there.
inline DkReport dk_annihilation_check(const TauContext& ctx, std::size_t k) {
  ctx.validate();
  DkReport r;
  r.sound_degree = ctx.T;
  TSeries f = miwa_shift(ctx.tau, ctx.n, "z", ctx.T);
  r.result = dk_apply(k, f, ctx.T);
  r.zero = r.result.is_zero();
  if (!r.zero) r.witness = r.result.terms().begin()->first;
  return r;
}

/// hat w(t, z) = G(z) tau / tau at a rational time point.
inline QSeries wavehat_from_tau(const TauContext& ctx, const std::map<MultiIndex, Rational>& point) {
  ctx.validate();
  const Rational at = time_eval(ctx.tau, point);
  if (is_zero(at)) throw DomainError("wavehat_from_tau: tau vanishes at the chosen point (pole)");
  QSeries num = evaluate_at(miwa_shift(ctx.tau, ctx.n, "z", ctx.T), point);
  return Rational(1) / at * num;
}

struct R1Report {
  QSeries lhs;  // hat w(t,s)^{-1}
  QSeries rhs;  // G(s) hat w^*(t,s)
  bool equal = false;
  std::optional<MultiIndex> witness;
};

/// n = 1: hat w(t,s)^{-1} = G(s) hat w^*(t,s), with hat w = G(s) tau / tau and
/// hat w^* = G(s)^{-1} tau / tau, both sides expanded to degree T at `point`.
inline R1Report r1_check_n1(const TauContext& ctx, const std::map<MultiIndex, Rational>& point) {
  if (ctx.n != 1) throw DimensionError("r1_check_n1 needs n = 1");
  ctx.validate();
  const int T = ctx.T;
  const Rational at = time_eval(ctx.tau, point);
  if (is_zero(at)) throw DomainError("r1_check_n1: tau vanishes at the chosen point (pole)");

  QSeries what = Rational(1) / at * evaluate_at(miwa_shift(ctx.tau, 1, "s", T), point);
  R1Report r;
  r.lhs = series_inverse(what);

  // G(s) of tau(t + [s^{-1}]) / tau(t) = (G(s) G(s)^{-1} tau) / G(s) tau
  TSeries up = miwa_shift(ctx.tau, 1, std::vector<std::string>{"s"}, T, +1);
  QSeries num = evaluate_at(shift_coefficients(up, "s", T, -1), point);
  QSeries den = evaluate_at(miwa_shift(ctx.tau, 1, "s", T), point);
  r.rhs = num * series_inverse(Rational(1) / at * den);
  r.rhs = Rational(1) / at * r.rhs;
  r.witness = first_difference(r.lhs, r.rhs);
  r.equal = !r.witness;
  return r;
}

}  // namespace psdo
