#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "laurent.hpp"
#include "multi_index.hpp"
#include "operator.hpp"
#include "window.hpp"

namespace psdo {

using ZSeries = LaurentSeries<DiffPoly>;

/// Indices alpha >= (1,...,1) with |alpha| <= T, in increasing total degree.
inline std::vector<MultiIndex> positive_indices(std::size_t n, int T) {
  std::vector<MultiIndex> out;
  const int n_int = static_cast<int>(n);
  for (int d = n_int; d <= T; ++d)
    for (const auto& c : compositions(n, d - n_int)) out.push_back(c + MultiIndex::ones(n));
  return out;
}

/// hat(z) * exp(sign * xi(t,z)); the exponential is never expanded.
struct WaveSymbol {
  ZSeries hat;
  int sign = 1;
};

inline std::string render(const ZSeries& s, const JetStyle& style) {
  return s.render([&](const DiffPoly& c) { return render(c, style); });
}

inline std::string render(const WaveSymbol& w, const JetStyle& style) {
  return "(" + render(w.hat, style) + ")*exp(" + (w.sign > 0 ? "+" : "-") + "xi)";
}

/// psi e^{sign xi} = (sum f_alpha (sign z)^alpha) e^{sign xi}.
inline ZSeries symbol_of(const PsdOp& psi, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("symbol_of: sign must be +1 or -1");
  const std::size_t n = psi.dimension();
  ZSeries s(n, {"z"});
  s.set_precision(psi.window(), psi.bound(), {std::nullopt});
  for (const auto& [e, c] : psi.terms()) {
    const bool odd = sign < 0 && (e.total() % 2 != 0);
    s.add_term(e, odd ? -c : c);
  }
  return s;
}

/// Inverse of symbol_of for sign +1: read a z-series as an operator.
inline PsdOp operator_of(const ZSeries& s) {
  if (s.groups().size() != 1) throw DimensionError("operator_of expects a series in z only");
  PsdOp::TermMap t(s.terms().begin(), s.terms().end());
  return PsdOp::from_terms(s.dimension(), std::move(t), s.window(), s.bound());
}

inline WaveSymbol plain_wave(std::size_t n, int sign) {
  return WaveSymbol{ZSeries::constant(n, {"z"}, DiffPoly(1)), sign};
}

/// psi (g e^{sign xi}) = (sum f_alpha C(alpha,gamma) (d^gamma g) (sign z)^{alpha-gamma}) e^{sign xi}.
inline WaveSymbol apply_to_wave(const PsdOp& psi, const WaveSymbol& w,
                                const std::optional<Window>& requested = std::nullopt) {
  const ZSeries& g = w.hat;
  if (g.groups().size() != 1) throw DimensionError("apply_to_wave: hat part must be a series in z only");
  if (g.dimension() != psi.dimension()) throw DimensionError("apply_to_wave: dimension mismatch");
  const std::size_t n = psi.dimension();
  Window mu = detail::leibniz_window(psi.window(), psi.bound(), g.window(), g.bound(), requested);
  detail::require_finite_tails(psi.terms(), g.terms(), mu);

  ZSeries out(n, {"z"});
  out.set_precision(mu, bound_add(psi.bound(), g.bound()), g.caps());
  for (const auto& [beta, h] : g.terms()) {
    detail::DerivativeTable derivs(h);
    const bool constant = h.is_constant();
    for (const auto& [alpha, f] : psi.terms()) {
      auto lim = detail::gamma_limits(alpha, beta, mu, constant);
      detail::for_each_gamma(lim, [&](const MultiIndex& gamma) {
        Rational coef = mi_binomial(alpha, gamma);
        if (is_zero(coef)) return;
        if (w.sign < 0 && (alpha - gamma).total() % 2 != 0) coef = -coef;
        const DiffPoly& dh = derivs.get(gamma);
        if (dh.is_zero()) return;
        out.add_term(alpha + beta - gamma, coef * (f * dh));
      });
    }
  }
  return WaveSymbol{out, w.sign};
}

/// Window on which Res_d of psi * eta^* is provably known, and the adjoint
/// window it needs.
struct PairResidue {
  DiffPoly lhs;
  DiffPoly rhs;
  bool equal = false;
};

/// Res_z (psi e^{xi})(eta e^{-xi}) against Res_d psi eta^*.
inline PairResidue pair_residue_check(const PsdOp& psi, const PsdOp& eta) {
  detail::check_same_dim(psi, eta);
  const std::size_t n = psi.dimension();
  PairResidue r;
  ZSeries prod = symbol_of(psi, 1) * symbol_of(eta, -1);
  r.lhs = res_z(prod);

  // eta^* is only needed down to -1 - nu(psi); the product only at -1.
  std::vector<int> need(n);
  for (std::size_t i = 0; i < n; ++i) need[i] = is_finite(psi.bound()[i]) ? -1 - std::max(psi.bound()[i], 0) : -1;
  PsdOp eta_star = ps_adjoint(eta, Window(need));
  PsdOp rho = ps_mul(psi, eta_star, Window::box(n, -1));
  r.rhs = ps_res_partial(rho);
  r.equal = r.lhs == r.rhs;
  return r;
}

/// w = phi e^{xi}.
inline WaveSymbol baker_from_phi(const PsdOp& phi) {
  const MultiIndex zero = MultiIndex::zero(phi.dimension());
  if (!phi.window().contains(zero) || phi.coefficient(zero) != DiffPoly(1) || !ps_in_pminus(ps_sub(phi, PsdOp::one(phi.dimension()))))
    throw DomainError("baker_from_phi: phi must lie in 1 + P_-");
  return WaveSymbol{symbol_of(phi, 1), 1};
}

/// w^* = (phi^*)^{-1} e^{-xi}.
inline WaveSymbol adjoint_baker(const PsdOp& phi, const std::optional<Window>& requested = std::nullopt) {
  PsdOp inv = ps_inverse(ps_adjoint(phi, requested), requested);
  return WaveSymbol{symbol_of(inv, -1), -1};
}

struct BilinearReport {
  LaurentSeries<DiffPoly> residue;  // series in s
  bool zero = false;
  std::optional<MultiIndex> witness;
  Window z_window;
};

namespace detail {

inline LaurentSeries<DiffPoly> derive_series(const LaurentSeries<DiffPoly>& f, const MultiIndex& dir,
                                             EvolutionaryDeriver& d) {
  return f.map_coefficients([&](const DiffPoly& c) { return d.derive(c, dir); });
}

}  // namespace detail

/// Res_z w(t', z) w^*(t, z) with t' = t - [s^{-1}] over the given shift
/// indices (alpha >= 1), expanded to inverse s-degree T. `rules` must give the
/// t_alpha flows of phi's coefficients (e.g. from the dressing relation). The
/// residue must vanish identically.
inline BilinearReport bilinear_check(const PsdOp& phi, const FlowRules& rules, const std::vector<MultiIndex>& shifts,
                                     int T) {
  const std::size_t n = phi.dimension();
  const std::vector<std::string> zs{"z", "s"};
  for (const auto& a : shifts)
    if (!mi_all_positive(a)) throw DomainError("bilinear_check: unsupported shift index (" + a.to_string() + ")");

  // exp(sum delta_alpha z^alpha), delta_alpha = -alpha^{-1} s^{-alpha}
  LaurentSeries<DiffPoly> kernel(n, zs);
  kernel = kernel.with_cap(1, T);
  for (const auto& a : shifts) {
    if (a.total() > T) continue;
    std::vector<int> e(a.begin(), a.end());
    for (int v : a) e.push_back(-v);
    kernel.add_term(MultiIndex(std::move(e)), DiffPoly(-mi_inverse_product(a)));
  }
  kernel.refresh_bound();
  auto expo = series_exp(kernel);
  {
    // z^alpha always comes with s^{-alpha}: under the s-cap no z-exponent exceeds T
    Bound b = expo.bound();
    for (std::size_t i = 0; i < n; ++i) b[i] = std::min(b[i], T);
    for (std::size_t i = n; i < 2 * n; ++i) b[i] = std::min(b[i], 0);
    expo = expo.with_bound(b);
  }

  WaveSymbol w = baker_from_phi(phi);
  WaveSymbol ws = adjoint_baker(phi);

  // z-exponents up to nu(expo) meet both hats; everything deeper than
  // -1 - nu(expo) - nu(other) cannot reach z^{-1}.
  Bound nz(n, 0);
  for (std::size_t i = 0; i < n; ++i) nz[i] = std::max(0, expo.bound()[i]);
  std::vector<int> mw(n), ms(n);
  for (std::size_t i = 0; i < n; ++i) {
    mw[i] = -1 - nz[i] - std::max(0, ws.hat.bound()[i]);
    ms[i] = -1 - nz[i] - std::max(0, w.hat.bound()[i]);
  }
  ZSeries what = w.hat.with_window(Window(mw), w.hat.bound());
  ZSeries wstar = ws.hat.with_window(Window(ms), ws.hat.bound());

  // Taylor expansion of what(t + delta)
  detail::EvolutionaryDeriver deriver(rules);
  auto base = embed(what, zs).with_cap(1, T);
  auto shifted = base;
  auto term = base;
  for (int k = 1;; ++k) {
    LaurentSeries<DiffPoly> next(n, zs);
    next = next.with_cap(1, T);
    next.set_precision(term.window(), term.bound(), term.caps());
    bool any = false;
    for (const auto& a : shifts) {
      if (a.total() > T) continue;
      std::vector<int> e(n, 0);
      for (int v : a) e.push_back(-v);
      auto delta = LaurentSeries<DiffPoly>::monomial(n, zs, MultiIndex(std::move(e)), DiffPoly(-mi_inverse_product(a)));
      // only terms that survive the s-cap after multiplying by s^{-a}
      LaurentSeries<DiffPoly> live(n, zs);
      live.set_precision(term.window(), term.bound(), term.caps());
      for (const auto& [e, c] : term.terms()) {
        int sdeg = 0;
        for (std::size_t i = 0; i < n; ++i) sdeg -= e[n + i];
        if (sdeg + a.total() <= T) live.add_term(e, c);
      }
      if (live.is_zero()) continue;
      LaurentSeries<DiffPoly> d;
      try {
        d = detail::derive_series(live, a, deriver);
      } catch (const MissingRuleError& ex) {
        throw WindowError(std::string("bilinear_check: dressing ansatz too shallow for the requested degree: ") + ex.what());
      }
      next = next + delta.with_cap(1, T) * d;
      any = true;
    }
    if (!any) break;
    term = Rational(1, k) * next;
    if (term.is_zero()) break;
    shifted = shifted + term;
  }

  auto product = shifted * expo * embed(wstar, zs).with_cap(1, T);
  BilinearReport r;
  r.z_window = Window(std::vector<int>(product.window().lower().begin(), product.window().lower().begin() + static_cast<long>(n)));
  r.residue = residue(product, "z");
  r.zero = r.residue.is_zero();
  if (!r.zero) {
    auto zero = LaurentSeries<DiffPoly>(n, {"s"});
    r.witness = first_difference(r.residue, zero.with_cap(0, T));
  }
  return r;
}

}  // namespace psdo
