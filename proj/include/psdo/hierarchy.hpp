#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "multi_index.hpp"
#include "operator.hpp"
#include "window.hpp"

namespace psdo {

/// (L_1, ..., L_n), each of the form d_i + u_i with u_i in P_-.
struct LaxTuple {
  std::vector<PsdOp> components;
  std::size_t dimension() const { return components.empty() ? 0 : components[0].dimension(); }
  const PsdOp& operator[](std::size_t i) const { return components.at(i); }
};

enum class AnsatzKind { PMinus, PHat, NonPositive };

/// Generic dressing operator 1 + sum w_alpha d^alpha with a fresh symbol per
/// exponent, over every exponent of the chosen kind inside the box
/// [-depth, ...]. n = 1 names the symbols w1, w2, ...; otherwise w1_2 stands
/// for the exponent (-1,-2). PMinus additionally allows non-last exponents in
/// [0, upper], and is then exact in those components. NonPositive takes every
/// exponent with e_i <= 0 and e_n <= -1 inside the box.
inline PsdOp dressing_ansatz(std::size_t n, int depth, AnsatzKind kind = AnsatzKind::PHat, int upper = 0,
                             const std::string& prefix = "w") {
  if (n == 0 || depth < 1) throw DomainError("dressing_ansatz: need n >= 1 and depth >= 1");
  PsdOp::TermMap t;
  t.emplace(MultiIndex::zero(n), DiffPoly(1));
  const bool hat = kind != AnsatzKind::PMinus || n == 1;
  auto name = [&](const MultiIndex& e) {
    std::string s = prefix;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += "_";
      s += std::to_string(hat || i + 1 == n ? -e[i] : e[i]);
    }
    return s;
  };
  std::vector<int> lo(n), hi(n);
  if (hat) {
    std::fill(lo.begin(), lo.end(), -depth);
    std::fill(hi.begin(), hi.end(), kind == AnsatzKind::NonPositive ? 0 : -1);
    hi[n - 1] = -1;
  } else {
    std::fill(lo.begin(), lo.end(), 0);
    std::fill(hi.begin(), hi.end(), upper);
    lo[n - 1] = -depth;
    hi[n - 1] = -1;
  }
  MultiIndex e(lo);
  while (true) {
    t.emplace(e, symbol(name(e)));
    std::size_t i = 0;
    while (i < n && e[i] == hi[i]) {
      e[i] = lo[i];
      ++i;
    }
    if (i == n) break;
    ++e[i];
  }
  Window w = hat ? Window::box(n, -depth) : Window::last(n, -depth);
  return PsdOp::from_terms(n, std::move(t), w);
}

/// L_i = phi d_i phi^{-1}; the leading form is asserted.
inline LaxTuple dress(const PsdOp& phi, const std::optional<Window>& requested = std::nullopt) {
  const std::size_t n = phi.dimension();
  PsdOp inv = ps_inverse(phi, requested);
  LaxTuple lax;
  for (std::size_t i = 0; i < n; ++i) {
    // phi d_i phi^{-1} = d_i - (d_i phi) phi^{-1}; d_i phi lies in P_- like phi - 1
    PsdOp dphi = ps_derive(phi, MultiIndex::unit(n, i));
    Bound b = dphi.bound();
    b[n - 1] = std::min(b[n - 1], -1);
    PsdOp li = ps_sub(PsdOp::partial(n, i), ps_mul(dphi.with_bound(b), inv, requested));
    const MultiIndex ei = MultiIndex::unit(n, i);
    if (!li.window().contains(ei))
      throw WindowError("dress: window too small to see the leading term of L_" + std::to_string(i + 1));
    if (li.coefficient(ei) != DiffPoly(1))
      throw DomainError("dress: L_" + std::to_string(i + 1) + " does not start with d_" + std::to_string(i + 1));
    PsdOp rest = ps_sub(li, PsdOp::partial(n, i));
    if (!ps_in_pminus(rest))
      throw DomainError("dress: L_" + std::to_string(i + 1) + " - d_" + std::to_string(i + 1) + " is not in P_-");
    lax.components.push_back(std::move(li));
  }
  return lax;
}

/// Set every jet of the named symbols to zero.
inline DiffPoly at_instant(const DiffPoly& p, const std::set<std::string>& vanishing) {
  if (vanishing.empty()) return p;
  return p.substitute([&](const JetVariable& v) -> std::optional<DiffPoly> {
    if (vanishing.count(v.symbol)) return DiffPoly();
    return std::nullopt;
  });
}

inline PsdOp at_instant(const PsdOp& op, const std::set<std::string>& vanishing) {
  if (vanishing.empty()) return op;
  return op.map_coefficients([&](const DiffPoly& c) { return at_instant(c, vanishing); });
}

/// Dressing ansatz for phi in 1 + \hat P_- at one instant: the coefficients
/// of the surrounding non-positive region are kept as symbols (their flows
/// need not vanish) and listed as zero at that instant.
struct InstantAnsatz {
  PsdOp phi;
  std::set<std::string> vanishing;
};

inline InstantAnsatz phat_instant_ansatz(std::size_t n, int depth, const std::string& prefix = "w") {
  InstantAnsatz a;
  a.phi = dressing_ansatz(n, depth, AnsatzKind::NonPositive, 0, prefix);
  const MultiIndex m1 = -MultiIndex::ones(n);
  for (const auto& [e, c] : a.phi.terms())
    if (!e.is_zero() && !mi_leq(e, m1)) a.vanishing.insert(c.as_variable()->symbol);
  return a;
}

struct FlowRuleSet {
  FlowRules rules;
  Window window;  // exponents of phi whose flow is known exactly
  PsdOp rhs;      // -(phi d^alpha phi^{-1})_- phi
};

/// Flows d phi / d t_alpha = -(phi d^alpha phi^{-1})_- phi read off on a
/// generic ansatz; only exponents inside the right-hand side's window get rules.
///
/// `vanishing` names coefficients that are zero at the instant considered
/// (e.g. the part of phi outside \hat P_-). Flow terms that leave the ansatz
/// are then allowed as long as they vanish at that instant.
inline FlowRuleSet w4_rules(const PsdOp& phi, const MultiIndex& alpha, const std::set<std::string>& vanishing = {}) {
  const std::size_t n = phi.dimension();
  if (alpha.size() != n || !mi_in_zplus(alpha)) throw DomainError("w4_rules: alpha must lie in Z^n_+");
  const MultiIndex zero = MultiIndex::zero(n);
  for (const auto& [e, c] : phi.terms()) {
    if (e == zero) {
      if (c != DiffPoly(1)) throw DomainError("w4_rules: phi must be unital");
      continue;
    }
    auto v = c.as_variable();
    if (!v || !v->is_base()) throw DomainError("w4_rules: coefficient at (" + e.to_string() + ") is not a bare symbol");
  }
  // phi d^alpha phi^{-1} = L^alpha keeps a wider window than the literal product
  LaxTuple lax = dress(phi);
  PsdOp conj = ps_power_multi(lax.components, alpha);
  PsdOp rhs = ps_neg(ps_mul(ps_minus(conj), phi));

  FlowRuleSet out;
  out.window = rhs.window();
  out.rhs = rhs;
  for (const auto& [e, c] : rhs.terms()) {
    auto it = phi.terms().find(e);
    if (it != phi.terms().end() && e != zero) continue;
    if (!vanishing.empty() && at_instant(c, vanishing).is_zero()) continue;
    throw DomainError("w4_rules: flow leaves the ansatz at exponent (" + e.to_string() + ")");
  }
  for (const auto& [e, c] : phi.terms()) {
    if (e == zero || !rhs.window().contains(e)) continue;
    out.rules.set(c.as_variable()->symbol, alpha, rhs.coefficient(e));
  }
  return out;
}

inline FlowRules merged_rules(const PsdOp& phi, const std::vector<MultiIndex>& alphas,
                              const std::set<std::string>& vanishing = {}) {
  FlowRules r;
  for (const auto& a : alphas) r.merge(w4_rules(phi, a, vanishing).rules);
  return r;
}

struct CheckReport {
  bool ok = true;
  std::size_t component = 0;
  std::optional<MultiIndex> witness;
  DiffPoly lhs;
  DiffPoly rhs;
};

namespace detail {

inline void require_cover(const PsdOp& op, const Window& w, const std::string& what) {
  if (!op.window().covers(w))
    throw WindowError(what + " is only known on window " + op.window().to_string() + ", not on " + w.to_string());
}

inline PsdOp derive_on(const PsdOp& op, const MultiIndex& dir, const FlowRules& rules) {
  try {
    return ps_derive(op, dir, &rules);
  } catch (const MissingRuleError& e) {
    throw WindowError(std::string("dressing ansatz too shallow for the comparison window: ") + e.what());
  }
}

inline void compare(CheckReport& r, std::size_t comp, const PsdOp& lhs, const PsdOp& rhs) {
  if (!r.ok) return;
  if (auto d = first_difference(lhs, rhs)) {
    r.ok = false;
    r.component = comp;
    r.witness = *d;
    r.lhs = lhs.coefficient(*d);
    r.rhs = rhs.coefficient(*d);
  }
}

}  // namespace detail

/// d L_i / d t_alpha = [L^alpha_+, L_i] on `window`, for every i.
inline CheckReport lax_check(const PsdOp& phi, const MultiIndex& alpha, const Window& window,
                             const std::set<std::string>& vanishing = {}) {
  const std::size_t n = phi.dimension();
  FlowRules rules = w4_rules(phi, alpha, vanishing).rules;
  LaxTuple lax = dress(phi);
  PsdOp la = ps_plus(ps_power_multi(lax.components, alpha));
  CheckReport r;
  for (std::size_t i = 0; i < n; ++i) {
    detail::require_cover(lax[i], window, "L_" + std::to_string(i + 1));
    PsdOp lhs = detail::derive_on(lax[i].truncated(window), alpha, rules);
    PsdOp rhs = ps_commutator(la, lax[i], window);
    detail::require_cover(rhs, window, "[L^alpha_+, L_" + std::to_string(i + 1) + "]");
    detail::compare(r, i, at_instant(lhs, vanishing), at_instant(rhs.truncated(window), vanishing));
  }
  return r;
}

/// d L^beta_+ / d t_alpha - d L^alpha_+ / d t_beta = [L^alpha_+, L^beta_+] on `window`.
inline CheckReport zs_check(const PsdOp& phi, const MultiIndex& alpha, const MultiIndex& beta, const Window& window,
                            const std::set<std::string>& vanishing = {}) {
  FlowRules rules = w4_rules(phi, alpha, vanishing).rules;
  rules.merge(w4_rules(phi, beta, vanishing).rules);
  LaxTuple lax = dress(phi);
  PsdOp la = ps_plus(ps_power_multi(lax.components, alpha));
  PsdOp lb = ps_plus(ps_power_multi(lax.components, beta));
  detail::require_cover(la, window, "L^alpha_+");
  detail::require_cover(lb, window, "L^beta_+");
  PsdOp lhs = ps_sub(detail::derive_on(lb.truncated(window), alpha, rules),
                     detail::derive_on(la.truncated(window), beta, rules));
  PsdOp rhs = ps_commutator(la, lb, window);
  detail::require_cover(rhs, window, "[L^alpha_+, L^beta_+]");
  CheckReport r;
  detail::compare(r, 0, at_instant(lhs, vanishing), at_instant(rhs.truncated(window), vanishing));
  return r;
}

struct PdeEquation {
  MultiIndex monomial;
  DiffPoly equation;  // = 0
};

struct PdeSystem {
  std::vector<PdeEquation> equations;
  bool empty() const { return equations.empty(); }
  std::size_t size() const { return equations.size(); }
  const PdeEquation* find(const MultiIndex& m) const {
    for (const auto& e : equations)
      if (e.monomial == m) return &e;
    return nullptr;
  }
};

namespace detail {

inline PdeSystem system_from(const PsdOp& op) {
  std::vector<std::pair<MultiIndex, DiffPoly>> order(op.terms().begin(), op.terms().end());
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.first.total() != y.first.total()) return x.first.total() > y.first.total();
    return x.first > y.first;
  });
  PdeSystem sys;
  for (auto& [m, c] : order) sys.equations.push_back({m, c});
  return sys;
}

}  // namespace detail

/// One equation per d-monomial of d_{t_a} B - d_{t_b} A - [A, B], with free jets.
inline PdeSystem extract_pdes(const PsdOp& a, const PsdOp& b, const MultiIndex& ta, const MultiIndex& tb) {
  for (const PsdOp* op : {&a, &b}) {
    if (!op->is_exact()) throw WindowError("extract_pdes: inputs must be exact differential operators");
    if (!ps_minus(*op).is_zero()) throw DomainError("extract_pdes: inputs must have no negative d_n exponents");
  }
  PsdOp d = ps_sub(ps_sub(ps_derive(b, ta), ps_derive(a, tb)), ps_commutator(a, b));
  return detail::system_from(d);
}

/// Substitute jets: J -> F also sends every derivative of J to the same
/// derivative of F. Zero equations are dropped.
inline PdeSystem reduce_system(const PdeSystem& sys, const std::vector<std::pair<JetVariable, DiffPoly>>& relations) {
  auto image = [&](const JetVariable& v) -> std::optional<DiffPoly> {
    for (const auto& [j, f] : relations) {
      JetVariable::Profile rest;
      if (!v.derives_from(j, &rest)) continue;
      DiffPoly r = f;
      for (const auto& [dir, k] : rest) r = dp_derive(r, dir, k);
      return r;
    }
    return std::nullopt;
  };
  PdeSystem out;
  for (const auto& e : sys.equations) {
    DiffPoly q = e.equation.substitute(image);
    if (!q.is_zero()) out.equations.push_back({e.monomial, q});
  }
  return out;
}

}  // namespace psdo
