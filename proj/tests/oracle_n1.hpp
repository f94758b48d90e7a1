#pragma once

// Single-variable reference implementation, written without the engine:
// jets u^(k) of named functions of x, polynomials in them, operators
// sum f_k D^k cut below a fixed order, and the dressing flows of the KP
// hierarchy. Used to cross-check the multivariate engine at n = 1.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;

// (name, number of x-derivatives)
using Jet = std::pair<std::string, int>;
// multiset of jets, kept sorted
using Mono = std::vector<Jet>;
// a struct rather than an alias so the operators below are found by ADL
struct Poly : std::map<Mono, Q> {};

inline void add(Poly& p, const Mono& m, const Q& c) {
  if (c == 0) return;
  auto& slot = p[m];
  slot += c;
  if (slot == 0) p.erase(m);
}

inline Poly constant(const Q& c) {
  Poly p;
  add(p, {}, c);
  return p;
}

inline Poly jet(const std::string& name, int k = 0) {
  Poly p;
  add(p, {{name, k}}, 1);
  return p;
}

inline Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b) add(r, m, c);
  return r;
}

inline Poly scale(const Q& k, const Poly& a) {
  Poly r;
  for (const auto& [m, c] : a) add(r, m, k * c);
  return r;
}

inline Poly operator-(const Poly& a, const Poly& b) { return a + scale(-1, b); }

inline Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Mono m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      add(r, m, ca * cb);
    }
  return r;
}

// derivation fixed by its value on each jet
template <class F>
Poly derive(const Poly& p, F&& on_jet) {
  Poly r;
  for (const auto& [m, c] : p)
    for (std::size_t i = 0; i < m.size(); ++i) {
      Poly rest = constant(c);
      for (std::size_t j = 0; j < m.size(); ++j)
        if (j != i) rest = rest * jet(m[j].first, m[j].second);
      r = r + rest * on_jet(m[i]);
    }
  return r;
}

inline Poly dx(const Poly& p) {
  return derive(p, [](const Jet& j) { return jet(j.first, j.second + 1); });
}

inline Poly dx(Poly p, int k) {
  for (int i = 0; i < k; ++i) p = dx(p);
  return p;
}

inline Q binom(int top, int k) {
  Q r = 1;
  for (int i = 0; i < k; ++i) r = r * Q(top - i) / Q(i + 1);
  return r;
}

// sum f_k D^k with every order >= low known
struct Op {
  std::map<int, Poly> c;
  int low = -1000;
};

inline Op trim(Op a) {
  for (auto it = a.c.begin(); it != a.c.end();)
    it = (it->first < a.low || it->second.empty()) ? a.c.erase(it) : std::next(it);
  return a;
}

inline Op operator+(const Op& a, const Op& b) {
  Op r = a;
  r.low = std::max(a.low, b.low);
  for (const auto& [k, f] : b.c) r.c[k] = r.c[k] + f;
  return trim(r);
}

inline Op scale(const Q& k, const Op& a) {
  Op r = a;
  for (auto& [e, f] : r.c) f = scale(k, f);
  return trim(r);
}

inline Op operator-(const Op& a, const Op& b) { return a + scale(-1, b); }

// f D^i * g D^j = sum_m C(i,m) f g^(m) D^{i+j-m}, kept for orders >= low
inline Op mul(const Op& a, const Op& b, int low) {
  Op r;
  r.low = low;
  for (const auto& [i, f] : a.c)
    for (const auto& [j, g] : b.c)
      for (int m = 0; i + j - m >= low; ++m) {
        if (i >= 0 && m > i) break;
        r.c[i + j - m] = r.c[i + j - m] + scale(binom(i, m), f * dx(g, m));
      }
  return trim(r);
}

inline Op plus_part(const Op& a) {
  Op r;
  r.low = -1000;
  for (const auto& [k, f] : a.c)
    if (k >= 0) r.c[k] = f;
  return r;
}

inline Op minus_part(const Op& a) {
  Op r = a;
  for (auto it = r.c.begin(); it != r.c.end();) it = it->first >= 0 ? r.c.erase(it) : std::next(it);
  return r;
}

// Dressing phi = 1 + w1 D^-1 + ... + wN D^-N; all work is done to order
// -N, the deepest layer phi determines.
struct Kp {
  int depth;
  Op phi, inv, lax;

  explicit Kp(int n) : depth(n) {
    phi.low = -depth;
    phi.c[0] = constant(1);
    for (int k = 1; k <= depth; ++k) phi.c[-k] = jet("w" + std::to_string(k));
    // phi^{-1} = sum (1 - phi)^m
    Op r = scale(-1, phi);
    r.c.erase(0);
    inv.low = -depth;
    inv.c[0] = constant(1);
    Op power = inv;
    for (int m = 1; m <= depth; ++m) {
      power = mul(power, r, -depth);
      inv = inv + power;
    }
    // L = D - phi_x phi^{-1}
    Op phix;
    phix.low = -depth;
    for (const auto& [k, f] : phi.c)
      if (k != 0) phix.c[k] = dx(f);
    Op d;
    d.c[1] = constant(1);
    lax = d - mul(phix, inv, -depth);
  }

  // L^alpha; each factor of L costs one layer of precision
  Op power(int alpha) const {
    Op r;
    r.c[0] = constant(1);
    for (int i = 0; i < alpha; ++i) r = mul(r, lax, -depth + i);
    return r;
  }

  // d w_k / d t_alpha = - ((L^alpha)_- phi) at D^-k
  std::map<std::string, Poly> rules(int alpha) const {
    Op lm = minus_part(power(alpha));
    Op rhs = scale(-1, mul(lm, phi, lm.low));
    std::map<std::string, Poly> out;
    for (int k = 1; k <= depth && -k >= rhs.low; ++k) out["w" + std::to_string(k)] = rhs.c.count(-k) ? rhs.c.at(-k) : Poly{};
    return out;
  }

  static Poly flow(const Poly& p, const std::map<std::string, Poly>& rules) {
    return derive(p, [&](const Jet& j) {
      auto it = rules.find(j.first);
      if (it == rules.end()) throw std::runtime_error("oracle: no rule for " + j.first);
      return dx(it->second, j.second);
    });
  }

  // d L / d t_alpha and [L^alpha_+, L], both on orders >= low
  std::pair<Op, Op> lax_sides(int alpha, int low) const {
    // L at D^-k uses w1..wk; the rules reach w_{depth-alpha+1}
    if (low < alpha - 1 - depth) throw std::runtime_error("oracle: order below what the depth determines");
    auto r = rules(alpha);
    Op lhs;
    lhs.low = low;
    for (const auto& [k, f] : lax.c)
      if (k >= low) lhs.c[k] = flow(f, r);
    Op lp = plus_part(power(alpha));
    Op rhs = mul(lp, lax, low) - mul(lax, lp, low);
    rhs.low = low;
    return {trim(lhs), trim(rhs)};
  }
};

}  // namespace oracle
