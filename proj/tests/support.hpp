#pragma once

// Shared helpers for the test binaries: seeded random operators and
// conversion of n = 1 coefficients into the reference implementation.

#include <psdo/psdo.hpp>

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "oracle_n1.hpp"

namespace psdo {

// readable gtest failure messages
inline void PrintTo(const MultiIndex& m, std::ostream* os) { *os << "(" << m.to_string() << ")"; }
inline void PrintTo(const Window& w, std::ostream* os) { *os << "window(" << w.to_string() << ")"; }
inline void PrintTo(const DiffPoly& p, std::ostream* os) { *os << render(p, JetStyle::standard(2)); }
inline void PrintTo(const PsdOp& a, std::ostream* os) { *os << render(a, JetStyle::standard(a.dimension())); }

}  // namespace psdo

namespace testing_support {

using namespace psdo;

class Random {
 public:
  explicit Random(unsigned seed) : g_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(g_); }

  Rational rational() {
    int num = uniform(-4, 4);
    if (num == 0) num = 1;
    Rational r(num, uniform(1, 3));
    r.canonicalize();
    return r;
  }

  // sparse polynomial in a few symbols and their first x/y jets
  DiffPoly diffpoly(std::size_t n, int max_terms = 2) {
    static const char* names[] = {"f", "g", "h"};
    DiffPoly p;
    const int terms = uniform(0, max_terms);
    for (int t = 0; t < terms; ++t) {
      DiffPoly m(rational());
      const int factors = uniform(0, 2);
      for (int k = 0; k < factors; ++k) {
        JetVariable v(names[uniform(0, 2)]);
        if (coin(0.3)) v = v.derived(MultiIndex::unit(n, static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1))));
        m = m * jet(v);
      }
      p += m;
    }
    return p;
  }

  // operator with exponents in [lo, hi] per component, known on box(lo)
  PsdOp op(std::size_t n, int lo, int hi, int max_terms = 4) {
    PsdOp::TermMap t;
    const int terms = uniform(1, max_terms);
    for (int k = 0; k < terms; ++k) {
      std::vector<int> e(n);
      for (auto& v : e) v = uniform(lo, hi);
      DiffPoly c = diffpoly(n);
      if (c.is_zero()) c = DiffPoly(rational());
      t[MultiIndex(std::move(e))] += c;
    }
    Bound b(n, hi);
    return PsdOp::from_terms(n, std::move(t), Window::box(n, lo), b);
  }

  // exact differential operator (no negative exponents)
  PsdOp differential(std::size_t n, int hi, int max_terms = 3) {
    PsdOp::TermMap t;
    const int terms = uniform(1, max_terms);
    for (int k = 0; k < terms; ++k) {
      std::vector<int> e(n);
      for (auto& v : e) v = uniform(0, hi);
      DiffPoly c = diffpoly(n);
      if (c.is_zero()) c = DiffPoly(rational());
      t[MultiIndex(std::move(e))] += c;
    }
    return PsdOp::from_terms(n, std::move(t));
  }

  std::mt19937& engine() { return g_; }

 private:
  std::mt19937 g_;
};

// n = 1 coefficient -> reference polynomial (jets are x-derivatives only)
inline oracle::Poly to_oracle(const DiffPoly& p) {
  oracle::Poly r;
  for (const auto& [m, c] : p.terms()) {
    oracle::Poly t = oracle::constant(c);
    for (const auto& [v, e] : m.factors())
      for (int i = 0; i < e; ++i) t = t * oracle::jet(v.symbol, v.order());
    r = r + t;
  }
  return r;
}

inline oracle::Op to_oracle(const PsdOp& a) {
  oracle::Op r;
  r.low = is_finite(a.window()[0]) ? a.window()[0] : -1000;
  for (const auto& [e, c] : a.terms()) r.c[e[0]] = to_oracle(c);
  return r;
}

inline oracle::Poly coefficient_or_zero(const oracle::Op& a, int k) {
  auto it = a.c.find(k);
  return it == a.c.end() ? oracle::Poly{} : it->second;
}

inline ParseContext context(std::size_t n) { return ParseContext(n); }

inline PsdOp op(const std::string& text, std::size_t n = 2) { return parse_operator(text, ParseContext(n)); }
inline DiffPoly poly(const std::string& text, std::size_t n = 2) { return parse_diffpoly(text, ParseContext(n)); }

}  // namespace testing_support
