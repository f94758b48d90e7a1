#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace psdo {

/// Element of Z^n: exponents of d and z monomials, and indices of the time
/// variables t_alpha. Ordered lexicographically so it can key sorted maps;
/// the componentwise partial order is `mi_leq`.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : c_(n, 0) {}
  MultiIndex(std::initializer_list<int> values) : c_(values) {}
  explicit MultiIndex(std::vector<int> values) : c_(std::move(values)) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(n); }
  static MultiIndex ones(std::size_t n) { return filled(n, 1); }
  static MultiIndex filled(std::size_t n, int v) { return MultiIndex(std::vector<int>(n, v)); }
  static MultiIndex unit(std::size_t n, std::size_t i) {
    MultiIndex e(n);
    e.c_.at(i) = 1;
    return e;
  }

  std::size_t size() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_[i]; }
  int& operator[](std::size_t i) { return c_[i]; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }
  const std::vector<int>& components() const { return c_; }

  /// |alpha| = alpha_1 + ... + alpha_n
  int total() const { return std::accumulate(c_.begin(), c_.end(), 0); }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](int v) { return v == 0; });
  }

  MultiIndex& operator+=(const MultiIndex& o) {
    check_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  MultiIndex& operator-=(const MultiIndex& o) {
    check_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }
  MultiIndex operator-() const {
    MultiIndex r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend MultiIndex operator*(int k, MultiIndex a) {
    for (auto& v : a.c_) v *= k;
    return a;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  /// "1,-2,0"
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(c_[i]);
    }
    return out;
  }

 private:
  void check_dim(const MultiIndex& o) const {
    if (o.size() != size()) throw DimensionError("multi-index dimension mismatch");
  }
  std::vector<int> c_;
};

/// Componentwise alpha <= beta.
inline bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("multi-index dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/// alpha >= 0 and |alpha| >= 1
inline bool mi_in_zplus(const MultiIndex& a) {
  return mi_leq(MultiIndex::zero(a.size()), a) && a.total() >= 1;
}

/// alpha >= (1,...,1)
inline bool mi_all_positive(const MultiIndex& a) {
  return std::all_of(a.begin(), a.end(), [](int v) { return v >= 1; });
}

/// Generalized binomial C(top, k) = top (top-1) ... (top-k+1) / k!, any integer top.
inline Rational binomial(int top, int k) {
  if (k < 0) throw DomainError("binomial with negative lower index");
  Integer num = 1;
  Integer den = 1;
  for (int i = 0; i < k; ++i) {
    num *= top - i;
    den *= i + 1;
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Product over components of C(alpha_i, gamma_i); gamma must be >= 0.
inline Rational mi_binomial(const MultiIndex& alpha, const MultiIndex& gamma) {
  if (alpha.size() != gamma.size()) throw DimensionError("multi-index dimension mismatch");
  Rational r = 1;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (gamma[i] < 0) throw DomainError("mi_binomial: gamma has a negative component");
    r *= binomial(alpha[i], gamma[i]);
    if (is_zero(r)) break;
  }
  return r;
}

/// alpha^{-1} = 1 / (alpha_1 ... alpha_n); undefined when a component is zero.
inline Rational mi_inverse_product(const MultiIndex& alpha) {
  Integer p = 1;
  for (int v : alpha) {
    if (v == 0) throw DomainError("alpha^{-1} undefined: zero component in " + alpha.to_string());
    p *= v;
  }
  Rational r(Integer(1), p);
  r.canonicalize();
  return r;
}

/// Multinomial |beta|! / (beta_1! ... beta_n!) for beta >= 0.
inline Integer multinomial(const MultiIndex& beta) {
  Integer r = 1;
  int running = 0;
  for (int b : beta) {
    if (b < 0) throw DomainError("multinomial of a negative index");
    for (int j = 1; j <= b; ++j) {
      ++running;
      r *= running;
      r /= j;
    }
  }
  return r;
}

/// All alpha >= 0 with |alpha| == d, in lexicographically decreasing order.
inline std::vector<MultiIndex> compositions(std::size_t n, int d) {
  std::vector<MultiIndex> out;
  if (d < 0 || n == 0) return out;
  MultiIndex cur(n);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == n) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, d);
  return out;
}

}  // namespace psdo
