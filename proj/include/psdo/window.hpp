#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "multi_index.hpp"

namespace psdo {

/// Sentinel for an unbounded component: "exact" in a window, "no terms" in a bound.
inline constexpr int kUnbounded = std::numeric_limits<int>::min() / 4;

inline bool is_finite(int v) { return v != kUnbounded; }

inline int saturating_add(int a, int b) {
  if (!is_finite(a) || !is_finite(b)) return kUnbounded;
  return a + b;
}

/// Per-component lower truncation bounds mu. Exponents alpha with alpha_i >= mu_i
/// for every finite mu_i are known exactly; anything else is unknown.
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<int> lower) : lower_(std::move(lower)) {}

  static Window exact(std::size_t n) { return Window(std::vector<int>(n, kUnbounded)); }
  static Window box(std::size_t n, int lower) { return Window(std::vector<int>(n, lower)); }
  static Window last(std::size_t n, int lower) {
    Window w = exact(n);
    w.lower_.at(n - 1) = lower;
    return w;
  }

  std::size_t size() const { return lower_.size(); }
  int operator[](std::size_t i) const { return lower_[i]; }
  int& operator[](std::size_t i) { return lower_[i]; }
  const std::vector<int>& lower() const { return lower_; }

  bool finite(std::size_t i) const { return is_finite(lower_[i]); }
  bool is_exact() const {
    return std::none_of(lower_.begin(), lower_.end(), [](int v) { return is_finite(v); });
  }

  bool contains(const MultiIndex& a) const {
    for (std::size_t i = 0; i < lower_.size(); ++i)
      if (is_finite(lower_[i]) && a[i] < lower_[i]) return false;
    return true;
  }

  /// True when every exponent known under `inner` is known here too.
  bool covers(const Window& inner) const {
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!is_finite(lower_[i])) continue;
      if (!is_finite(inner[i]) || inner[i] < lower_[i]) return false;
    }
    return true;
  }

  /// Intersection of known regions: componentwise max.
  friend Window meet(const Window& a, const Window& b) {
    if (a.size() != b.size()) throw DimensionError("window dimension mismatch");
    Window r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r.lower_[i] = std::max(a[i], b[i]);
    return r;
  }

  friend bool operator==(const Window&, const Window&) = default;

  /// "*,-2": `*` marks an exact component.
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (i) out += ',';
      out += is_finite(lower_[i]) ? std::to_string(lower_[i]) : "*";
    }
    return out;
  }

 private:
  std::vector<int> lower_;
};

/// Declared componentwise upper bound nu on the (true, untruncated) support.
/// A kUnbounded component means the operand has no terms at all.
using Bound = std::vector<int>;

inline Bound empty_bound(std::size_t n) { return Bound(n, kUnbounded); }

inline Bound bound_max(const Bound& a, const Bound& b) {
  Bound r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

inline Bound bound_add(const Bound& a, const Bound& b) {
  Bound r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = saturating_add(a[i], b[i]);
  return r;
}

inline bool bound_is_empty(const Bound& b) {
  return std::all_of(b.begin(), b.end(), [](int v) { return !is_finite(v); });
}

/// Output window of a product: mu_i = max(mu_a,i + nu_b,i, mu_b,i + nu_a,i).
/// A discarded input term lies below mu in some finite component, and the
/// Leibniz correction gamma >= 0 never raises exponents, so nothing it touches
/// can land inside this window.
inline Window product_window(const Window& wa, const Bound& na, const Window& wb, const Bound& nb) {
  std::vector<int> mu(wa.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    mu[i] = std::max(saturating_add(wa[i], nb[i]), saturating_add(wb[i], na[i]));
  return Window(std::move(mu));
}

inline std::string bound_to_string(const Bound& b) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ',';
    out += is_finite(b[i]) ? std::to_string(b[i]) : "-inf";
  }
  return out;
}

}  // namespace psdo
