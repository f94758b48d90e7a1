#pragma once

#include <compare>
#include <map>
#include <string>

#include "multi_index.hpp"
#include "polynomial.hpp"

namespace psdo {

/// The time variable t_alpha, alpha in Z^n_+.
struct TimeVariable {
  MultiIndex index;

  friend bool operator==(const TimeVariable&, const TimeVariable&) = default;
  friend auto operator<=>(const TimeVariable&, const TimeVariable&) = default;
};

using TimePolynomial = Polynomial<TimeVariable>;

inline TimePolynomial time_var(const MultiIndex& alpha, int power = 1) {
  return TimePolynomial::variable(TimeVariable{alpha}, power);
}

inline std::string render_time_var(const TimeVariable& v) { return "t[" + v.index.to_string() + "]"; }

inline std::string render(const TimePolynomial& p) { return p.render(render_time_var); }

/// d/dt_alpha
inline TimePolynomial time_derive(const TimePolynomial& p, const MultiIndex& alpha) {
  return p.derive([&](const TimeVariable& v) { return v.index == alpha ? TimePolynomial(1) : TimePolynomial(); });
}

inline Rational time_eval(const TimePolynomial& p, const std::map<MultiIndex, Rational>& point) {
  return p.evaluate([&](const TimeVariable& v) {
    auto it = point.find(v.index);
    if (it == point.end()) throw DomainError("time variable t[" + v.index.to_string() + "] not assigned");
    return it->second;
  });
}

}  // namespace psdo
