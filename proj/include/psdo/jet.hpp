#pragma once

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "multi_index.hpp"
#include "polynomial.hpp"
#include "rational.hpp"

namespace psdo {

/// A coefficient function symbol together with the t-derivatives taken of it.
/// The profile maps time indices alpha in Z^n_+ to positive orders; x_i is
/// the time variable t_{e_i}.
struct JetVariable {
  using Profile = std::vector<std::pair<MultiIndex, int>>;

  std::string symbol;
  Profile profile;  // sorted by time index, orders > 0

  JetVariable() = default;
  explicit JetVariable(std::string sym, Profile prof = {}) : symbol(std::move(sym)), profile(std::move(prof)) {
    normalize();
  }

  bool is_base() const { return profile.empty(); }
  int order() const {
    int k = 0;
    for (const auto& p : profile) k += p.second;
    return k;
  }
  int order_along(const MultiIndex& dir) const {
    for (const auto& p : profile)
      if (p.first == dir) return p.second;
    return 0;
  }

  JetVariable derived(const MultiIndex& dir, int times = 1) const {
    JetVariable r(*this);
    r.profile.emplace_back(dir, times);
    r.normalize();
    return r;
  }

  /// True when this jet is a (possibly trivial) derivative of `base`; the
  /// leftover derivatives are returned in `rest`.
  bool derives_from(const JetVariable& base, Profile* rest = nullptr) const {
    if (symbol != base.symbol) return false;
    Profile left;
    for (const auto& [dir, k] : profile) {
      int need = base.order_along(dir);
      if (need > k) return false;
      if (k > need) left.emplace_back(dir, k - need);
    }
    for (const auto& [dir, k] : base.profile)
      if (order_along(dir) < k) return false;
    if (rest) *rest = std::move(left);
    return true;
  }

  friend bool operator==(const JetVariable&, const JetVariable&) = default;
  friend auto operator<=>(const JetVariable&, const JetVariable&) = default;

 private:
  void normalize() {
    std::sort(profile.begin(), profile.end());
    Profile merged;
    for (auto& p : profile) {
      if (p.second < 0) throw DomainError("negative derivative order in a jet profile");
      if (p.second == 0) continue;
      if (!merged.empty() && merged.back().first == p.first)
        merged.back().second += p.second;
      else
        merged.push_back(p);
    }
    profile = std::move(merged);
  }
};

/// Differential polynomial: the coefficient ring of operators.
using DiffPoly = Polynomial<JetVariable>;

inline DiffPoly symbol(const std::string& name) { return DiffPoly::variable(JetVariable(name)); }
inline DiffPoly jet(const JetVariable& v) { return DiffPoly::variable(v); }

/// Free derivation along t_dir: every jet gains one derivative in `dir`.
inline DiffPoly dp_derive(const DiffPoly& p, const MultiIndex& dir) {
  return p.derive([&](const JetVariable& v) { return jet(v.derived(dir)); });
}

inline DiffPoly dp_derive(const DiffPoly& p, const MultiIndex& dir, int times) {
  DiffPoly r = p;
  for (int i = 0; i < times && !r.is_zero(); ++i) r = dp_derive(r, dir);
  return r;
}

/// Apply x-derivatives d^gamma (gamma >= 0) coefficientwise.
inline DiffPoly dp_derive_x(const DiffPoly& p, const MultiIndex& gamma) {
  DiffPoly r = p;
  for (std::size_t i = 0; i < gamma.size() && !r.is_zero(); ++i)
    r = dp_derive(r, MultiIndex::unit(gamma.size(), i), gamma[i]);
  return r;
}

inline bool is_x_direction(const MultiIndex& dir) {
  return dir.total() == 1 && std::all_of(dir.begin(), dir.end(), [](int v) { return v == 0 || v == 1; });
}

/// Prescribed t_alpha-derivatives of base symbols: (symbol, alpha) -> F.
/// x-directions are free derivations and are never taken from the table.
class FlowRules {
 public:
  void set(const std::string& sym, const MultiIndex& dir, DiffPoly value) {
    rules_[{sym, dir}] = std::move(value);
  }
  const DiffPoly* find(const std::string& sym, const MultiIndex& dir) const {
    auto it = rules_.find({sym, dir});
    return it == rules_.end() ? nullptr : &it->second;
  }
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }
  const auto& entries() const { return rules_; }

  void merge(const FlowRules& other) {
    for (const auto& [k, v] : other.rules_) rules_[k] = v;
  }

 private:
  std::map<std::pair<std::string, MultiIndex>, DiffPoly> rules_;
};

namespace detail {

class EvolutionaryDeriver {
 public:
  explicit EvolutionaryDeriver(const FlowRules& rules) : rules_(rules) {}

  DiffPoly derive(const DiffPoly& p, const MultiIndex& dir) {
    return p.derive([&](const JetVariable& v) { return derive_jet(v, dir); });
  }

  DiffPoly derive_jet(const JetVariable& v, const MultiIndex& dir) {
    if (is_x_direction(dir)) return jet(v.derived(dir));
    auto key = std::make_pair(v, dir);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const DiffPoly* rule = rules_.find(v.symbol, dir);
    if (!rule)
      throw MissingRuleError("no flow rule for d/dt[" + dir.to_string() + "] of symbol '" + v.symbol + "'");
    // d_dir (D^P v) = D^P (d_dir v): flows commute with each other and with x.
    DiffPoly r = *rule;
    for (const auto& [pdir, k] : v.profile)
      for (int i = 0; i < k; ++i) r = derive(r, pdir);
    cache_.emplace(key, r);
    return r;
  }

 private:
  const FlowRules& rules_;
  std::map<std::pair<JetVariable, MultiIndex>, DiffPoly> cache_;
};

}  // namespace detail

/// Evolutionary derivation: t_dir-derivatives of base symbols come from
/// `rules`, extended to jets and products by commutation and Leibniz.
inline DiffPoly dp_derive(const DiffPoly& p, const MultiIndex& dir, const FlowRules& rules) {
  detail::EvolutionaryDeriver d(rules);
  return d.derive(p, dir);
}

inline Rational dp_eval(const DiffPoly& p, const std::map<JetVariable, Rational>& assignment) {
  return p.evaluate([&](const JetVariable& v) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw DomainError("dp_eval: jet " + v.symbol + " not assigned");
    return it->second;
  });
}

/// Rendering of derivative suffixes. `x`, `y` stand for t[1,0,..] and t[0,1,..];
/// extra aliases (e.g. s = t[1,1]) may be registered.
struct JetStyle {
  std::size_t n = 2;
  std::map<MultiIndex, std::string> aliases;

  static JetStyle standard(std::size_t n) {
    JetStyle s;
    s.n = n;
    if (n >= 1) s.aliases[MultiIndex::unit(n, 0)] = "x";
    if (n >= 2) s.aliases[MultiIndex::unit(n, 1)] = "y";
    return s;
  }

  std::string direction(const MultiIndex& dir) const {
    if (auto it = aliases.find(dir); it != aliases.end()) return it->second;
    return "t[" + dir.to_string() + "]";
  }

  std::string operator()(const JetVariable& v) const {
    if (v.profile.empty()) return v.symbol;
    // lowest order first, x before y
    auto prof = v.profile;
    std::stable_sort(prof.begin(), prof.end(), [](const auto& a, const auto& b) {
      if (a.first.total() != b.first.total()) return a.first.total() < b.first.total();
      return a.first > b.first;
    });
    std::string s = v.symbol + "_{";
    for (const auto& [dir, k] : prof)
      for (int i = 0; i < k; ++i) s += direction(dir);
    return s + "}";
  }
};

inline std::string render(const DiffPoly& p, const JetStyle& style) { return p.render(style); }

}  // namespace psdo
