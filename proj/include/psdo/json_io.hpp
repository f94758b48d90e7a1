#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "hierarchy.hpp"
#include "jet.hpp"
#include "laurent.hpp"
#include "operator.hpp"
#include "parser.hpp"
#include "time_poly.hpp"
#include "window.hpp"

namespace psdo {

// Interchange documents. Every document carries schema_version and kind;
// coefficients appear twice, as canonical text (re-parseable) and as a term
// list.

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

namespace detail {

inline Json lower_json(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(is_finite(x) ? Json(x) : Json(nullptr));
  return a;
}

inline std::vector<int> lower_from(const Json& a) {
  std::vector<int> v;
  for (const auto& x : a) v.push_back(x.is_null() ? kUnbounded : x.get<int>());
  return v;
}

inline Json index_json(const MultiIndex& m) { return Json(std::vector<int>(m.begin(), m.end())); }

}  // namespace detail

inline Json to_json_structured(const DiffPoly& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json factors = Json::array();
    for (const auto& [v, e] : m.factors()) {
      Json ders = Json::array();
      for (const auto& [dir, k] : v.profile) ders.push_back({{"index", detail::index_json(dir)}, {"order", k}});
      factors.push_back({{"symbol", v.symbol}, {"derivatives", ders}, {"power", e}});
    }
    terms.push_back({{"coefficient", c.get_str()}, {"factors", factors}});
  }
  return terms;
}

inline DiffPoly diffpoly_from_structured(const Json& terms) {
  DiffPoly p;
  for (const auto& t : terms) {
    Rational c(t.at("coefficient").get<std::string>());
    c.canonicalize();
    std::vector<std::pair<JetVariable, int>> fs;
    for (const auto& f : t.at("factors")) {
      JetVariable::Profile prof;
      for (const auto& d : f.at("derivatives"))
        prof.emplace_back(MultiIndex(d.at("index").get<std::vector<int>>()), d.at("order").get<int>());
      fs.emplace_back(JetVariable(f.at("symbol").get<std::string>(), std::move(prof)), f.at("power").get<int>());
    }
    p.add_term(DiffPoly::Mono(std::move(fs)), c);
  }
  return p;
}

inline Json to_json(const DiffPoly& p, const JetStyle& style) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "diffpoly"},
          {"dimension", style.n},
          {"value", render(p, style)},
          {"value_structured", to_json_structured(p)}};
}

inline Json to_json(const PsdOp& a, const JetStyle& style) {
  Json terms = Json::array();
  for (const auto& [e, c] : a.terms())
    terms.push_back({{"exponent", detail::index_json(e)},
                     {"coefficient", render(c, style)},
                     {"coefficient_structured", to_json_structured(c)}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "operator"},
          {"dimension", a.dimension()},
          {"window", detail::lower_json(a.window().lower())},
          {"bound", detail::lower_json(a.bound())},
          {"text", render(a, style)},
          {"terms", terms}};
}

inline void check_document(const Json& j, const std::string& kind) {
  if (!j.is_object() || !j.contains("schema_version") || j.at("schema_version") != kSchemaVersion)
    throw ParseError("unsupported document schema", 0);
  if (j.value("kind", "") != kind) throw ParseError("expected a document of kind " + kind, 0);
}

inline PsdOp operator_from_json(const Json& j) {
  check_document(j, "operator");
  const std::size_t n = j.at("dimension").get<std::size_t>();
  PsdOp::TermMap t;
  for (const auto& term : j.at("terms"))
    t.emplace(MultiIndex(term.at("exponent").get<std::vector<int>>()),
              diffpoly_from_structured(term.at("coefficient_structured")));
  return PsdOp::from_terms(n, std::move(t), Window(detail::lower_from(j.at("window"))),
                           Bound(detail::lower_from(j.at("bound"))));
}

template <class C, class R, class S>
Json series_json(const LaurentSeries<C>& s, R&& text, S&& structured) {
  Json terms = Json::array();
  for (const auto& [e, c] : s.terms())
    terms.push_back({{"exponent", detail::index_json(e)}, {"coefficient", text(c)}, {"coefficient_structured", structured(c)}});
  Json caps = Json::array();
  for (const auto& c : s.caps()) caps.push_back(c ? Json(*c) : Json(nullptr));
  return {{"schema_version", kSchemaVersion},
          {"kind", "series"},
          {"dimension", s.dimension()},
          {"groups", s.groups()},
          {"window", detail::lower_json(s.window().lower())},
          {"bound", detail::lower_json(s.bound())},
          {"caps", caps},
          {"text", s.render(text)},
          {"terms", terms}};
}

inline Json to_json(const LaurentSeries<DiffPoly>& s, const JetStyle& style) {
  return series_json(s, [&](const DiffPoly& c) { return render(c, style); },
                     [](const DiffPoly& c) { return to_json_structured(c); });
}

inline Json to_json(const LaurentSeries<Rational>& s) {
  return series_json(s, [](const Rational& c) { return c.get_str(); }, [](const Rational& c) { return Json(c.get_str()); });
}

inline Json to_json(const LaurentSeries<TimePolynomial>& s) {
  return series_json(s, [](const TimePolynomial& c) { return render(c); },
                     [](const TimePolynomial& c) { return Json(render(c)); });
}

inline LaurentSeries<DiffPoly> series_from_json(const Json& j) {
  check_document(j, "series");
  const std::size_t n = j.at("dimension").get<std::size_t>();
  LaurentSeries<DiffPoly> s(n, j.at("groups").get<std::vector<std::string>>());
  std::vector<std::optional<int>> caps;
  for (const auto& c : j.at("caps")) caps.push_back(c.is_null() ? std::nullopt : std::optional<int>(c.get<int>()));
  s.set_precision(Window(detail::lower_from(j.at("window"))), Bound(detail::lower_from(j.at("bound"))), caps);
  for (const auto& term : j.at("terms"))
    s.add_term(MultiIndex(term.at("exponent").get<std::vector<int>>()),
               diffpoly_from_structured(term.at("coefficient_structured")));
  return s;
}

inline Json to_json(const PdeSystem& sys, const JetStyle& style) {
  Json eqs = Json::array();
  for (const auto& e : sys.equations)
    eqs.push_back({{"monomial", detail::index_json(e.monomial)},
                   {"equation", render(e.equation, style)},
                   {"equation_structured", to_json_structured(e.equation)}});
  return {{"schema_version", kSchemaVersion}, {"kind", "pde_system"}, {"dimension", style.n}, {"equations", eqs}};
}

inline PdeSystem pde_system_from_json(const Json& j) {
  check_document(j, "pde_system");
  PdeSystem sys;
  for (const auto& e : j.at("equations"))
    sys.equations.push_back({MultiIndex(e.at("monomial").get<std::vector<int>>()),
                             diffpoly_from_structured(e.at("equation_structured"))});
  return sys;
}

}  // namespace psdo
