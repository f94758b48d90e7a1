// psdocalc: command-line front end over the psdo engine.
//
// Exit codes: 0 success or verified equality, 1 a checker found a witness,
// 2 usage, parse, window or domain errors.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psdo/psdo.hpp"

namespace {

using namespace psdo;

struct UsageError : Error {
  using Error::Error;
};

struct Session {
  std::size_t n = 2;
  std::string window_text;
  int degree = 4;
  std::string format = "text";
  std::string symbols_text;
  std::vector<std::string> defs;
  std::vector<std::string> aliases;

  ParseContext ctx;
  std::set<std::string> declared;

  bool json() const { return format == "json"; }

  void setup() {
    ctx = ParseContext(n);
    ctx.degree = degree;
    if (!window_text.empty()) ctx.window = window_from(window_text);
    for (const auto& a : aliases) {
      auto eq = a.find('=');
      if (eq == std::string::npos) throw UsageError("--alias expects name=t[...]");
      std::string name = a.substr(0, eq);
      if (name.empty() || name.find_first_not_of("abcdefghijklmnopqrstuvwxyz") != std::string::npos)
        throw UsageError("alias name must be lowercase letters: " + name);
      MultiIndex dir = parse_time_index(a.substr(eq + 1), n);
      for (auto it = ctx.style.aliases.begin(); it != ctx.style.aliases.end();)
        it = it->second == name ? ctx.style.aliases.erase(it) : std::next(it);
      ctx.style.aliases[dir] = name;
    }
    if (!symbols_text.empty()) {
      std::stringstream ss(symbols_text);
      std::string s;
      while (std::getline(ss, s, ',')) {
        if (s.empty()) continue;
        if (!declared.insert(s).second) throw UsageError("symbol declared twice: " + s);
      }
    }
    for (const auto& d : defs) {
      auto eq = d.find('=');
      if (eq == std::string::npos) throw UsageError("--def expects name=expression");
      define(ctx, d.substr(0, eq), d.substr(eq + 1));
      check_symbols(*ctx.defs[d.substr(0, eq)]);
    }
  }

  Window window_from(const std::string& text) const {
    std::vector<int> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part == "*") {
        v.push_back(kUnbounded);
        continue;
      }
      try {
        std::size_t used = 0;
        v.push_back(std::stoi(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw UsageError("bad --window component '" + part + "'");
      }
    }
    if (v.size() != n) throw UsageError("--window needs " + std::to_string(n) + " components");
    return Window(std::move(v));
  }

  Window need_window() const {
    if (!ctx.window) throw UsageError("this command needs --window");
    return *ctx.window;
  }

  void check_symbols(const Expr& e) const {
    if (declared.empty()) return;
    if (e.kind == Expr::Kind::Symbol && !declared.count(e.jet.symbol))
      throw ParseError("undeclared symbol '" + e.jet.symbol + "'", e.pos);
    for (const auto& a : e.args) check_symbols(*a);
  }

  ExprPtr tree(const std::string& text) const {
    ExprPtr e = parse(text, ctx);
    check_symbols(*e);
    return e;
  }
  PsdOp op(const std::string& text) const {
    tree(text);
    return parse_operator(text, ctx);
  }
  ZSeries series(const std::string& text) const {
    tree(text);
    return parse_series(text, ctx);
  }
  TimePolynomial time_poly(const std::string& text) const {
    tree(text);
    return parse_time_polynomial(text, ctx);
  }

  std::string header(const std::string& window) const {
    const bool exact = window.find_first_not_of("*,") == std::string::npos;
    return "# n=" + std::to_string(n) + " window=" + (exact ? "exact" : window) + " T=" + std::to_string(degree);
  }
  std::string requested() const { return ctx.window ? ctx.window->to_string() : "exact"; }

  void emit(const std::string& cmd, const std::string& window, const std::string& text, Json doc) const {
    if (json()) {
      Json out = {{"schema_version", kSchemaVersion},
                  {"command", cmd},
                  {"dimension", n},
                  {"degree", degree},
                  {"result", std::move(doc)}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << header(window) << "\n" << text << "\n";
    }
  }

  void emit_op(const std::string& cmd, const PsdOp& a) const {
    emit(cmd, a.window().to_string(), render(a, ctx.style), to_json(a, ctx.style));
  }
  void emit_poly(const std::string& cmd, const DiffPoly& p) const {
    emit(cmd, requested(), render(p, ctx.style), to_json(p, ctx.style));
  }

  int emit_check(const std::string& cmd, const std::string& window, bool ok, const std::string& detail, Json extra) const {
    if (json()) {
      Json doc = {{"schema_version", kSchemaVersion}, {"kind", "check"}, {"ok", ok}, {"detail", detail}};
      doc.update(extra);
      emit(cmd, window, "", doc);
    } else {
      std::cout << header(window) << "\n" << (ok ? "OK" : "FAIL") << (detail.empty() ? "" : " " + detail) << "\n";
    }
    return ok ? 0 : 1;
  }
};

std::vector<std::string> inputs(std::vector<std::string> given, std::size_t want) {
  if (given.empty()) {
    std::string line;
    while (std::getline(std::cin, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) given.push_back(line);
  }
  if (want && given.size() != want)
    throw UsageError("expected " + std::to_string(want) + " expression(s), got " + std::to_string(given.size()));
  if (given.empty()) throw UsageError("no input expression");
  return given;
}

MultiIndex index_arg(const std::string& text, std::size_t n) { return parse_multi_index(text, n); }

AnsatzKind ansatz_kind(const std::string& k) {
  if (k == "phat") return AnsatzKind::PHat;
  if (k == "pminus") return AnsatzKind::PMinus;
  if (k == "nonpositive") return AnsatzKind::NonPositive;
  throw UsageError("unknown ansatz kind " + k);
}

// The dressing used by dress, w4-rules, lax-check, zs-check, bilinear:
// --phi given explicitly, or a generic ansatz. "instant" is the non-positive
// ansatz with the part outside hat P_- vanishing at the instant.
struct Dressing {
  PsdOp phi;
  std::set<std::string> vanishing;
};

Dressing dressing(const Session& s, const std::string& phi_text, int depth, const std::string& kind) {
  if (!phi_text.empty()) return {s.op(phi_text), {}};
  if (kind == "instant") {
    auto a = phat_instant_ansatz(s.n, depth);
    return {a.phi, a.vanishing};
  }
  return {dressing_ansatz(s.n, depth, ansatz_kind(kind)), {}};
}

std::string check_detail(const CheckReport& r, const JetStyle& st) {
  if (r.ok) return "";
  return "component " + std::to_string(r.component + 1) + " at (" + r.witness->to_string() + "): lhs = " +
         render(r.lhs, st) + ", rhs = " + render(r.rhs, st);
}

Json check_json(const CheckReport& r, const JetStyle& st) {
  Json j = {{"component", r.component + 1}};
  if (r.witness) {
    j["witness"] = std::vector<int>(r.witness->begin(), r.witness->end());
    j["lhs"] = render(r.lhs, st);
    j["rhs"] = render(r.rhs, st);
  }
  return j;
}

std::string series_detail(const SeriesComparison& c, const ZSeries& like, const JetStyle& st) {
  if (c.equal) return "";
  std::string out = std::to_string(c.discrepancies.size()) + " discrepancies, first at " +
                    like.monomial_text(c.discrepancies.front());
  return out + " (lhs " + render(c.lhs, st) + " | rhs " + render(c.rhs, st) + ")";
}

Json series_check_json(const SeriesComparison& c, const JetStyle& st) {
  Json d = Json::array();
  for (const auto& m : c.discrepancies) d.push_back(std::vector<int>(m.begin(), m.end()));
  return {{"lhs", to_json(c.lhs, st)}, {"rhs", to_json(c.rhs, st)}, {"discrepancies", d}};
}

KernelKind kernel_kind(const std::string& k) {
  if (k == "product") return KernelKind::Product;
  if (k == "multinomial") return KernelKind::Multinomial;
  throw UsageError("unknown kernel " + k);
}

TauContext tau_context(const Session& s, const std::string& tau) {
  TauContext c;
  c.n = s.n;
  c.T = s.degree;
  c.tau = s.time_poly(tau);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  Session s;
  if (const char* env = std::getenv("PSDOCALC_DEFAULT_DEG")) {
    try {
      s.degree = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "psdocalc: PSDOCALC_DEFAULT_DEG is not an integer\n";
      return 2;
    }
  }

  CLI::App app{"Pseudodifferential operators, KP flows and tau functions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--n", s.n, "dimension n")->check(CLI::Range(1, 8));
  app.add_option("--window", s.window_text, "window lower bounds i1,...,in (* = exact)");
  app.add_option("--deg", s.degree, "truncation degree T")->check(CLI::Range(0, 64));
  app.add_option("--format", s.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--symbols", s.symbols_text, "declared symbol alphabet a,b,c,...");
  app.add_option("--def", s.defs, "name=expression, usable in later inputs");
  app.add_option("--alias", s.aliases, "name=t[...], a derivative alias for rendering and parsing");

  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
  auto command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    return sub;
  };

  // operator algebra
  std::vector<std::string> exprs;
  int power_k = 1;
  std::string phi_text, kind = "phat", alpha_text, beta_text;
  int depth = 3;

  {
    auto* c = command("mul", "product of operators, left to right");
    c->add_option("exprs", exprs, "operators (or stdin)");
    commands.emplace_back(c, [&] {
      auto in = inputs(exprs, 0);
      PsdOp acc = s.op(in[0]);
      for (std::size_t i = 1; i < in.size(); ++i) acc = ps_mul(acc, s.op(in[i]), s.ctx.window);
      s.emit_op("mul", acc);
      return 0;
    });
  }
  {
    auto* c = command("adjoint", "formal adjoint");
    c->add_option("expr", exprs);
    commands.emplace_back(c, [&] {
      s.emit_op("adjoint", ps_adjoint(s.op(inputs(exprs, 1)[0]), s.ctx.window));
      return 0;
    });
  }
  {
    auto* c = command("res-d", "coefficient of d^(-1,...,-1)");
    c->add_option("expr", exprs);
    commands.emplace_back(c, [&] {
      s.emit_poly("res-d", ps_res_partial(s.op(inputs(exprs, 1)[0])));
      return 0;
    });
  }
  {
    auto* c = command("res-z", "coefficient of z^(-1,...,-1) of a z-series");
    c->add_option("expr", exprs);
    commands.emplace_back(c, [&] {
      s.emit_poly("res-z", res_z(s.series(inputs(exprs, 1)[0])));
      return 0;
    });
  }
  {
    auto* c = command("split", "P_+ and P_- parts");
    c->add_option("expr", exprs);
    commands.emplace_back(c, [&] {
      auto [plus, minus] = ps_split(s.op(inputs(exprs, 1)[0]));
      s.emit("split", plus.window().to_string() + " | " + minus.window().to_string(),
             "plus: " + render(plus, s.ctx.style) + "\nminus: " + render(minus, s.ctx.style),
             Json{{"schema_version", kSchemaVersion},
                  {"kind", "split"},
                  {"plus", to_json(plus, s.ctx.style)},
                  {"minus", to_json(minus, s.ctx.style)}});
      return 0;
    });
  }
  {
    auto* c = command("inverse", "inverse of an operator with invertible leading part");
    c->add_option("expr", exprs);
    commands.emplace_back(c, [&] {
      s.emit_op("inverse", ps_inverse(s.op(inputs(exprs, 1)[0]), s.ctx.window));
      return 0;
    });
  }
  {
    auto* c = command("power", "integer power (negative: of the inverse)");
    c->add_option("expr", exprs);
    c->add_option("--k", power_k, "exponent")->required();
    commands.emplace_back(c, [&] {
      PsdOp a = s.op(inputs(exprs, 1)[0]);
      if (power_k < 0) {
        a = ps_inverse(a, s.ctx.window);
        power_k = -power_k;
      }
      s.emit_op("power", ps_power(a, power_k, s.ctx.window));
      return 0;
    });
  }
  {
    auto* c = command("commutator", "[A, B]");
    c->add_option("exprs", exprs);
    commands.emplace_back(c, [&] {
      auto in = inputs(exprs, 2);
      s.emit_op("commutator", ps_commutator(s.op(in[0]), s.op(in[1]), s.ctx.window));
      return 0;
    });
  }

  // hierarchy
  auto dressing_options = [&](CLI::App* c) {
    c->add_option("--phi", phi_text, "dressing operator (default: generic ansatz)");
    c->add_option("--depth", depth, "ansatz depth")->check(CLI::Range(1, 12));
    c->add_option("--kind", kind, "phat, pminus, nonpositive or instant")
        ->check(CLI::IsMember({"phat", "pminus", "nonpositive", "instant"}));
  };
  {
    auto* c = command("dress", "L_i = phi d_i phi^{-1}");
    dressing_options(c);
    commands.emplace_back(c, [&] {
      Dressing d = dressing(s, phi_text, depth, kind);
      LaxTuple lax = dress(d.phi, s.ctx.window);
      std::string text = "phi = " + render(d.phi, s.ctx.style);
      Json comps = Json::array();
      for (std::size_t i = 0; i < lax.components.size(); ++i) {
        text += "\nL" + std::to_string(i + 1) + " = " + render(lax[i], s.ctx.style);
        comps.push_back(to_json(lax[i], s.ctx.style));
      }
      s.emit("dress", lax[0].window().to_string(), text,
             Json{{"schema_version", kSchemaVersion},
                  {"kind", "lax_tuple"},
                  {"phi", to_json(d.phi, s.ctx.style)},
                  {"components", comps}});
      return 0;
    });
  }
  {
    auto* c = command("w4-rules", "t_alpha flows of the dressing coefficients");
    dressing_options(c);
    c->add_option("--alpha", alpha_text, "flow index")->required();
    commands.emplace_back(c, [&] {
      Dressing d = dressing(s, phi_text, depth, kind);
      FlowRuleSet r = w4_rules(d.phi, index_arg(alpha_text, s.n), d.vanishing);
      std::string text;
      Json rules = Json::array();
      for (const auto& [key, v] : r.rules.entries()) {
        const std::string lhs = key.first + "_{" + s.ctx.style.direction(key.second) + "}";
        text += (text.empty() ? "" : "\n") + lhs + " = " + render(v, s.ctx.style);
        rules.push_back({{"symbol", key.first},
                         {"direction", std::vector<int>(key.second.begin(), key.second.end())},
                         {"value", render(v, s.ctx.style)},
                         {"value_structured", to_json_structured(v)}});
      }
      s.emit("w4-rules", r.window.to_string(), text,
             Json{{"schema_version", kSchemaVersion}, {"kind", "flow_rules"}, {"rules", rules},
                  {"rhs", to_json(r.rhs, s.ctx.style)}});
      return 0;
    });
  }
  {
    auto* c = command("lax-check", "d L / d t_alpha = [L^alpha_+, L] on --window");
    dressing_options(c);
    c->add_option("--alpha", alpha_text, "flow index")->required();
    commands.emplace_back(c, [&] {
      Dressing d = dressing(s, phi_text, depth, kind);
      Window w = s.need_window();
      CheckReport r = lax_check(d.phi, index_arg(alpha_text, s.n), w, d.vanishing);
      return s.emit_check("lax-check", w.to_string(), r.ok, check_detail(r, s.ctx.style), check_json(r, s.ctx.style));
    });
  }
  {
    auto* c = command("zs-check", "zero-curvature relation for t_alpha, t_beta on --window");
    dressing_options(c);
    c->add_option("--alpha", alpha_text, "first flow index")->required();
    c->add_option("--beta", beta_text, "second flow index")->required();
    commands.emplace_back(c, [&] {
      Dressing d = dressing(s, phi_text, depth, kind);
      Window w = s.need_window();
      CheckReport r = zs_check(d.phi, index_arg(alpha_text, s.n), index_arg(beta_text, s.n), w, d.vanishing);
      return s.emit_check("zs-check", w.to_string(), r.ok, check_detail(r, s.ctx.style), check_json(r, s.ctx.style));
    });
  }

  std::string la, lb, ta, tb;
  {
    auto* c = command("extract-pdes", "equations of d_{ta} B - d_{tb} A = [A, B]");
    c->add_option("--la", la, "A = L^alpha_+")->required();
    c->add_option("--lb", lb, "B = L^beta_+")->required();
    c->add_option("--ta", ta, "t_alpha")->required();
    c->add_option("--tb", tb, "t_beta")->required();
    commands.emplace_back(c, [&] {
      PdeSystem sys = extract_pdes(s.op(la), s.op(lb), parse_time_index(ta, s.n), parse_time_index(tb, s.n));
      std::string text;
      for (const auto& e : sys.equations)
        text += (text.empty() ? "" : "\n") + std::string("(") + e.monomial.to_string() + "): " +
                render(e.equation, s.ctx.style) + " = 0";
      s.emit("extract-pdes", "exact", text.empty() ? "no equations" : text, to_json(sys, s.ctx.style));
      return 0;
    });
  }

  std::string system_file = "-";
  std::vector<std::string> sets;
  {
    auto* c = command("reduce", "substitute jets (and their derivatives) in a PDE system");
    c->add_option("--system", system_file, "pde_system JSON document (- for stdin)");
    c->add_option("--set", sets, "J=F: the jet J and its derivatives follow F")->required();
    commands.emplace_back(c, [&] {
      std::string doc;
      if (system_file == "-") {
        doc.assign(std::istreambuf_iterator<char>(std::cin), {});
      } else {
        std::ifstream f(system_file);
        if (!f) throw UsageError("cannot read " + system_file);
        doc.assign(std::istreambuf_iterator<char>(f), {});
      }
      Json j;
      try {
        j = Json::parse(doc);
      } catch (const Json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what(), 0);
      }
      if (j.contains("result")) j = j.at("result");
      PdeSystem sys = pde_system_from_json(j);
      std::vector<std::pair<JetVariable, DiffPoly>> rel;
      for (const auto& r : sets) {
        auto eq = r.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects J=F");
        ExprPtr lhs = s.tree(r.substr(0, eq));
        if (lhs->kind != Expr::Kind::Symbol) throw UsageError("--set: left side must be a jet");
        rel.emplace_back(lhs->jet, parse_diffpoly(r.substr(eq + 1), s.ctx));
      }
      PdeSystem out = reduce_system(sys, rel);
      std::string text;
      for (const auto& e : out.equations)
        text += (text.empty() ? "" : "\n") + std::string("(") + e.monomial.to_string() + "): " +
                render(e.equation, s.ctx.style) + " = 0";
      s.emit("reduce", "exact", text.empty() ? "no equations" : text, to_json(out, s.ctx.style));
      return 0;
    });
  }

  // wave functions
  {
    auto* c = command("pair-residue", "Res_z (psi e^xi)(eta e^-xi) against Res_d psi eta^*");
    c->add_option("exprs", exprs);
    commands.emplace_back(c, [&] {
      auto in = inputs(exprs, 2);
      PairResidue r = pair_residue_check(s.op(in[0]), s.op(in[1]));
      const std::string detail = "lhs = " + render(r.lhs, s.ctx.style) + ", rhs = " + render(r.rhs, s.ctx.style);
      return s.emit_check("pair-residue", Window::box(s.n, -1).to_string(), r.equal, detail,
                          Json{{"lhs", render(r.lhs, s.ctx.style)}, {"rhs", render(r.rhs, s.ctx.style)}});
    });
  }
  {
    auto* c = command("bilinear", "Res_z w(t - [s^-1], z) w^*(t, z) vanishes to degree T");
    dressing_options(c);
    commands.emplace_back(c, [&] {
      if (kind == "phat" && phi_text.empty()) kind = s.n == 1 ? "pminus" : "instant";
      Dressing d = dressing(s, phi_text, depth, kind);
      auto shifts = positive_indices(s.n, s.degree);
      FlowRules rules = merged_rules(d.phi, shifts, d.vanishing);
      BilinearReport r = bilinear_check(d.phi, rules, shifts, s.degree);
      ZSeries res = r.residue.map_coefficients([&](const DiffPoly& c) { return at_instant(c, d.vanishing); });
      const bool zero = res.is_zero();
      std::string detail = zero ? "" : "residue " + render(res, s.ctx.style);
      return s.emit_check("bilinear", r.z_window.to_string(), zero, detail, Json{{"residue", to_json(res, s.ctx.style)}});
    });
  }

  // tau functions
  std::string tau_text, point_text, group = "z", mode = "constrained", kernel = "product";
  int dk_k = 0;
  {
    auto* c = command("miwa", "G(z) applied to a polynomial in t");
    c->add_option("--tau", tau_text, "polynomial in t[...]")->required();
    c->add_option("--group", group, "series variable name")->check(CLI::IsMember({"z", "s", "s'"}));
    commands.emplace_back(c, [&] {
      TSeries r = miwa_shift(s.time_poly(tau_text), s.n, group, s.degree);
      s.emit("miwa", "deg<=" + std::to_string(s.degree), render(r), to_json(r));
      return 0;
    });
  }
  {
    auto* c = command("lemma41", "Res_z eta(z) K(z,s) against s^1 (eta(s) - 1)");
    c->add_option("expr", exprs);
    c->add_option("--kernel", kernel, "product or multinomial")->check(CLI::IsMember({"product", "multinomial"}));
    commands.emplace_back(c, [&] {
      ZSeries eta = s.series(inputs(exprs, 1)[0]);
      SeriesComparison r = lemma41_check(eta, s.degree, kernel_kind(kernel));
      return s.emit_check("lemma41", "deg<=" + std::to_string(s.degree), r.equal, series_detail(r, r.lhs, s.ctx.style),
                          series_check_json(r, s.ctx.style));
    });
  }
  {
    auto* c = command("lemma42", "Res_z eta K(z,s) K(z,s') against its regrouped form");
    c->add_option("expr", exprs);
    c->add_option("--mode", mode, "constrained or paper")->check(CLI::IsMember({"constrained", "paper"}));
    c->add_option("--kernel", kernel, "product or multinomial")->check(CLI::IsMember({"product", "multinomial"}));
    commands.emplace_back(c, [&] {
      ZSeries eta = s.series(inputs(exprs, 1)[0]);
      SeriesComparison r = lemma42_check(eta, s.degree, mode == "paper" ? Lemma42Mode::Paper : Lemma42Mode::Constrained,
                                         kernel_kind(kernel));
      return s.emit_check("lemma42", "deg<=" + std::to_string(s.degree), r.equal, series_detail(r, r.lhs, s.ctx.style),
                          series_check_json(r, s.ctx.style));
    });
  }
  {
    auto* c = command("kernel-diff", "shift kernel against the geometric series");
    commands.emplace_back(c, [&] {
      KernelAudit a = kernel_vs_geometric(s.n, s.degree);
      QSeries k = a.kernel;
      auto mono = [&](const std::optional<MultiIndex>& m) { return m ? k.monomial_text(*m) : std::string("none"); };
      std::string text = std::string("log: ") + (a.log_equal ? "equal" : "first mismatch " + mono(a.first_log_mismatch)) +
                         "\nexp: " + (a.exp_equal ? "equal" : "first mismatch " + mono(a.first_mismatch));
      const bool ok = a.log_equal && a.exp_equal;
      Json j = {{"log_equal", a.log_equal},
                {"exp_equal", a.exp_equal},
                {"kernel", to_json(a.kernel)},
                {"log_geometric", to_json(a.log_geometric)}};
      if (a.first_mismatch) j["first_mismatch"] = std::vector<int>(a.first_mismatch->begin(), a.first_mismatch->end());
      if (a.first_log_mismatch)
        j["first_log_mismatch"] = std::vector<int>(a.first_log_mismatch->begin(), a.first_log_mismatch->end());
      return s.emit_check("kernel-diff", "deg<=" + std::to_string(s.degree), ok, text, j);
    });
  }
  {
    auto* c = command("dk-check", "D_k(z) G(z) tau = 0 through degree T");
    c->add_option("--tau", tau_text, "polynomial in t[...]")->required();
    c->add_option("--k", dk_k, "direction 1..n (0: all)");
    commands.emplace_back(c, [&] {
      TauContext ctx = tau_context(s, tau_text);
      if (dk_k < 0 || dk_k > static_cast<int>(s.n)) throw UsageError("--k out of range");
      bool ok = true;
      std::string detail;
      Json per = Json::array();
      for (std::size_t k = 0; k < s.n; ++k) {
        if (dk_k && static_cast<int>(k) + 1 != dk_k) continue;
        DkReport r = dk_annihilation_check(ctx, k);
        per.push_back({{"k", k + 1}, {"zero", r.zero}, {"result", to_json(r.result)}});
        if (!r.zero && ok) {
          ok = false;
          detail = "D_" + std::to_string(k + 1) + " leaves " + render(r.result);
        }
      }
      return s.emit_check("dk-check", "deg<=" + std::to_string(s.degree), ok, detail, Json{{"directions", per}});
    });
  }
  {
    auto* c = command("tau-what", "hat w = G(z) tau / tau at a time point");
    c->add_option("--tau", tau_text, "polynomial in t[...]")->required();
    c->add_option("--at", point_text, "t[...]=q, ...")->required();
    commands.emplace_back(c, [&] {
      QSeries w = wavehat_from_tau(tau_context(s, tau_text), parse_point(point_text, s.ctx));
      s.emit("tau-what", "deg<=" + std::to_string(s.degree), render(w), to_json(w));
      return 0;
    });
  }
  {
    auto* c = command("r1-check", "n = 1: hat w(t,s)^{-1} = G(s) hat w^*(t,s)");
    c->add_option("--tau", tau_text, "polynomial in t[...]")->required();
    c->add_option("--at", point_text, "t[...]=q, ...")->required();
    commands.emplace_back(c, [&] {
      R1Report r = r1_check_n1(tau_context(s, tau_text), parse_point(point_text, s.ctx));
      std::string detail = "lhs " + render(r.lhs) + " | rhs " + render(r.rhs);
      return s.emit_check("r1-check", "deg<=" + std::to_string(s.degree), r.equal, r.equal ? "" : detail,
                          Json{{"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)}});
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    s.setup();
    for (auto& [sub, run] : commands)
      if (sub->parsed()) return run();
  } catch (const ParseError& e) {
    std::cerr << "psdocalc: parse error: " << e.what() << "\n";
    return 2;
  } catch (const WindowError& e) {
    std::cerr << "psdocalc: window error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "psdocalc: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
