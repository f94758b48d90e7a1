#include <gtest/gtest.h>

#include "support.hpp"

using namespace psdo;
using testing_support::op;
using testing_support::poly;
using testing_support::Random;

namespace {

ZSeries series(const std::string& text, std::size_t n = 2) { return parse_series(text, ParseContext(n)); }

// same stored terms (truncations may differ)
#define EXPECT_SERIES(a, b) EXPECT_EQ((a).terms(), (b).terms())

}  // namespace

TEST(Symbol, OfOperator) {
  EXPECT_SERIES(symbol_of(op("d1*d2"), 1), series("z1*z2"));
  EXPECT_SERIES(symbol_of(op("g*d1^-1*d2^-1"), -1), series("g*z1^-1*z2^-1"));
  EXPECT_SERIES(symbol_of(op("d1 + d1^2*d2"), -1), series("-z1 - z1^2*z2"));
  EXPECT_SERIES(symbol_of(PsdOp::one(2), 1), series("1"));
  EXPECT_SERIES(symbol_of(PsdOp::one(2), -1), series("1"));
  EXPECT_THROW(symbol_of(PsdOp::one(2), 0), DomainError);
  // round trip through the sign +1 symbol
  PsdOp a = op("a*d1 + b*d2^-1 + O(d2^-3)");
  EXPECT_TRUE(window_equal(operator_of(symbol_of(a, 1)), a));
}

TEST(Symbol, ResidueInZ) {
  EXPECT_EQ(res_z(series("f*z1^-1*z2^-1")), poly("f"));
  EXPECT_EQ(res_z(series("z1*z2")), DiffPoly());
  ZSeries h = series("g*z1^-1*z2^-1 + z1");
  EXPECT_EQ(res_z(h * series("1")), res_z(h));
  // -1 lies outside a series known only to z2^0
  ZSeries shallow = symbol_of(op("d2 + O(d2^-1)"), 1).with_window(Window({kUnbounded, 0}));
  EXPECT_THROW(res_z(shallow), WindowError);
}

TEST(Wave, DerivativesActOnPlainWave) {
  for (std::size_t i = 0; i < 2; ++i) {
    WaveSymbol up = apply_to_wave(PsdOp::partial(2, i), plain_wave(2, 1));
    ZSeries zi = ZSeries::monomial(2, {"z"}, MultiIndex::unit(2, i), DiffPoly(1));
    EXPECT_SERIES(up.hat, zi);
    EXPECT_EQ(up.sign, 1);
    WaveSymbol down = apply_to_wave(PsdOp::partial(2, i), plain_wave(2, -1));
    EXPECT_SERIES(down.hat, -zi);
    EXPECT_EQ(down.sign, -1);
  }
}

TEST(Wave, LeibnizOnHatPart) {
  // d2 (f e^xi) = (f_y + f z2) e^xi
  WaveSymbol w{series("f"), 1};
  EXPECT_SERIES(apply_to_wave(PsdOp::partial(2, 1), w).hat, series("f_{y} + f*z2"));
  // d2^2 (f e^-xi) = (f_yy - 2 f_y z2 + f z2^2) e^-xi
  WaveSymbol v{series("f"), -1};
  EXPECT_SERIES(apply_to_wave(op("d2^2"), v).hat, series("f_{yy} - 2*f_{y}*z2 + f*z2^2"));
}

// Module law: (a b) w = a (b w) for differential a, b.
TEST(Wave, ActionIsAModule) {
  Random rng(31);
  for (int i = 0; i < 50; ++i) {
    PsdOp a = rng.differential(2, 2), b = rng.differential(2, 2);
    WaveSymbol w{ZSeries::constant(2, {"z"}, rng.diffpoly(2, 2) + DiffPoly(1)), rng.coin() ? 1 : -1};
    WaveSymbol lhs = apply_to_wave(ps_mul(a, b), w);
    WaveSymbol rhs = apply_to_wave(a, apply_to_wave(b, w));
    ASSERT_EQ(lhs.hat.terms(), rhs.hat.terms());
  }
}

// L_i (phi e^xi) = z_i (phi e^xi), since L_i phi = phi d_i.
TEST(Wave, DressedOperatorsHaveEigenvalueZ) {
  for (std::size_t n : {1u, 2u}) {
    PsdOp phi = dressing_ansatz(n, 3, AnsatzKind::PHat);
    LaxTuple lax = dress(phi);
    WaveSymbol w = baker_from_phi(phi);
    for (std::size_t i = 0; i < n; ++i) {
      WaveSymbol lw = apply_to_wave(lax[i], w);
      ZSeries zw = ZSeries::monomial(n, {"z"}, MultiIndex::unit(n, i), DiffPoly(1)) * w.hat;
      ZSeries diff = lw.hat - zw;
      ASSERT_FALSE(diff.window().is_exact());
      EXPECT_TRUE(diff.is_zero()) << "n=" << n << " i=" << i << " window " << diff.window().to_string();
    }
  }
}

TEST(Wave, BakerRequiresOnePlusPMinus) {
  EXPECT_THROW(baker_from_phi(op("2 + a*d2^-1 + O(d2^-3)")), DomainError);
  EXPECT_THROW(baker_from_phi(op("1 + a*d1 + O(d2^-3)")), DomainError);
  WaveSymbol w = baker_from_phi(op("1 + a*d2^-1 + O(d2^-3)"));
  EXPECT_EQ(w.sign, 1);
  EXPECT_EQ(w.hat.coefficient(MultiIndex{0, -1}), poly("a"));
}

TEST(PairResidue, HandExamples) {
  auto r = pair_residue_check(op("g*d1^-1*d2^-1"), PsdOp::one(2));
  EXPECT_EQ(r.lhs, poly("g"));
  EXPECT_EQ(r.rhs, poly("g"));
  EXPECT_TRUE(r.equal);
  auto one = pair_residue_check(PsdOp::one(2), PsdOp::one(2));
  EXPECT_TRUE(one.lhs.is_zero());
  EXPECT_TRUE(one.equal);
}

TEST(PairResidue, InsufficientWindowIsAnError) {
  EXPECT_THROW(pair_residue_check(op("d2 + O(d2^0)"), op("1 + O(d2^0)")), WindowError);
}

// psi general with window >= -4, eta in 1 + P_-
class PairResidueRandom : public ::testing::TestWithParam<std::size_t> {};

TEST_P(PairResidueRandom, LemmaHolds) {
  const std::size_t n = GetParam();
  Random rng(900 + static_cast<unsigned>(n));
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    PsdOp psi = rng.op(n, rng.uniform(-4, -1), rng.uniform(0, 2), 4);
    PsdOp::TermMap t{{MultiIndex::zero(n), DiffPoly(1)}};
    const int lo = rng.uniform(-4, -1);
    for (int k = rng.uniform(0, 3); k > 0; --k) {
      std::vector<int> e(n);
      for (auto& v : e) v = rng.uniform(lo, 0);
      e[n - 1] = rng.uniform(lo, -1);
      DiffPoly c = rng.diffpoly(n);
      if (!c.is_zero()) t[MultiIndex(std::move(e))] += c;
    }
    PsdOp eta = PsdOp::from_terms(n, std::move(t), Window::box(n, lo));
    if (!ps_in_pminus(ps_sub(eta, PsdOp::one(n)))) continue;
    PairResidue r;
    try {
      r = pair_residue_check(psi, eta);
    } catch (const WindowError&) {
      // too shallow for this psi; the identity says nothing there
      continue;
    }
    ASSERT_TRUE(r.equal) << render(psi, JetStyle::standard(n)) << " | " << render(eta, JetStyle::standard(n));
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

INSTANTIATE_TEST_SUITE_P(Dimensions, PairResidueRandom, ::testing::Values(1u, 2u),
                         [](const auto& info) { return "n" + std::to_string(info.param); });

TEST(Bilinear, SingleVariableKp) {
  for (int T : {1, 2, 3}) {
    const int depth = 2 * T;
    PsdOp phi = dressing_ansatz(1, depth, AnsatzKind::PMinus);
    auto shifts = positive_indices(1, T);
    FlowRules rules = merged_rules(phi, shifts);
    BilinearReport r = bilinear_check(phi, rules, shifts, T);
    EXPECT_TRUE(r.zero) << "T=" << T << " witness " << (r.witness ? r.witness->to_string() : "");
  }
}

TEST(Bilinear, TwoVariableInstant) {
  auto a = phat_instant_ansatz(2, 4);
  auto shifts = positive_indices(2, 2);
  FlowRules rules = merged_rules(a.phi, shifts, a.vanishing);
  BilinearReport r = bilinear_check(a.phi, rules, shifts, 2);
  EXPECT_TRUE(r.zero) << (r.witness ? r.witness->to_string() : "");
}

// A wrong flow rule must leave a nonzero residue. (t1 is x when n = 1, so
// the t2 rule is the one to spoil.)
TEST(Bilinear, DetectsWrongFlow) {
  PsdOp phi = dressing_ansatz(1, 4, AnsatzKind::PMinus);
  auto shifts = positive_indices(1, 2);
  FlowRules rules = merged_rules(phi, shifts);
  const MultiIndex t2{2};
  const DiffPoly* w1 = rules.find("w1", t2);
  ASSERT_NE(w1, nullptr);
  rules.set("w1", t2, *w1 + poly("w2", 1));
  BilinearReport r = bilinear_check(phi, rules, shifts, 2);
  EXPECT_FALSE(r.zero);
  EXPECT_TRUE(r.witness.has_value());
}

TEST(Bilinear, RejectsNonPositiveShift) {
  PsdOp phi = dressing_ansatz(2, 2, AnsatzKind::PHat);
  EXPECT_THROW(bilinear_check(phi, FlowRules{}, {MultiIndex{1, 0}}, 2), DomainError);
}
