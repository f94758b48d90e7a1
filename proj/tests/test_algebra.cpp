#include <gtest/gtest.h>

#include "support.hpp"

using namespace psdo;
using testing_support::poly;

TEST(MultiIndex, Arithmetic) {
  MultiIndex a{1, -2, 0}, b{0, 3, 1};
  EXPECT_EQ(a + b, (MultiIndex{1, 1, 1}));
  EXPECT_EQ(a - b, (MultiIndex{1, -5, -1}));
  EXPECT_EQ(-a, (MultiIndex{-1, 2, 0}));
  EXPECT_EQ(2 * b, (MultiIndex{0, 6, 2}));
  EXPECT_EQ(a.total(), -1);
  EXPECT_EQ(a.to_string(), "1,-2,0");
  EXPECT_THROW(a + MultiIndex({1, 2}), DimensionError);
}

TEST(MultiIndex, OrderAndPredicates) {
  EXPECT_TRUE(mi_leq(MultiIndex{0, 1}, MultiIndex{1, 1}));
  EXPECT_FALSE(mi_leq(MultiIndex{2, 0}, MultiIndex{1, 1}));
  EXPECT_TRUE(mi_in_zplus(MultiIndex{0, 1}));
  EXPECT_FALSE(mi_in_zplus(MultiIndex{0, 0}));
  EXPECT_FALSE(mi_in_zplus(MultiIndex{-1, 2}));
  EXPECT_TRUE(mi_all_positive(MultiIndex{1, 2}));
  EXPECT_FALSE(mi_all_positive(MultiIndex{1, 0}));
}

TEST(MultiIndex, Binomials) {
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(2, 3), 0);
  // C(-1, k) = (-1)^k
  for (int k = 0; k < 6; ++k) EXPECT_EQ(binomial(-1, k), (k % 2 ? -1 : 1));
  EXPECT_EQ(binomial(-3, 2), 6);
  EXPECT_THROW(binomial(3, -1), DomainError);
  EXPECT_EQ(mi_binomial(MultiIndex{-1, 2}, MultiIndex{1, 1}), -2);
  EXPECT_THROW(mi_binomial(MultiIndex{1, 1}, MultiIndex{-1, 0}), DomainError);
}

TEST(MultiIndex, InverseProductAndMultinomial) {
  EXPECT_EQ(mi_inverse_product(MultiIndex{2, 3}), Rational(1, 6));
  EXPECT_EQ(mi_inverse_product(MultiIndex{-2, 1}), Rational(-1, 2));
  EXPECT_THROW(mi_inverse_product(MultiIndex{0, 1}), DomainError);
  EXPECT_EQ(multinomial(MultiIndex{2, 1}), 3);
  EXPECT_EQ(multinomial(MultiIndex{2, 2, 1}), 30);
}

TEST(MultiIndex, Compositions) {
  auto c = compositions(3, 2);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c.front(), (MultiIndex{2, 0, 0}));
  EXPECT_EQ(c.back(), (MultiIndex{0, 0, 2}));
  for (const auto& m : c) EXPECT_EQ(m.total(), 2);
  EXPECT_TRUE(compositions(2, -1).empty());
}

TEST(Rational, ParseAndCanonical) {
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(make_rational(-2, 4), Rational(-1, 2));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
}

TEST(Polynomial, RingOperations) {
  DiffPoly a = symbol("a"), b = symbol("b");
  DiffPoly p = a + b;
  EXPECT_EQ(p * p, a * a + DiffPoly(2) * a * b + b * b);
  EXPECT_EQ(p - p, DiffPoly());
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ(p.pow(0), DiffPoly(1));
  EXPECT_EQ((a * b).degree(), 2);
  EXPECT_EQ(DiffPoly(Rational(1, 2)).constant_term(), Rational(1, 2));
  EXPECT_THROW(a.pow(-1), DomainError);
  EXPECT_EQ(a.as_variable()->symbol, "a");
  EXPECT_FALSE((DiffPoly(2) * a).as_variable());
}

TEST(Polynomial, SubstituteAndEvaluate) {
  DiffPoly a = symbol("a"), b = symbol("b");
  DiffPoly p = a * a - b;
  DiffPoly q = p.substitute([&](const JetVariable& v) -> std::optional<DiffPoly> {
    if (v.symbol == "a") return b + DiffPoly(1);
    return std::nullopt;
  });
  EXPECT_EQ(q, b * b + b + DiffPoly(1));
  std::map<JetVariable, Rational> at{{JetVariable("a"), Rational(3)}, {JetVariable("b"), Rational(1, 2)}};
  EXPECT_EQ(dp_eval(p, at), Rational(17, 2));
  EXPECT_THROW(dp_eval(p, {}), DomainError);
}

TEST(Polynomial, RenderIsCanonical) {
  JetStyle st = JetStyle::standard(2);
  EXPECT_EQ(render(DiffPoly(), st), "0");
  EXPECT_EQ(render(poly("2*a*c - b + 3/2"), st), "2*a*c - b + 3/2");
  EXPECT_EQ(render(poly("-a^2"), st), "-a^2");
}

TEST(Window, ContainsCoversMeet) {
  Window w({-2, kUnbounded});
  EXPECT_TRUE(w.contains(MultiIndex{-2, -100}));
  EXPECT_FALSE(w.contains(MultiIndex{-3, 0}));
  EXPECT_TRUE(w.covers(Window::box(2, -1)));
  EXPECT_FALSE(Window::box(2, -1).covers(w));
  EXPECT_TRUE(Window::box(2, -3).covers(Window::box(2, -1)));
  EXPECT_FALSE(Window::box(2, -1).covers(Window::box(2, -3)));
  EXPECT_TRUE(Window::exact(2).covers(Window::box(2, -5)));
  EXPECT_EQ(meet(Window::box(2, -3), Window({-1, kUnbounded})), Window({-1, -3}));
  EXPECT_EQ(Window({-1, kUnbounded}).to_string(), "-1,*");
  EXPECT_TRUE(Window::exact(3).is_exact());
  EXPECT_EQ(Window::last(2, -4), Window({kUnbounded, -4}));
}

TEST(Window, ProductWindow) {
  // mu = max(mu_a + nu_b, mu_b + nu_a)
  Window w = product_window(Window::box(1, -3), Bound{1}, Window::box(1, -2), Bound{0});
  EXPECT_EQ(w, Window::box(1, -1));
  Window e = product_window(Window::exact(1), Bound{2}, Window::exact(1), Bound{1});
  EXPECT_TRUE(e.is_exact());
  EXPECT_EQ(bound_add(Bound{1, kUnbounded}, Bound{2, 3}), (Bound{3, kUnbounded}));
}

TEST(Jet, DerivedAndRendered) {
  JetStyle st = JetStyle::standard(2);
  JetVariable a("a");
  JetVariable axy = a.derived(MultiIndex{0, 1}).derived(MultiIndex{1, 0});
  EXPECT_EQ(st(axy), "a_{xy}");
  EXPECT_EQ(axy.order(), 2);
  JetVariable ayy = a.derived(MultiIndex{0, 1}, 2);
  EXPECT_EQ(st(ayy), "a_{yy}");
  EXPECT_EQ(st(a.derived(MultiIndex{1, 1})), "a_{t[1,1]}");
  st.aliases[MultiIndex{1, 1}] = "s";
  EXPECT_EQ(st(a.derived(MultiIndex{1, 1}).derived(MultiIndex{0, 1})), "a_{ys}");
  EXPECT_THROW(a.derived(MultiIndex{1, 0}, -1), DomainError);
}

TEST(Jet, DerivesFrom) {
  JetVariable a("a");
  JetVariable ay = a.derived(MultiIndex{0, 1});
  JetVariable axy = ay.derived(MultiIndex{1, 0});
  JetVariable::Profile rest;
  ASSERT_TRUE(axy.derives_from(ay, &rest));
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_EQ(rest[0].first, (MultiIndex{1, 0}));
  EXPECT_FALSE(ay.derives_from(axy));
  EXPECT_FALSE(ay.derives_from(JetVariable("b")));
}

TEST(Jet, FreeDerivationIsLeibniz) {
  DiffPoly a = symbol("a"), b = symbol("b");
  const MultiIndex x{1, 0};
  EXPECT_EQ(dp_derive(a * b, x), jet(JetVariable("a").derived(x)) * b + a * jet(JetVariable("b").derived(x)));
  EXPECT_EQ(dp_derive(DiffPoly(5), x), DiffPoly());
  EXPECT_EQ(dp_derive(a * a, x, 2), poly("2*a_{x}^2 + 2*a*a_{xx}"));
}

TEST(Jet, EvolutionaryDerivation) {
  FlowRules rules;
  const MultiIndex t{1, 1};
  rules.set("a", t, poly("b_{x}"));
  // x-directions ignore the table; t-flows commute with x
  EXPECT_EQ(dp_derive(poly("a_{y}"), t, rules), poly("b_{xy}"));
  EXPECT_EQ(dp_derive(poly("a^2"), t, rules), poly("2*a*b_{x}"));
  EXPECT_EQ(dp_derive(poly("a"), MultiIndex{1, 0}, rules), poly("a_{x}"));
  EXPECT_THROW(dp_derive(poly("b"), t, rules), MissingRuleError);
}
