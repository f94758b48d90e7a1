#include <gtest/gtest.h>

#include "support.hpp"

using namespace psdo;
using testing_support::Random;

// 500 seeded instances per property and dimension; exponents in [lo, 1] with
// windows down to -4.

namespace {

constexpr int kInstances = 500;

class Properties : public ::testing::TestWithParam<std::size_t> {
 protected:
  std::size_t n() const { return GetParam(); }
  PsdOp random_op(Random& rng) { return rng.op(n(), rng.uniform(-4, -1), rng.uniform(0, 1), 3); }
};

std::string describe(const PsdOp& a) { return render(a, JetStyle::standard(a.dimension())); }

}  // namespace

TEST_P(Properties, Associativity) {
  Random rng(100 + static_cast<unsigned>(n()));
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = random_op(rng), b = random_op(rng), c = random_op(rng);
    PsdOp left = ps_mul(ps_mul(a, b), c), right = ps_mul(a, ps_mul(b, c));
    ASSERT_TRUE(window_equal(left, right)) << describe(a) << " | " << describe(b) << " | " << describe(c);
  }
}

TEST_P(Properties, Distributivity) {
  Random rng(200 + static_cast<unsigned>(n()));
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = random_op(rng), b = random_op(rng), c = random_op(rng);
    ASSERT_TRUE(window_equal(ps_mul(a, ps_add(b, c)), ps_add(ps_mul(a, b), ps_mul(a, c))));
    ASSERT_TRUE(window_equal(ps_mul(ps_add(a, b), c), ps_add(ps_mul(a, c), ps_mul(b, c))));
  }
}

TEST_P(Properties, AdjointAntiHomomorphism) {
  Random rng(300 + static_cast<unsigned>(n()));
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = random_op(rng), b = random_op(rng);
    PsdOp lhs = ps_adjoint(ps_mul(a, b));
    PsdOp rhs = ps_mul(ps_adjoint(b), ps_adjoint(a));
    ASSERT_TRUE(window_equal(lhs, rhs)) << describe(a) << " | " << describe(b);
  }
}

TEST_P(Properties, AdjointInvolution) {
  Random rng(400 + static_cast<unsigned>(n()));
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = random_op(rng);
    PsdOp back = ps_adjoint(ps_adjoint(a));
    ASSERT_EQ(back.window(), a.window());
    ASSERT_TRUE(window_equal(back, a)) << describe(a);
  }
}

TEST_P(Properties, SplitProjection) {
  Random rng(500 + static_cast<unsigned>(n()));
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = random_op(rng);
    auto [plus, minus] = ps_split(a);
    ASSERT_TRUE(window_equal(ps_add(plus, minus), a));
    ASSERT_TRUE(window_equal(ps_plus(plus), plus));
    ASSERT_TRUE(ps_minus(plus).is_zero());
    ASSERT_TRUE(ps_plus(minus).is_zero());
    ASSERT_TRUE(window_equal(ps_minus(minus), minus));
    ASSERT_TRUE(ps_in_pminus(minus));
  }
}

// Exact operators truncated at two windows: each truncated product agrees
// with the untruncated product everywhere inside its own derived window, so
// the two agree on the intersection.
TEST_P(Properties, WindowSoundness) {
  Random rng(600 + static_cast<unsigned>(n()));
  const std::size_t dim = n();
  for (int i = 0; i < kInstances; ++i) {
    PsdOp a = rng.op(dim, -4, 1, 4), b = rng.op(dim, -4, 1, 4);
    // the reference sees every stored term and is asked for more than any
    // truncated product can claim
    PsdOp ref = ps_mul(a, b, Window::box(dim, -7));
    const int l1 = rng.uniform(-4, -1), l2 = rng.uniform(-4, -1);
    PsdOp a1 = a.truncated(Window::box(dim, l1)), b1 = b.truncated(Window::box(dim, rng.uniform(-4, -1)));
    PsdOp a2 = a.truncated(Window::box(dim, l2)), b2 = b.truncated(Window::box(dim, rng.uniform(-4, -1)));
    PsdOp p1 = ps_mul(a1, b1), p2 = ps_mul(a2, b2);
    ASSERT_TRUE(ref.window().covers(p1.window()));
    ASSERT_TRUE(window_equal(p1, ref)) << "window " << p1.window().to_string();
    ASSERT_TRUE(window_equal(p2, ref)) << "window " << p2.window().to_string();
    ASSERT_TRUE(window_equal(p1, p2));
  }
}

TEST_P(Properties, InverseBothSides) {
  Random rng(700 + static_cast<unsigned>(n()));
  const std::size_t dim = n();
  for (int i = 0; i < kInstances / 5; ++i) {
    PsdOp::TermMap t{{MultiIndex::zero(dim), DiffPoly(1)}};
    const int lo = rng.uniform(-4, -2);
    for (int k = rng.uniform(1, 3); k > 0; --k) {
      std::vector<int> e(dim);
      for (auto& v : e) v = rng.uniform(lo, 0);
      e[dim - 1] = rng.uniform(lo, -1);
      DiffPoly c = rng.diffpoly(dim);
      if (!c.is_zero()) t[MultiIndex(std::move(e))] += c;
    }
    PsdOp psi = PsdOp::from_terms(dim, std::move(t), Window::box(dim, lo));
    if (psi.coefficient(MultiIndex::zero(dim)) != DiffPoly(1)) continue;
    PsdOp inv = ps_inverse(psi);
    ASSERT_TRUE(window_equal(ps_mul(psi, inv), PsdOp::one(dim))) << describe(psi);
    ASSERT_TRUE(window_equal(ps_mul(inv, psi), PsdOp::one(dim))) << describe(psi);
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, Properties, ::testing::Values(1u, 2u, 3u),
                         [](const auto& info) { return "n" + std::to_string(info.param); });
