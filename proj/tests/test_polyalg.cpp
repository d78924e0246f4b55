#include <gtest/gtest.h>

#include <random>

#include "momentot/polyalg.hpp"

using namespace momentot;

namespace {

// Pascal triangle, independent of momentot::binomial
std::size_t pascal(std::size_t n, std::size_t k)
{
  std::vector<std::vector<std::size_t>> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i].assign(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return k > n ? 0 : t[n][k];
}

Polynomial random_poly(std::mt19937& g, std::size_t n, int deg, int nterms)
{
  std::uniform_int_distribution<int> e(0, deg);
  std::uniform_int_distribution<int> c(-5, 5);
  Polynomial p(n);
  for (int t = 0; t < nterms; ++t) {
    std::vector<int> a(n);
    int left = deg;
    for (auto& v : a) {
      v = std::uniform_int_distribution<int>(0, left)(g);
      left -= v;
    }
    p.add_term(MultiIndex(a), c(g));
  }
  (void)e;
  return p;
}

}  // namespace

TEST(MultiIndex, RejectsNegativeExponent) { EXPECT_THROW(MultiIndex({1, -1}), std::invalid_argument); }

TEST(MultiIndex, DegreeIsSum)
{
  MultiIndex a{3, 0, 2};
  EXPECT_EQ(a.degree(), 5);
  EXPECT_EQ(a.size(), 3u);
}

TEST(Enumerate, OneDimensionalDegreeTwo)
{
  auto idx = enumerate_indices(1, 2);
  ASSERT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx[0], MultiIndex({0}));
  EXPECT_EQ(idx[1], MultiIndex({1}));
  EXPECT_EQ(idx[2], MultiIndex({2}));
}

TEST(Enumerate, TwoDimensionalDegreeOne)
{
  auto idx = enumerate_indices(2, 1);
  ASSERT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx[0], MultiIndex({0, 0}));
  EXPECT_EQ(idx[1], MultiIndex({1, 0}));
  EXPECT_EQ(idx[2], MultiIndex({0, 1}));
}

TEST(Enumerate, TwoDimensionalDegreeFiveHas21) { EXPECT_EQ(enumerate_indices(2, 5).size(), 21u); }

TEST(Enumerate, CountsMatchBinomialTable)
{
  for (std::size_t n = 1; n <= 4; ++n)
    for (int r = 0; r <= 8; ++r) EXPECT_EQ(enumerate_indices(n, r).size(), pascal(n + r, r)) << n << " " << r;
}

TEST(Enumerate, SortedUniqueAndRankConsistent)
{
  for (std::size_t n = 1; n <= 4; ++n) {
    auto idx = enumerate_indices(n, 6);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      EXPECT_EQ(grlex_rank(idx[i]), i);
      if (i) EXPECT_TRUE(idx[i - 1] < idx[i]);
    }
  }
}

TEST(Enumerate, RejectsBadArguments)
{
  EXPECT_THROW(enumerate_indices(0, 2), std::invalid_argument);
  EXPECT_THROW(enumerate_indices(2, -1), std::invalid_argument);
}

TEST(Polynomial, SquareOfDifference)
{
  auto x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  auto p = (x1 - x2).pow(2);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.coefficient({2, 0}), 1.0);
  EXPECT_EQ(p.coefficient({1, 1}), -2.0);
  EXPECT_EQ(p.coefficient({0, 2}), 1.0);
}

TEST(Polynomial, OneIsIdentity)
{
  std::mt19937 g(1);
  auto p = random_poly(g, 3, 4, 6);
  EXPECT_EQ(Polynomial::constant(3, 1.0) * p, p);
}

TEST(Polynomial, CubeOfSum)
{
  auto x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  auto p = (x1 + x2).pow(3);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.coefficient({3, 0}), 1.0);
  EXPECT_EQ(p.coefficient({2, 1}), 3.0);
  EXPECT_EQ(p.coefficient({1, 2}), 3.0);
  EXPECT_EQ(p.coefficient({0, 3}), 1.0);
}

TEST(Polynomial, PrunesExactZeros)
{
  auto x = Polynomial::variable(1, 0);
  auto p = x - x;
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), 0);
}

TEST(Polynomial, DimensionMismatchThrows)
{
  EXPECT_THROW(Polynomial::variable(2, 0) + Polynomial::variable(3, 0), std::invalid_argument);
  EXPECT_THROW(Polynomial::variable(2, 0) * Polynomial::variable(3, 0), std::invalid_argument);
}

TEST(Polynomial, MultiplicationDegreeAdds)
{
  std::mt19937 g(2);
  for (int t = 0; t < 20; ++t) {
    auto a = random_poly(g, 3, 3, 5), b = random_poly(g, 3, 4, 5);
    if (a.is_zero() || b.is_zero()) continue;
    EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
  }
}

TEST(Polynomial, CommutativeAndAssociative)
{
  std::mt19937 g(3);
  for (int t = 0; t < 50; ++t) {
    auto a = random_poly(g, 3, 3, 4), b = random_poly(g, 3, 3, 4), c = random_poly(g, 3, 2, 4);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(Polynomial, TextRoundTrip)
{
  std::mt19937 g(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 30; ++t) {
    Polynomial p(3);
    for (int k = 0; k < 5; ++k) p.add_term(MultiIndex({t % 3, k % 2, k}), u(g));
    EXPECT_EQ(Polynomial::parse(p.to_string(), 3), p) << p.to_string();
  }
}

TEST(Polynomial, ParserAcceptsWhitespaceAndZeroPowers)
{
  auto p = Polynomial::parse("  2 * x1^2*x2^0 -3*x2 + 0.5 ", 2);
  EXPECT_EQ(p.coefficient({2, 0}), 2.0);
  EXPECT_EQ(p.coefficient({0, 1}), -3.0);
  EXPECT_EQ(p.coefficient({0, 0}), 0.5);
  EXPECT_EQ(Polynomial::parse("x1*x1", 1).coefficient({2}), 1.0);
  EXPECT_THROW(Polynomial::parse("x3", 2), std::invalid_argument);
  EXPECT_THROW(Polynomial::parse("2 x1", 2), std::invalid_argument);
  EXPECT_THROW(Polynomial::parse("", 2), std::invalid_argument);
}

TEST(Polynomial, ComposeAffineMatchesEvaluation)
{
  std::mt19937 g(5);
  std::uniform_real_distribution<double> u(-1, 1);
  auto p = random_poly(g, 2, 4, 6);
  std::vector<double> o{0.3, -0.2}, s{1.7, 0.4};
  auto q = p.compose_affine(o, s);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x{u(g), u(g)};
    std::vector<double> z{o[0] + s[0] * x[0], o[1] + s[1] * x[1]};
    EXPECT_NEAR(q.evaluate(x), p.evaluate(z), 1e-10 * (1 + std::abs(p.evaluate(z))));
  }
}

TEST(Polynomial, PartialEvaluate)
{
  auto p = Polynomial::parse("x1^2*x2 + 3*x2*x3 - x3", 3);
  std::vector<double> v{2.0};
  auto q = p.partial_evaluate(1, v);  // x2 = 2
  EXPECT_EQ(q.dimension(), 2u);
  EXPECT_EQ(q.coefficient({2, 0}), 2.0);
  EXPECT_EQ(q.coefficient({0, 1}), 5.0);
}

TEST(ExpandAbsPowerEven, SquareAndFourthPower)
{
  auto x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  auto p2 = expand_abs_power_even(x - y, 2);
  EXPECT_EQ(p2, Polynomial::parse("x1^2 - 2*x1*x2 + x2^2", 2));
  auto p4 = expand_abs_power_even(x - y, 4);
  EXPECT_EQ(p4, Polynomial::parse("x1^4 - 4*x1^3*x2 + 6*x1^2*x2^2 - 4*x1*x2^3 + x2^4", 2));
}

TEST(ExpandAbsPowerEven, GromovBaseOfEightVariables)
{
  // variables x1 x2 x1' x2' y1 y2 y1' y2'
  auto v = [](std::size_t i) { return Polynomial::variable(8, i); };
  auto base = (v(0) - v(2)).pow(2) + (v(1) - v(3)).pow(2) - (v(4) - v(6)).pow(2) - (v(5) - v(7)).pow(2);
  auto p = expand_abs_power_even(base, 2);
  EXPECT_EQ(p.dimension(), 8u);
  EXPECT_EQ(p.degree(), 4);
  EXPECT_EQ(p.coefficient(MultiIndex::unit(8, 0, 4)), 1.0);
  // brute-force: value of the square at points matches
  std::mt19937 g(6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> z(8);
    for (auto& zi : z) zi = u(g);
    const double b = base.evaluate(z);
    EXPECT_NEAR(p.evaluate(z), b * b, 1e-12);
  }
}

TEST(ExpandAbsPowerEven, RejectsOddOrSmallPowers)
{
  auto x = Polynomial::variable(1, 0);
  EXPECT_THROW(expand_abs_power_even(x, 3), std::invalid_argument);
  EXPECT_THROW(expand_abs_power_even(x, 0), std::invalid_argument);
}

TEST(ExpandAbsPowerEven, RandomPointsAndTermBound)
{
  std::mt19937 g(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int p : {2, 4, 6}) {
    auto base = random_poly(g, 3, 2, 4);
    auto e = expand_abs_power_even(base, p);
    const std::size_t N = base.size();
    EXPECT_LE(e.size(), pascal(N + p - 1, p));
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x{u(g), u(g), u(g)};
      const double ref = std::pow(base.evaluate(x), p);
      EXPECT_NEAR(e.evaluate(x), ref, 1e-12 * std::max(1.0, std::abs(ref)) + 1e-12);
    }
  }
}

TEST(SemialgebraicSet, BallIsAlwaysFirst)
{
  SemialgebraicSet s(2, {Polynomial::parse("x1", 2)}, 2.0);
  ASSERT_EQ(s.inequalities().size(), 2u);
  EXPECT_EQ(s.inequalities()[0], Polynomial::parse("4 - x1^2 - x2^2", 2));
  // user-provided ball is not duplicated
  SemialgebraicSet t(2, {Polynomial::parse("4 - x1^2 - x2^2", 2)}, 2.0);
  EXPECT_EQ(t.inequalities().size(), 1u);
}

TEST(SemialgebraicSet, RejectsConstantInequality)
{
  EXPECT_THROW(SemialgebraicSet(1, {Polynomial::constant(1, 1.0)}, 1.0), std::invalid_argument);
  EXPECT_THROW(SemialgebraicSet(1, {}, 0.0), std::invalid_argument);
}

TEST(SemialgebraicSet, CanonicalSetsNonnegativeInside)
{
  std::mt19937 g(8);
  std::uniform_real_distribution<double> u(0, 1);
  auto box = SemialgebraicSet::box({0.0, -1.0}, {1.0, 2.0});
  auto nbox = box.normalized();
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x{u(g), -1.0 + 3.0 * u(g)};
    EXPECT_TRUE(box.contains(x));
    EXPECT_TRUE(nbox.contains(nbox.frame().to_normalized(x), 1e-12));
  }
  std::vector<double> out{1.5, 0.0};
  EXPECT_FALSE(box.contains(out));
  EXPECT_EQ(nbox.ball_radius(), 1.0);
  // corners of the box sit on the unit sphere after normalization
  std::vector<double> corner{1.0, 2.0};
  auto z = nbox.frame().to_normalized(corner);
  EXPECT_NEAR(z[0] * z[0] + z[1] * z[1], 1.0, 1e-14);
}

TEST(ProductSet, TwoUnitBoxes)
{
  auto b = SemialgebraicSet::box({-1.0}, {1.0});
  auto [s, ps] = product_set({b, b});
  EXPECT_EQ(s.dimension(), 2u);
  EXPECT_EQ(s.inequalities().size(), 5u);  // ball + 4 box inequalities
  EXPECT_EQ(ps.lifted_count(), 5u);
  EXPECT_NEAR(s.ball_radius(), std::sqrt(2.0), 1e-15);
}

TEST(ProductSet, SingleFactorIsIdentity)
{
  auto b = SemialgebraicSet::box({0.0, 0.0}, {1.0, 1.0});
  auto [s, ps] = product_set({b});
  EXPECT_EQ(s.inequalities(), b.inequalities());
  EXPECT_EQ(ps.factors(), 1u);
}

TEST(ProductSet, ThreeFactorsCounting)
{
  auto a = SemialgebraicSet::box({0.0}, {1.0});
  auto c = SemialgebraicSet::box({0.0, 0.0}, {1.0, 1.0});
  auto [s, ps] = product_set({a, c, a});
  EXPECT_EQ(s.dimension(), 4u);
  EXPECT_EQ(ps.dimension(), 4u);
  EXPECT_EQ(s.inequalities().size(), 2u + 4u + 2u + 1u);
  EXPECT_EQ(ps.lifted_count(), s.inequalities().size());
  EXPECT_EQ(ps.offset(2), 3u);
  auto [s2, ps2] = product_set({a, c, a}, true);
  EXPECT_EQ(s2.inequalities().size(), 3u + 5u + 3u + 1u);
  EXPECT_EQ(ps2.lifted_count(), s2.inequalities().size());
}

TEST(ProductSet, LiftedInequalitiesActOnOwnBlock)
{
  auto a = SemialgebraicSet::box({0.0}, {1.0});
  auto c = SemialgebraicSet::box({2.0}, {3.0});
  auto [s, ps] = product_set({a, c});
  std::vector<double> inside{0.5, 2.5}, outside{2.5, 0.5};
  EXPECT_TRUE(s.contains(inside));
  EXPECT_FALSE(s.contains(outside));
}
