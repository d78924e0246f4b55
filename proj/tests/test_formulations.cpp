#include <gtest/gtest.h>

#include <random>

#include "momentot/relaxation.hpp"
#include "momentot/shapes.hpp"
#include "oracles.hpp"

using namespace momentot;

namespace {

constexpr double kTol = 1e-8;

SemialgebraicSet unit_box(std::size_t d) { return SemialgebraicSet::box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)); }

Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

double solved_rho(const GeneralizedMomentProblem& g, int r)
{
  auto res = solve_order(g, r);
  EXPECT_TRUE(res.solved()) << res.status_name() << " " << res.message;
  EXPECT_LE(res.max_equality_violation, 10 * kTol);
  EXPECT_GE(res.min_psd_eigenvalue, -10 * kTol);
  return res.rho;
}

// moments of the atoms of a coupling with weight only where keep(point) holds
TruncatedMomentSequence restricted(const std::vector<std::vector<double>>& pts, const std::vector<double>& w, int degree,
                                   const std::function<bool(const std::vector<double>&)>& keep)
{
  std::vector<double> v(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) v[k] = keep(pts[k]) ? w[k] : 0.0;
  return oracle::atoms(pts, v, degree);
}

UniformMask small_face(double dx, double dy)
{
  return translated(rasterize(SmileyShape{0.25, 0.25, 0.15}, 16, 16, 0.0, 0.0, 0.5, 0.5), dx, dy);
}

}  // namespace

TEST(Multimarginal, DiracPairGivesSquaredDistance)
{
  auto g = build_multimarginal((var(2, 0) - var(2, 1)).pow(2), {oracle::dirac({0.2}, 2), oracle::dirac({0.7}, 2)},
                               {unit_box(1), unit_box(1)});
  EXPECT_NEAR(solved_rho(g, 1), 0.25, 1e-7);
}

TEST(Multimarginal, ConstantCostIsMass)
{
  auto g = build_multimarginal(Polynomial::constant(2, 1.0), {oracle::uniform(0, 1, 4), oracle::uniform(0.2, 0.6, 4)},
                               {unit_box(1), unit_box(1)});
  EXPECT_NEAR(solved_rho(g, 2), 1.0, 1e-7);
}

TEST(Multimarginal, IdenticalUniformGivesZero)
{
  auto mu = oracle::uniform(0, 1, 4);
  auto g = build_multimarginal((var(2, 0) - var(2, 1)).pow(2), {mu, mu}, {unit_box(1), unit_box(1)});
  EXPECT_NEAR(solved_rho(g, 2), 0.0, 1e-7);
}

TEST(Multimarginal, Errors)
{
  auto mu = oracle::uniform(0, 1, 2);
  EXPECT_THROW(build_multimarginal(var(3, 0), {mu, mu}, {unit_box(1), unit_box(1)}), std::invalid_argument);
  auto half = mu;
  half.values() *= 0.5;
  EXPECT_THROW(build_multimarginal(var(2, 0), {half, mu}, {unit_box(1), unit_box(1)}), std::invalid_argument);
  EXPECT_THROW(build_multimarginal(var(2, 0), {mu}, {unit_box(1), unit_box(1)}), std::invalid_argument);
}

TEST(WpEven, DiracCoefficientExpansion)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t d = 1; d <= 3; ++d)
    for (int p : {2, 4}) {
      std::vector<double> lo(d), hi(d), a(d), b(d);
      for (std::size_t i = 0; i < d; ++i) {
        lo[i] = -1.0 - 0.5 * i;
        hi[i] = 1.0 + 0.25 * i;
        a[i] = u(rng);
        b[i] = u(rng);
      }
      const auto set = SemialgebraicSet::box(lo, hi).normalized();
      auto g = build_wp_even(p, oracle::dirac(a, p), oracle::dirac(b, p), set);
      const auto& frame = g.variables[0].support.frame();
      auto y = reframe(tensor_product(oracle::dirac(a, p), oracle::dirac(b, p), p), frame);
      double exact = 0.0;
      for (std::size_t i = 0; i < d; ++i) exact += std::pow(a[i] - b[i], p);
      EXPECT_NEAR(std::get<LinearMomentFunctional>(g.objective).evaluate({y}), exact, 1e-12) << "d=" << d << " p=" << p;
    }
}

TEST(WpEven, RejectsOddPower)
{
  EXPECT_THROW(build_wp_even(3, oracle::dirac({0.0}, 4), oracle::dirac({1.0}, 4), unit_box(1)), std::invalid_argument);
}

TEST(WpEven, DiracShift)
{
  auto g = build_wp_even(2, oracle::dirac({0.0}, 2), oracle::dirac({0.3}, 2), unit_box(1));
  EXPECT_NEAR(solved_rho(g, 1), 0.09, 1e-7);
}

TEST(WpEven, TranslatedMaskGivesSquaredNorm)
{
  const auto set = unit_box(2);
  auto mu = descriptor_moments(small_face(0.1, 0.1), set, 2);
  auto nu = descriptor_moments(small_face(0.2, 0.3), set, 2);
  auto g = build_wp_even(2, mu, nu, set);
  EXPECT_NEAR(solved_rho(g, 1), 0.01 + 0.04, 1e-6);
}

TEST(WpOdd, DiracShift)
{
  auto g = build_wp_odd(1, oracle::dirac({0.0}, 2), oracle::dirac({0.4}, 2), unit_box(1));
  EXPECT_NEAR(solved_rho(g, 1), 0.4, 1e-6);
}

TEST(WpOdd, TranslatedMaskGivesL1Norm)
{
  const auto set = unit_box(2);
  auto mu = descriptor_moments(small_face(0.1, 0.1), set, 4);
  auto nu = descriptor_moments(small_face(0.2, 0.3), set, 4);
  auto g = build_wp_odd(1, mu, nu, set);
  EXPECT_NEAR(solved_rho(g, 2), 0.3, 1e-6);
}

TEST(WpOdd, ContinuousMarginalsMatchQuantileOracle)
{
  const double exact = oracle::quantile_cost([](double t) { return t; }, [](double t) { return std::cbrt(t); }, 1);
  auto g = build_wp_odd(1, oracle::uniform(0, 1, 4), oracle::power(2, 4), unit_box(1));
  auto res = solve_order(g, 2);
  ASSERT_TRUE(res.solved());
  EXPECT_NEAR(res.rho, exact, 1e-6);
}

TEST(WpOdd, RejectsEvenPower)
{
  EXPECT_THROW(build_wp_odd(2, oracle::dirac({0.0}, 4), oracle::dirac({1.0}, 4), unit_box(1)), std::invalid_argument);
}

TEST(WpOdd, SplitFormulationIdentity)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t d = 2;
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (int k = 0; k < 12; ++k) {
    pts.push_back({u(rng), u(rng), u(rng), u(rng)});
    w.push_back(1.0 / 12.0);
  }
  for (int p : {1, 3}) {
    const int deg = p + 1;
    std::vector<std::vector<double>> xs, ys;
    for (const auto& q : pts) {
      xs.push_back({q[0], q[1]});
      ys.push_back({q[2], q[3]});
    }
    auto g = build_wp_odd(p, oracle::atoms(xs, w, deg), oracle::atoms(ys, w, deg), unit_box(d));
    ASSERT_EQ(g.variables.size(), 2 * d);
    std::vector<TruncatedMomentSequence> seqs;
    double exact = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      auto plus = restricted(pts, w, deg, [&](const auto& q) { return q[i] - q[d + i] >= 0; });
      auto minus = restricted(pts, w, deg, [&](const auto& q) { return q[i] - q[d + i] < 0; });
      seqs.push_back(reframe(plus, g.variables[2 * i].support.frame()));
      seqs.push_back(reframe(minus, g.variables[2 * i + 1].support.frame()));
      for (std::size_t k = 0; k < pts.size(); ++k) exact += w[k] * std::pow(std::abs(pts[k][i] - pts[k][d + i]), p);
    }
    EXPECT_NEAR(std::get<LinearMomentFunctional>(g.objective).evaluate(seqs), exact, 1e-10) << "p=" << p;
  }
}

TEST(Piecewise, SinglePieceMatchesMultimarginal)
{
  auto mu = oracle::uniform(0, 1, 4), nu = oracle::atoms({{0.2}, {0.9}}, {0.5, 0.5}, 4);
  const auto cost = (var(2, 0) - var(2, 1)).pow(2);
  auto a = build_piecewise({{cost, {}}}, {mu, nu}, {unit_box(1), unit_box(1)});
  auto b = build_multimarginal(cost, {mu, nu}, {unit_box(1), unit_box(1)});
  auto ra = solve_order(a, 2), rb = solve_order(b, 2);
  ASSERT_TRUE(ra.solved());
  ASSERT_TRUE(rb.solved());
  EXPECT_NEAR(ra.rho, rb.rho, 1e-6);
}

TEST(Piecewise, AbsoluteValueMatchesOddSplit)
{
  auto mu = oracle::uniform(0, 1, 4), nu = oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 4);
  const auto diff = var(2, 0) - var(2, 1);
  auto a = build_piecewise({{diff, {diff}}, {-diff, {-diff}}}, {mu, nu}, {unit_box(1), unit_box(1)});
  auto b = build_wp_odd(1, mu, nu, unit_box(1));
  auto ra = solve_order(a, 2), rb = solve_order(b, 2);
  ASSERT_TRUE(ra.solved());
  ASSERT_TRUE(rb.solved());
  EXPECT_NEAR(ra.rho, rb.rho, 1e-6);
  EXPECT_LE(ra.rho, 0.25 + 10 * kTol);
}

TEST(Piecewise, PositivePart)
{
  const auto diff = var(2, 0) - var(2, 1);
  auto g = build_piecewise({{diff, {diff}}, {Polynomial(2), {-diff}}}, {oracle::dirac({1.0}, 2), oracle::dirac({0.0}, 2)},
                           {unit_box(1), unit_box(1)});
  EXPECT_NEAR(solved_rho(g, 1), 1.0, 1e-6);
}

TEST(Piecewise, Errors)
{
  auto mu = oracle::uniform(0, 1, 2);
  EXPECT_THROW(build_piecewise({}, {mu, mu}, {unit_box(1), unit_box(1)}), std::invalid_argument);
  EXPECT_THROW(build_piecewise({{var(3, 0), {}}}, {mu, mu}, {unit_box(1), unit_box(1)}), std::invalid_argument);
}

TEST(BarycenterWp, SingleMeasure)
{
  auto mu = oracle::uniform(0.2, 0.7, 4);
  auto g = build_barycenter_wp(2, {mu}, {1.0}, unit_box(1));
  auto res = solve_order(g, 2);
  ASSERT_TRUE(res.solved());
  EXPECT_NEAR(res.rho, 0.0, 1e-7);
  // moment errors scale like the square root of the residual cost
  auto bar = to_original(g.extract("barycenter", res.sequences));
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(bar.at(MultiIndex({k})), mu.at(MultiIndex({k})), 1e-4);
}

TEST(BarycenterWp, TwoDiracsMeetHalfway)
{
  const double a = 0.2, b = 0.8;
  auto g = build_barycenter_wp(2, {oracle::dirac({a}, 2), oracle::dirac({b}, 2)}, {0.5, 0.5}, unit_box(1));
  auto res = solve_order(g, 1);
  ASSERT_TRUE(res.solved());
  EXPECT_NEAR(res.rho, (a - b) * (a - b) / 4.0, 1e-7);
  auto bar = to_original(g.extract("barycenter", res.sequences));
  EXPECT_NEAR(bar.at(MultiIndex({1})), 0.5 * (a + b), 1e-6);
  EXPECT_NEAR(bar.at(MultiIndex({2})), 0.25 * (a + b) * (a + b), 1e-6);
}

TEST(BarycenterWp, FourTranslatesCenterOnAverageMean)
{
  const auto set = unit_box(2);
  const double t = 0.1;
  std::vector<TruncatedMomentSequence> ms;
  double mx = 0.0, my = 0.0;
  for (double sx : {-t, t})
    for (double sy : {-t, t}) {
      ms.push_back(descriptor_moments(small_face(0.25 + sx, 0.25 + sy), set, 2));
      auto o = to_original(ms.back());
      mx += 0.25 * o.at(MultiIndex({1, 0}));
      my += 0.25 * o.at(MultiIndex({0, 1}));
    }
  auto g = build_barycenter_wp(2, ms, {0.25, 0.25, 0.25, 0.25}, set);
  auto res = solve_order(g, 1);
  ASSERT_TRUE(res.solved());
  auto bar = to_original(g.extract("barycenter", res.sequences));
  EXPECT_NEAR(bar.at(MultiIndex({1, 0})), mx, 1e-6);
  EXPECT_NEAR(bar.at(MultiIndex({0, 1})), my, 1e-6);
}

TEST(BarycenterWp, OddPowerBuildsSplitPairs)
{
  auto g = build_barycenter_wp(1, {oracle::dirac({0.2, 0.2}, 2), oracle::dirac({0.6, 0.4}, 2)}, {0.5, 0.5}, unit_box(2));
  EXPECT_EQ(g.variables.size(), 2u * 2u * 2u);
  auto res = solve_order(g, 1);
  ASSERT_TRUE(res.solved());
  // any point between the two Diracs is a barycenter for the l1 cost
  EXPECT_NEAR(res.rho, 0.5 * (0.4 + 0.2), 1e-6);
}

TEST(BarycenterWp, WeightErrors)
{
  auto mu = oracle::dirac({0.5}, 2);
  EXPECT_THROW(build_barycenter_wp(2, {mu, mu}, {0.6, 0.6}, unit_box(1)), std::invalid_argument);
  EXPECT_THROW(build_barycenter_wp(2, {mu, mu}, {1.2, -0.2}, unit_box(1)), std::invalid_argument);
  EXPECT_THROW(build_barycenter_wp(2, {mu, mu}, {1.0}, unit_box(1)), std::invalid_argument);
  EXPECT_NO_THROW(build_barycenter_wp(2, {mu, mu}, {0.5 + 1e-11, 0.5}, unit_box(1)));
}

TEST(GwEven, DiagonalCouplingOfEqualDiracsIsZero)
{
  const auto set = unit_box(2);
  auto mu = oracle::dirac({0.3, 0.6}, 4);
  auto g = build_gw_pq(2, 2, mu, mu, set, set);
  EXPECT_TRUE(g.is_quadratic());
  auto y = reframe(tensor_product(mu, mu, 4), g.variables[0].support.frame());
  EXPECT_NEAR(std::get<QuadraticMomentFunctional>(g.objective).evaluate({y}), 0.0, 1e-14);
}

TEST(GwEven, QuadraticValueMatchesAtomOracle)
{
  const std::vector<double> x{0.0, 1.0}, yv{0.0, 2.0};
  const auto setX = unit_box(1), setY = SemialgebraicSet::box({0.0}, {2.0});
  auto g = build_gw_pq(2, 2, oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 4), oracle::atoms({{0.0}, {2.0}}, {0.5, 0.5}, 4),
                       setX, setY);
  for (double s : {0.0, 0.1, 0.25, 0.5}) {
    const std::vector<std::vector<double>> P{{s, 0.5 - s}, {0.5 - s, s}};
    auto plan = oracle::atoms({{0.0, 0.0}, {0.0, 2.0}, {1.0, 0.0}, {1.0, 2.0}}, {P[0][0], P[0][1], P[1][0], P[1][1]}, 4);
    auto y = reframe(plan, g.variables[0].support.frame());
    EXPECT_NEAR(std::get<QuadraticMomentFunctional>(g.objective).evaluate({y}), oracle::gw22(x, yv, P), 1e-11);
  }
}

TEST(GwEven, Errors)
{
  auto mu = oracle::dirac({0.5}, 4);
  EXPECT_THROW(build_gw_even(3, lq_cost(1, 2), lq_cost(1, 2), mu, mu, unit_box(1), unit_box(1)), std::invalid_argument);
  EXPECT_THROW(build_gw_pq(2, 3, mu, mu, unit_box(1), unit_box(1)), std::invalid_argument);
  EXPECT_THROW(build_gw_even(2, lq_cost(2, 2), lq_cost(1, 2), mu, mu, unit_box(1), unit_box(1)), std::invalid_argument);
}

TEST(GwLinearize, SingleTerm)
{
  GeneralizedMomentProblem g;
  g.variables.push_back({"y", SemialgebraicSet(1, {}, 1.0), VariableRole::Auxiliary, MassBound::Equal, std::nullopt});
  QuadraticMomentFunctional q;
  q.terms.push_back({0, MultiIndex({1}), MultiIndex({2}), 1.0});
  g.objective = q;
  TruncatedMomentSequence prev(1, 2);
  prev.at(MultiIndex({0})) = 1.0;
  prev.at(MultiIndex({2})) = 2.0;
  auto lin = gw_linearize(g, prev);
  ASSERT_EQ(lin.terms.size(), 1u);
  EXPECT_EQ(lin.terms[0].index, MultiIndex({1}));
  EXPECT_DOUBLE_EQ(lin.terms[0].coefficient, 2.0);
  EXPECT_THROW(gw_linearize(g, TruncatedMomentSequence(1, 1)), std::exception);
}

TEST(GwLinearize, DiracFreezesSecondCopy)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t d : {1u, 2u}) {
    const auto setX = SemialgebraicSet::box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)).normalized();
    const auto setY = SemialgebraicSet::ball(std::vector<double>(d, 0.5), 0.75).normalized();
    std::vector<double> a(d), b(d);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    auto g = build_gw_pq(2, 2, oracle::dirac(a, 4), oracle::dirac(b, 4), setX, setY);
    const auto& frame = g.variables[0].support.frame();
    std::vector<double> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto lin = gw_linearize(g, reframe(oracle::dirac(ab, 4), frame));
    Polynomial got(2 * d);
    for (const auto& t : lin.terms) got = got + Polynomial::monomial(t.index, t.coefficient);
    // ((|x - a|^2 - |y - b|^2)^2 on (x, y), then in the plan frame
    Polynomial dx(2 * d), dy(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      dx = dx + (var(2 * d, i) - a[i]).pow(2);
      dy = dy + (var(2 * d, d + i) - b[i]).pow(2);
    }
    const Polynomial want = (dx - dy).pow(2).compose_affine(frame.offset, frame.scale);
    for (const auto& alpha : enumerate_indices(2 * d, 4))
      EXPECT_NEAR(got.coefficient(alpha), want.coefficient(alpha), 1e-10) << "d=" << d << " " << alpha.to_string();
  }
}

TEST(Symmetry, SwappingMarginals)
{
  auto mu = oracle::uniform(0, 1, 4), nu = oracle::uniform(0.25, 0.75, 4);
  auto a = solve_order(build_wp_even(2, mu, nu, unit_box(1)), 2), b = solve_order(build_wp_even(2, nu, mu, unit_box(1)), 2);
  ASSERT_TRUE(a.solved());
  ASSERT_TRUE(b.solved());
  EXPECT_NEAR(a.rho, b.rho, 1e-7);

  auto atoms = oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 4);
  auto c = solve_order(build_wp_odd(1, mu, atoms, unit_box(1)), 2), e = solve_order(build_wp_odd(1, atoms, mu, unit_box(1)), 2);
  ASSERT_TRUE(c.solved());
  ASSERT_TRUE(e.solved());
  EXPECT_NEAR(c.rho, e.rho, 1e-6);
}

TEST(Invariants, MarginalsAndMassAtOptimum)
{
  auto mu = oracle::uniform(0, 1, 6), nu = oracle::power(2, 6);
  auto g = build_wp_even(2, mu, nu, unit_box(1));
  auto res = solve_order(g, 3);
  ASSERT_EQ(res.status, SolveStatus::Optimal) << res.message;
  auto plan = g.extract("plan", res.sequences);
  EXPECT_NEAR(plan.mass(), 1.0, 10 * kTol);
  const auto& ps = *g.variables[0].structure;
  for (const auto& beta : enumerate_indices(1, 6)) {
    EXPECT_NEAR(plan.at(embed_marginal_index(beta, 0, ps)), g.marginals[0].at(beta), 10 * kTol);
    EXPECT_NEAR(plan.at(embed_marginal_index(beta, 1, ps)), g.marginals[1].at(beta), 10 * kTol);
  }
}
