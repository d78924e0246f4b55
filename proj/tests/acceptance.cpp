// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "momentot/gw.hpp"
#include "momentot/postprocess.hpp"
#include "momentot/shapes.hpp"
#include "oracles.hpp"
#include "sdpa_reader.hpp"

using namespace momentot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::map<int, std::pair<bool, std::string>> verdicts;

void report(int id, bool ok, const std::string& what)
{
  verdicts[id] = {ok, what};
  std::cerr << "criterion " << id << " done" << std::endl;
}

// solved runs collected for the property checks
std::vector<RelaxationResult> solved_runs;

std::vector<RelaxationResult> sweep(const GeneralizedMomentProblem& g, int r0, int r1)
{
  auto rs = hierarchy(g, r0, r1);
  for (const auto& r : rs)
    if (r.status == SolveStatus::Optimal) solved_runs.push_back(r);
  return rs;
}

std::string rho_list(const std::vector<RelaxationResult>& rs)
{
  std::string s;
  for (const auto& r : rs) s += (s.empty() ? "" : " ") + ("r=" + std::to_string(r.order) + ":" + num(r.rho) + "[" + r.status_name() + "]");
  return s;
}

bool nondecreasing(const std::vector<double>& v, double slack)
{
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - slack) return false;
  return true;
}

std::vector<double> rhos(const std::vector<RelaxationResult>& rs)
{
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.rho);
  return v;
}

bool all_solved(const std::vector<RelaxationResult>& rs)
{
  for (const auto& r : rs)
    if (!r.solved()) return false;
  return true;
}

SemialgebraicSet unit_box(std::size_t d)
{
  return SemialgebraicSet::box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)).normalized();
}

const UniformMask& base_mask()
{
  static const UniformMask m = rasterize(SmileyShape{0.35, 0.35, 0.22}, 40, 40);
  return m;
}

std::vector<double> monotone_w2, monotone_w1, monotone_q2, monotone_q1, monotone_gw;

void translation_w2()
{
  const auto t0 = Clock::now();
  const auto set = unit_box(2);
  auto mu = descriptor_moments(base_mask(), set, 6), nu = descriptor_moments(translated(base_mask(), 0.1, 0.2), set, 6);
  auto rs = sweep(build_wp_even(2, mu, nu, set), 1, 3);
  const double t = std::hypot(0.1, 0.2), secs = seconds_since(t0);
  double worst = 0.0;
  for (const auto& r : rs) worst = std::max(worst, std::abs(std::sqrt(std::max(r.rho, 0.0)) - t) / t);
  monotone_w2 = rhos(rs);
  report(1, all_solved(rs) && worst <= 1e-3 && secs <= 60.0,
         "W2 translation, max rel err " + num(worst) + ", " + rho_list(rs) + ", " + num(secs) + " s");
}

void translation_w1()
{
  const auto t0 = Clock::now();
  const auto set = unit_box(2);
  auto mu = descriptor_moments(base_mask(), set, 6), nu = descriptor_moments(translated(base_mask(), 0.1, 0.2), set, 6);
  auto rs = sweep(build_wp_odd(1, mu, nu, set), 2, 3);
  const double t = 0.3, secs = seconds_since(t0);
  double worst = 0.0;
  for (const auto& r : rs) worst = std::max(worst, std::abs(r.rho - t) / t);
  monotone_w1 = rhos(rs);
  report(2, all_solved(rs) && worst <= 1e-3 && secs <= 120.0,
         "W1 translation, max rel err " + num(worst) + ", " + rho_list(rs) + ", " + num(secs) + " s");
}

void quantiles()
{
  const auto set = unit_box(1);
  const double w2 = oracle::quantile_cost([](double s) { return s; }, [](double s) { return 0.25 + 0.5 * s; }, 2);
  const double w1 = oracle::quantile_cost([](double s) { return s; }, [](double s) { return s < 0.5 ? 0.0 : 1.0; }, 1);
  auto a = sweep(build_wp_even(2, oracle::uniform(0, 1, 6), oracle::uniform(0.25, 0.75, 6), set), 1, 3);
  auto b = sweep(build_wp_odd(1, oracle::uniform(0, 1, 6), oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 6), set), 1, 3);
  monotone_q2 = rhos(a);
  monotone_q1 = rhos(b);
  const double e2 = std::abs(a.back().rho - w2), e1 = std::abs(b.back().rho - w1);
  report(3, a.back().solved() && b.back().solved() && e2 <= 1e-4 && e1 <= 1e-4,
         "quantile oracles at r=3, W2^2 " + num(a.back().rho) + " vs " + num(w2) + " (err " + num(e2) + "), W1 " +
             num(b.back().rho) + " vs " + num(w1) + " (err " + num(e1) + ")");
}

void barycenter()
{
  const auto t0 = Clock::now();
  const auto set = SemialgebraicSet::box({-0.2, -0.2}, {1.2, 1.2}).normalized();
  const SmileyShape shape{0.5, 0.5, 0.2};
  const double t = 0.2;
  const auto center = rasterize(shape, 40, 40);
  std::vector<TruncatedMomentSequence> ms;
  double mx = 0.0, my = 0.0;
  for (double sx : {-t, t})
    for (double sy : {-t, t}) {
      ms.push_back(descriptor_moments(translated(center, sx, sy), set, 8));
      const auto o = to_original(ms.back());
      mx += 0.25 * o.at(MultiIndex({1, 0}));
      my += 0.25 * o.at(MultiIndex({0, 1}));
    }
  const auto truth = to_original(descriptor_moments(center, set, 4));
  auto g = build_barycenter_wp(2, ms, {0.25, 0.25, 0.25, 0.25}, set);
  double mean_err = 1e300;
  std::vector<double> errs;
  bool ok = true;
  std::string detail;
  for (int r = 2; r <= 4; ++r) {
    auto res = solve_order(g, r);
    ok = ok && res.solved();
    if (res.status == SolveStatus::Optimal) solved_runs.push_back(res);
    const auto bar = to_original(g.extract("barycenter", res.sequences));
    double e = 0.0;
    for (const auto& a : enumerate_indices(2, 4)) e = std::max(e, std::abs(bar.at(a) - truth.at(a)));
    errs.push_back(e);
    if (r == 3) mean_err = std::max(std::abs(bar.at(MultiIndex({1, 0})) - mx), std::abs(bar.at(MultiIndex({0, 1})) - my));
    detail += " r=" + std::to_string(r) + ":" + num(e) + "[" + res.status_name() + "]";
  }
  const bool decreasing = errs[1] < errs[0] && errs[2] < errs[1];
  report(5, ok && mean_err <= 1e-3 && decreasing,
         "barycenter mean err at r=3 " + num(mean_err) + ", max moment err up to order 4:" + detail + ", " +
             num(seconds_since(t0)) + " s");
}

void gw_isometry()
{
  const auto set = SemialgebraicSet::ball({0.5, 0.5}, 0.5);
  const auto e = sample_face(200, 1);
  auto mu = descriptor_moments(e, set, 6), nu = descriptor_moments(rotated(e, 0.7, 0.5, 0.5), set, 6);
  auto g = build_gw_pq(2, 2, mu, nu, set, set);
  FixedPointOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 10;
  bool ok = true;
  std::string detail;
  for (int r = 2; r <= 3; ++r) {
    const auto t0 = Clock::now();
    auto res = gw_fixed_point(g, r, std::nullopt, opts);
    const double secs = seconds_since(t0);
    monotone_gw.push_back(res.best_objective);
    ok = ok && res.converged && res.iterations <= 10 && res.best_objective <= 1e-4 && (r < 3 || secs <= 600.0);
    detail += " r=" + std::to_string(r) + ": " + num(res.best_objective) + " after " + std::to_string(res.iterations) +
              " iterations" + (res.converged ? "" : " (not converged)") + ", " + num(secs) + " s;";
  }
  report(6, ok, "GW isometry" + detail);
}

void monotonicity()
{
  const double slack = 1e-7;
  const bool ok = nondecreasing(monotone_w2, slack) && nondecreasing(monotone_w1, slack) &&
                  nondecreasing(monotone_q2, slack) && nondecreasing(monotone_q1, slack) &&
                  nondecreasing(monotone_gw, slack);
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + num(x);
    return "[" + s + "]";
  };
  report(4, ok,
         "rho_r nondecreasing: W2 " + list(monotone_w2) + " W1 " + list(monotone_w1) + " quantile W2 " +
             list(monotone_q2) + " quantile W1 " + list(monotone_q1) + " GW " + list(monotone_gw));
}

void gw_two_atoms()
{
  const std::vector<double> x{0.0, 1.0}, y{0.0, 2.0};
  auto mu = oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 4), nu = oracle::atoms({{0.0}, {2.0}}, {0.5, 0.5}, 4);
  auto g = build_gw_pq(2, 2, mu, nu, SemialgebraicSet::box({0.0}, {1.0}), SemialgebraicSet::box({0.0}, {2.0}));
  auto res = gw_fixed_point(g, 2);
  const double brute = oracle::gw22_two_atoms(x, 0.5, y, 0.5), err = std::abs(res.best_objective - brute);
  report(7, res.converged && err <= 1e-6,
         "GW two atoms, fixed point " + num(res.best_objective) + " vs brute force " + num(brute) + " (err " +
             num(err) + ")");
}

void christoffel_checks()
{
  const auto y = oracle::uniform(-1.0, 1.0, 2);
  const auto m = christoffel_model(y, 1);
  const double k0 = kernel_diag(m, std::vector<double>{0.0}), k1 = kernel_diag(m, std::vector<double>{1.0});
  bool ok = std::abs(k0 - 1.0) <= 1e-10 && std::abs(k1 - 4.0) <= 1e-10;
  double worst_margin = 1e300;
  std::string worst;
  const auto set = unit_box(2);
  for (std::uint64_t seed : {1, 2}) {
    const auto e = sample_face(300, seed);
    const auto ys = descriptor_moments(e, set, 8);
    for (int r = 1; r <= 4; ++r) {
      const auto model = christoffel_model(ys, r);
      for (double eta : {0.1, 0.3, 0.5}) {
        const double frac = support_estimate(model, e.points, eta).inside_fraction();
        const double margin = frac - (1.0 - eta - 0.02);
        if (margin < worst_margin) {
          worst_margin = margin;
          worst = "seed " + std::to_string(seed) + " r=" + std::to_string(r) + " eta=" + num(eta) + " inside " + num(frac);
        }
      }
    }
  }
  ok = ok && worst_margin >= 0.0;
  report(8, ok,
         "kappa(0)=" + num(k0) + " kappa(1)=" + num(k1) + ", Markov bound tightest case " + worst + " (margin " +
             num(worst_margin) + ")");
}

bool sdpa_exact(const ConicProgram& p)
{
  std::ostringstream os;
  export_sdpa(p, os);
  const auto q = testing_sdpa::parse(os.str());
  if (q.m != p.num_vars) return false;
  for (int j = 0; j < p.num_vars; ++j)
    if (q.c[j] != p.c[j]) return false;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.num_vars);
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    if (q.F[0][k] != -p.block_value(k, zero)) return false;
    std::vector<bool> seen(p.num_vars, false);
    for (const auto& [j, es] : p.blocks[k].coefficients) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p.blocks[k].size, p.blocks[k].size);
      for (const auto& e : es) A(e.row, e.col) = A(e.col, e.row) = e.value;
      if (q.F[j + 1][k] != A) return false;
      seen[j] = true;
    }
    for (int j = 0; j < p.num_vars; ++j)
      if (!seen[j] && !q.F[j + 1][k].isZero(0.0)) return false;
  }
  const std::size_t eb = p.blocks.size();
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    if (q.F[0][eb](2 * r, 2 * r) != p.b[r] || q.F[0][eb](2 * r + 1, 2 * r + 1) != -p.b[r]) return false;
    for (std::size_t t = 0; t < p.rows[r].index.size(); ++t) {
      const int j = p.rows[r].index[t];
      if (q.F[j + 1][eb](2 * r, 2 * r) != p.rows[r].value[t]) return false;
      if (q.F[j + 1][eb](2 * r + 1, 2 * r + 1) != -p.rows[r].value[t]) return false;
    }
  }
  std::ostringstream again;
  export_sdpa(p, again);
  return os.str() == again.str();
}

void properties()
{
  double worst_psd = 0.0, worst_eq = 0.0;
  for (const auto& r : solved_runs) {
    worst_psd = std::max(worst_psd, -r.min_psd_eigenvalue);
    worst_eq = std::max(worst_eq, r.max_equality_violation);
  }
  const bool residuals = !solved_runs.empty() && worst_psd <= 1e-7 && worst_eq <= 1e-7;

  const auto set = unit_box(2);
  auto mu = descriptor_moments(base_mask(), set, 6), nu = descriptor_moments(translated(base_mask(), 0.1, 0.2), set, 6);
  const auto even = assemble(build_wp_even(2, mu, nu, set), {2});
  const auto odd = assemble(build_wp_odd(1, mu, nu, set), {2});
  const bool sdpa = sdpa_exact(even.program) && sdpa_exact(odd.program);

  const auto a = solve(even.program), b = solve(even.program);
  const bool deterministic = a.x.size() == b.x.size() && a.x == b.x && a.multipliers == b.multipliers &&
                             a.report.primal_objective == b.report.primal_objective;

  const auto box1 = unit_box(1);
  auto u = oracle::uniform(0, 1, 6), v = oracle::power(2, 6), atoms = oracle::atoms({{0.0}, {1.0}}, {0.5, 0.5}, 6);
  const double s1 = std::abs(solve_order(build_wp_even(2, u, v, box1), 3).rho - solve_order(build_wp_even(2, v, u, box1), 3).rho);
  const double s2 = std::abs(solve_order(build_wp_even(2, mu, nu, set), 2).rho - solve_order(build_wp_even(2, nu, mu, set), 2).rho);
  const double s3 = std::abs(solve_order(build_wp_odd(1, u, atoms, box1), 2).rho - solve_order(build_wp_odd(1, atoms, u, box1), 2).rho);
  const double sym = std::max({s1, s2, s3});
  const bool symmetric = sym <= 1e-7;

  report(9, residuals && sdpa && deterministic && symmetric,
         "properties over " + std::to_string(solved_runs.size()) + " optimal solves: PSD residual " + num(worst_psd) +
             ", marginal residual " + num(worst_eq) + ", SDPA round trip " + (sdpa ? "exact" : "MISMATCH") +
             ", determinism " + (deterministic ? "bitwise" : "DIFFERS") + ", swap symmetry " + num(sym));
}

}  // namespace

int main()
{
  const auto t0 = Clock::now();
  translation_w2();
  translation_w1();
  quantiles();
  gw_isometry();
  monotonicity();
  barycenter();
  gw_two_atoms();
  christoffel_checks();
  properties();
  int failures = 0;
  for (const auto& [id, v] : verdicts) {
    std::cout << (v.first ? "PASS" : "FAIL") << " criterion " << id << ": " << v.second << "\n";
    failures += v.first ? 0 : 1;
  }
  std::cout << failures << " of " << verdicts.size() << " criteria failed, " << num(seconds_since(t0)) << " s" << std::endl;
  return failures ? 1 : 0;
}
