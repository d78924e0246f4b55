#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <variant>

#include "config.hpp"
#include "gw.hpp"
#include "io.hpp"
#include "postprocess.hpp"
#include "relaxation.hpp"

namespace momentot::app {

enum ExitCode : int { Ok = 0, ConfigFailure = 1, SolverFailure = 2, NoConvergence = 3 };

namespace fs = std::filesystem;
using nlohmann::json;

// a loaded marginal: a descriptor to integrate, or moments read from a file
using Source = std::variant<MeasureDescriptor, TruncatedMomentSequence>;

inline Empirical transformed(Empirical e, const MarginalSpec& m)
{
  if (m.rotate != 0.0) {
    if (e.points.empty() || e.points[0].size() != 2) throw ConfigError("rotate applies to 2-D points only");
    if (m.rotate_center.size() != 2) throw ConfigError("rotate_center needs two coordinates");
    e = rotated(e, m.rotate, m.rotate_center[0], m.rotate_center[1]);
  }
  if (!m.translate.empty()) {
    for (auto& p : e.points) {
      if (p.size() != m.translate.size()) throw ConfigError("translate: dimension mismatch");
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += m.translate[i];
    }
  }
  return e;
}

inline UniformMask transformed(UniformMask u, const MarginalSpec& m)
{
  if (m.rotate != 0.0) throw ConfigError("masks cannot be rotated");
  if (!m.translate.empty()) {
    if (m.translate.size() != 2) throw ConfigError("translate: masks are 2-D");
    u = translated(u, m.translate[0], m.translate[1]);
  }
  return u;
}

inline Source load_source(const MarginalSpec& m, const RunConfig& cfg, std::size_t n)
{
  if (m.origin.size() != 2 || m.extent.size() != 2) throw ConfigError("origin and extent take two values");
  if (m.type == "empirical") {
    Empirical e;
    if (!m.path.empty()) {
      e = io::read_empirical_csv(cfg.resolve(m.path), n);
    } else {
      e.points = m.points;
      for (const auto& p : e.points)
        if (p.size() != n) throw ConfigError("empirical points must have " + std::to_string(n) + " coordinates");
    }
    if (!m.weights.empty()) e.weights = m.weights;
    return MeasureDescriptor{transformed(std::move(e), m)};
  }
  if (m.type == "face") {
    if (n != 2) throw ConfigError("face samples are 2-D");
    return MeasureDescriptor{transformed(sample_face(m.count, cfg.seed), m)};
  }
  if (m.type == "mask") {
    const auto r = io::read_raster(cfg.resolve(m.path));
    return MeasureDescriptor{transformed(io::to_mask(r, m.origin[0], m.origin[1], m.extent[0], m.extent[1]), m)};
  }
  if (m.type == "smiley") {
    if (m.resolution.size() != 2 || m.shape.size() != 3) throw ConfigError("smiley needs resolution [rows, cols] and shape [cx, cy, radius]");
    const SmileyShape s{m.shape[0], m.shape[1], m.shape[2]};
    auto u = rasterize(s, m.resolution[0], m.resolution[1], m.origin[0], m.origin[1], m.extent[0], m.extent[1]);
    return MeasureDescriptor{transformed(std::move(u), m)};
  }
  if (m.type == "closed_form") {
    if (m.factors.size() != n) throw ConfigError("closed_form needs one factor per coordinate");
    ClosedForm c;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = m.factors[i];
      const double t = m.translate.empty() ? 0.0 : m.translate.at(i);
      if (f.kind == "uniform")
        c.factors.push_back(Measure1D::uniform(f.a + t, f.b + t));
      else if (f.kind == "dirac")
        c.factors.push_back(Measure1D::dirac(f.a + t));
      else if (f.kind == "power")
        c.factors.push_back(Measure1D::power(f.a + t, f.b + t, f.k));
      else
        throw ConfigError("unknown factor kind '" + f.kind + "'");
    }
    return MeasureDescriptor{c};
  }
  auto y = io::read_moments_csv(cfg.resolve(m.path));
  if (y.dimension() != n) throw ConfigError(m.path + ": moments of dimension " + std::to_string(y.dimension()) +
                                            ", expected " + std::to_string(n));
  return y;
}

inline TruncatedMomentSequence moments_of(const Source& s, const SemialgebraicSet& set, int degree)
{
  if (const auto* d = std::get_if<MeasureDescriptor>(&s)) return descriptor_moments(*d, set, degree);
  const auto& y = std::get<TruncatedMomentSequence>(s);
  if (y.degree() < degree)
    throw ConfigError("moment file has degree " + std::to_string(y.degree()) + ", " + std::to_string(degree) +
                      " is needed");
  return reframe(y.truncated(degree), set.frame());
}

// the second GW marginal and the GW barycenter inputs live on Y
inline bool on_y(const std::string& kind, std::size_t i) { return (kind == "gw" && i == 1) || kind == "gw_barycenter"; }

// everything a command needs, loaded and checked before any output is written
struct Prepared {
  RunConfig cfg;
  SemialgebraicSet X{1, {}, 1.0}, Y{1, {}, 1.0};
  std::vector<Source> sources;
  int r_first = 1, r_last = 1;

  std::vector<TruncatedMomentSequence> measures(int degree) const
  {
    std::vector<TruncatedMomentSequence> out;
    const auto& k = cfg.problem.kind;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto& set = on_y(k, i) ? Y : X;
      out.push_back(moments_of(sources[i], set, degree));
    }
    return out;
  }

  GeneralizedMomentProblem problem(int degree, std::size_t weight_set = 0) const
  {
    const auto& P = cfg.problem;
    const auto ms = measures(degree);
    if (P.kind == "wp") return P.p % 2 ? build_wp_odd(P.p, ms[0], ms[1], X) : build_wp_even(P.p, ms[0], ms[1], X);
    if (P.kind == "multimarginal") {
      const std::vector<SemialgebraicSet> sets(ms.size(), X);
      return build_multimarginal(Polynomial::parse(P.cost, X.dimension() * ms.size()), ms, sets);
    }
    if (P.kind == "barycenter_wp") return build_barycenter_wp(P.p, ms, P.weights.at(weight_set), X);
    if (P.kind == "gw") return build_gw_pq(P.p, P.q, ms[0], ms[1], X, Y);
    if (P.kind == "gw_barycenter") return build_gw_barycenter(ms, P.weights.at(weight_set), X, Y, P.p, P.q);
    throw ConfigError("problem kind '" + P.kind + "' has no optimization problem");
  }

  RelaxationOptions relaxation() const
  {
    RelaxationOptions o;
    o.solver.tol = cfg.solver.tol;
    o.solver.max_iter = cfg.solver.max_iter;
    o.solver.scaling = cfg.solver.scaling;
    o.solver.verbosity = cfg.solver.verbosity;
    o.assembly.schmudgen = cfg.solver.schmudgen;
    return o;
  }

  FixedPointOptions fixed_point() const
  {
    FixedPointOptions o;
    o.tol = cfg.fixed_point.tol;
    o.max_iter = cfg.fixed_point.max_iter;
    o.damping = cfg.fixed_point.damping;
    o.relaxation = relaxation();
    return o;
  }
};

inline Prepared prepare(RunConfig config)
{
  validate(config);
  Prepared p;
  p.cfg = std::move(config);
  const auto& cfg = p.cfg;
  const std::size_t n = cfg.set.dimension();
  p.X = cfg.set.build();
  p.Y = cfg.set_y ? cfg.set_y->build() : p.X;
  const auto& k = cfg.problem.kind;
  for (std::size_t i = 0; i < cfg.marginals.size(); ++i) {
    const std::size_t dim = on_y(k, i) ? p.Y.dimension() : n;
    try {
      p.sources.push_back(load_source(cfg.marginals[i], cfg, dim));
    } catch (const ConfigError& e) {
      throw ConfigError("marginals[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (k != "none") {
    // the minimal order depends on the cost and the sets only
    const bool gw = k == "gw" || k == "gw_barycenter";
    const int rs = p.problem(2 * std::max({cfg.order, cfg.order_max, gw ? 2 : 1})).minimal_order();
    p.r_first = cfg.order > 0 ? cfg.order : rs;
    p.r_last = cfg.order_max > 0 ? cfg.order_max : p.r_first;
    if (p.r_first < rs)
      throw ConfigError("relaxation order " + std::to_string(p.r_first) + " is below the minimal order r* = " +
                        std::to_string(rs));
    // load-time check that every marginal provides enough moments
    p.measures(2 * p.r_last);
  } else {
    p.r_first = cfg.order > 0 ? cfg.order : std::max(1, cfg.postprocess.christoffel_order);
    p.r_last = p.r_first;
  }
  return p;
}

// ---- output helpers

inline void write_json(const fs::path& path, const json& j) { io::detail::write_text(path, j.dump(2) + "\n"); }

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string utc_now()
{
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string runtime_str(double s)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", s);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string safe_name(std::string s)
{
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
  return s;
}

// per-variable and per-view moment CSVs; returns the file names by label
inline json write_sequences(const fs::path& dir, const GeneralizedMomentProblem& g,
                            const std::vector<TruncatedMomentSequence>& ys)
{
  json files = json::object();
  if (ys.size() != g.variables.size()) return files;
  for (std::size_t v = 0; v < ys.size(); ++v) {
    const std::string f = "variable_" + safe_name(g.variables[v].id) + ".csv";
    io::write_moments_csv(dir / f, ys[v]);
    files["variable " + g.variables[v].id] = f;
  }
  for (const auto& view : g.views) {
    const std::string f = "moments_" + safe_name(view.name) + ".csv";
    io::write_moments_csv(dir / f, g.extract(view.name, ys));
    files[view.name] = f;
  }
  return files;
}

inline json relaxation_json(const Prepared& p, const GeneralizedMomentProblem& g, const RelaxationResult& r,
                            const json& files)
{
  json j;
  j["kind"] = p.cfg.problem.kind;
  j["p"] = p.cfg.problem.p;
  j["order"] = r.order;
  j["minimal_order"] = g.minimal_order();
  j["rho"] = num(r.rho);
  j["sqrt_rho"] = num(std::sqrt(std::max(0.0, r.rho)));
  if (p.cfg.problem.kind == "wp") j["distance"] = num(std::pow(std::max(0.0, r.rho), 1.0 / p.cfg.problem.p));
  j["status"] = r.status_name();
  j["iterations"] = r.report.iterations;
  j["residuals"] = {{"max_equality_violation", num(r.max_equality_violation)},
                    {"min_psd_eigenvalue", num(r.min_psd_eigenvalue)},
                    {"primal_residual", num(r.report.primal_residual)},
                    {"dual_residual", num(r.report.dual_residual)},
                    {"gap", num(r.report.gap)}};
  j["dual_objective"] = num(r.report.dual_objective);
  j["monotonicity_violation"] = r.monotonicity_violation;
  j["message"] = r.message;
  j["moments"] = files;
  return j;
}

inline void write_trace(const fs::path& path, const FixedPointResult& f)
{
  std::string s = "iteration,objective\n";
  for (std::size_t k = 0; k < f.trace.size(); ++k) s += std::to_string(k) + "," + io::fmt(f.trace[k]) + "\n";
  io::detail::write_text(path, s);
}

inline json fixed_point_json(const Prepared& p, int r, const FixedPointResult& f, const json& files)
{
  json j;
  j["kind"] = p.cfg.problem.kind;
  j["order"] = r;
  j["objective"] = num(f.best_objective);
  j["sqrt_objective"] = num(std::sqrt(std::max(0.0, f.best_objective)));
  j["best_iteration"] = f.best_iteration;
  j["iterations"] = f.iterations;
  j["converged"] = f.converged;
  j["status"] = to_string(f.status);
  j["message"] = f.message;
  j["trace"] = "trace.csv";
  j["moments"] = files;
  return j;
}

struct SupportOutput {
  SupportEstimate estimate;
  ChristoffelModel model;
};

inline std::vector<std::size_t> grid_counts(const PostprocessSpec& pp, std::size_t n)
{
  std::vector<std::size_t> g = pp.grid.empty() ? std::vector<std::size_t>{100} : pp.grid;
  if (g.size() == 1) g.assign(n, g[0]);
  if (g.size() != n)
    throw ConfigError("grid has " + std::to_string(g.size()) + " axes, the measure has dimension " + std::to_string(n));
  return g;
}

// grid bounds: explicit, else the bounding box of the set repeated over product factors
inline std::pair<std::vector<double>, std::vector<double>> grid_bounds(const RunConfig& cfg, std::size_t n)
{
  const auto& pp = cfg.postprocess;
  if (!pp.lo.empty() || !pp.hi.empty()) {
    if (pp.lo.size() != n || pp.hi.size() != n) throw ConfigError("postprocess.lo/hi must have one value per axis");
    return {pp.lo, pp.hi};
  }
  auto [lo, hi] = cfg.set.bounds();
  const auto d = lo.size();
  if (n % d) throw ConfigError("grid bounds: give postprocess.lo/hi for this measure");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back(lo[i % d]);
    b.push_back(hi[i % d]);
  }
  return {a, b};
}

inline SupportOutput write_support(const fs::path& dir, const RunConfig& cfg, const TruncatedMomentSequence& y,
                                   int k, const std::string& source)
{
  const auto& pp = cfg.postprocess;
  const std::size_t n = y.dimension();
  const auto counts = grid_counts(pp, n);
  const auto [lo, hi] = grid_bounds(cfg, n);
  SupportOutput out;
  out.model = christoffel_model(y, k);
  out.estimate = support_estimate(out.model, regular_grid(lo, hi, counts), pp.eta);
  io::write_grid_csv(dir / "grid.csv", out.estimate);
  if (n == 2 && pp.pgm) io::write_pgm(dir / "support.pgm", io::label_raster(out.estimate, counts[0], counts[1]));
  io::write_moments_csv(dir / "support_moments.csv", y);
  json j;
  j["source"] = source;
  j["christoffel_order"] = k;
  j["basis_size"] = out.model.basis_size();
  j["rank"] = out.model.rank;
  j["rank_threshold"] = out.model.rank_threshold;
  j["eta"] = pp.eta;
  j["gamma"] = out.estimate.gamma;
  j["kappa_threshold"] = out.estimate.threshold;
  j["grid"] = counts;
  j["lo"] = lo;
  j["hi"] = hi;
  j["inside_fraction"] = out.estimate.inside_fraction();
  j["files"] = {{"grid", "grid.csv"}, {"moments", "support_moments.csv"}};
  if (n == 2 && pp.pgm) j["files"]["mask"] = "support.pgm";
  write_json(dir / "support.json", j);
  return out;
}

inline std::string default_view(const std::string& kind)
{
  return kind == "barycenter_wp" || kind == "gw_barycenter" ? "barycenter" : "plan";
}

inline int christoffel_order_for(const RunConfig& cfg, int r)
{
  const int k = cfg.postprocess.christoffel_order > 0 ? cfg.postprocess.christoffel_order : r;
  if (k > r)
    throw ConfigError("christoffel_order " + std::to_string(k) + " exceeds the relaxation order " + std::to_string(r) +
                      "; raise the relaxation order instead");
  return k;
}

struct Metadata {
  std::string command;
  std::string started = utc_now();
  Stopwatch clock;
  json runs = json::array();

  void write(const fs::path& dir) const
  {
    write_json(dir / "metadata.json",
               {{"command", command}, {"started_at", started}, {"wall_time_s", clock.seconds()}, {"runs", runs}});
  }
};

// ---- commands

inline int cmd_solve(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  const int r = p.r_first;
  const auto g = p.problem(2 * r);
  if (g.is_quadratic()) throw ConfigError("quadratic objectives are solved with the gw or barycenter command");
  const fs::path dir = cfg.out;
  fs::create_directories(dir);
  Metadata meta{"solve"};
  Stopwatch sw;
  const auto res = solve_order(g, r, p.relaxation());
  meta.runs.push_back({{"order", r}, {"runtime_s", sw.seconds()}});
  write_json(dir / "result.json", relaxation_json(p, g, res, write_sequences(dir, g, res.sequences)));
  meta.write(dir);
  log << "solve: r=" << r << " rho=" << io::fmt(res.rho) << " status=" << res.status_name() << "\n";
  if (!res.solved()) {
    log << "solver failure: " << res.message << "\n";
    return SolverFailure;
  }
  return Ok;
}

inline int cmd_sweep(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  const fs::path dir = cfg.out;
  const bool quadratic = cfg.problem.kind == "gw";
  if (cfg.problem.kind == "gw_barycenter") throw ConfigError("use the barycenter command for GW barycenters");
  fs::create_directories(dir);
  Metadata meta{"sweep"};
  std::vector<RelaxationResult> results;
  std::vector<FixedPointResult> fps;
  std::vector<double> runtimes;
  int code = Ok;
  for (int r = p.r_first; r <= p.r_last; ++r) {
    const fs::path sub = dir / ("r" + std::to_string(r));
    fs::create_directories(sub);
    const auto g = p.problem(2 * r);
    Stopwatch sw;
    if (quadratic) {
      auto f = gw_fixed_point(g, r, std::nullopt, p.fixed_point());
      runtimes.push_back(sw.seconds());
      write_trace(sub / "trace.csv", f);
      write_json(sub / "result.json", fixed_point_json(p, r, f, write_sequences(sub, g, f.best)));
      log << "sweep: r=" << r << " objective=" << io::fmt(f.best_objective) << " converged=" << f.converged << "\n";
      if (f.status != SolveStatus::Optimal && f.status != SolveStatus::NearOptimal)
        code = std::max<int>(code, SolverFailure);
      else if (!f.converged && code == Ok)
        code = NoConvergence;
      RelaxationResult row;
      row.order = r;
      row.rho = f.best_objective;
      row.status = f.status;
      results.push_back(row);
      fps.push_back(std::move(f));
    } else {
      RelaxationResult res;
      try {
        res = solve_order(g, r, p.relaxation());
      } catch (const std::exception& e) {
        res.order = r;
        res.status = SolveStatus::NumericalFailure;
        res.message = e.what();
      }
      runtimes.push_back(sw.seconds());
      log << "sweep: r=" << r << " rho=" << io::fmt(res.rho) << " status=" << res.status_name() << "\n";
      if (!res.solved()) code = SolverFailure;
      results.push_back(std::move(res));
    }
    meta.runs.push_back({{"order", r}, {"runtime_s", runtimes.back()}});
  }
  if (!quadratic) {
    flag_monotonicity(results, cfg.solver.tol);
    for (const auto& res : results) {
      const fs::path sub = dir / ("r" + std::to_string(res.order));
      const auto g = p.problem(2 * res.order);
      write_json(sub / "result.json", relaxation_json(p, g, res, write_sequences(sub, g, res.sequences)));
    }
  }
  std::string s = "r,rho_r,runtime_s,status,monotonicity_violation\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    std::string status = res.status_name();
    if (quadratic && res.solved() && !fps[i].converged) status = "not-converged";
    s += std::to_string(res.order) + "," + io::fmt(res.rho) + "," + runtime_str(runtimes[i]) + "," + status + "," +
         (res.monotonicity_violation ? "1" : "0") + "\n";
  }
  io::detail::write_text(dir / "summary.csv", s);
  meta.write(dir);
  return code;
}

inline int cmd_gw(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  if (cfg.problem.kind != "gw") throw ConfigError("the gw command needs problem.kind = gw");
  const int r = p.r_first;
  const auto g = p.problem(2 * r);
  const fs::path dir = cfg.out;
  fs::create_directories(dir);
  Metadata meta{"gw"};
  Stopwatch sw;
  const auto f = gw_fixed_point(g, r, std::nullopt, p.fixed_point());
  meta.runs.push_back({{"order", r}, {"runtime_s", sw.seconds()}});
  write_trace(dir / "trace.csv", f);
  write_json(dir / "result.json", fixed_point_json(p, r, f, write_sequences(dir, g, f.best)));
  meta.write(dir);
  log << "gw: r=" << r << " objective=" << io::fmt(f.best_objective) << " iterations=" << f.iterations
      << " converged=" << f.converged << "\n";
  if (f.status != SolveStatus::Optimal && f.status != SolveStatus::NearOptimal) {
    log << "solver failure: " << f.message << "\n";
    return SolverFailure;
  }
  if (!f.converged) {
    log << "fixed point did not converge; best iterate written\n";
    return NoConvergence;
  }
  return Ok;
}

inline int cmd_barycenter(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  const auto& kind = cfg.problem.kind;
  if (kind != "barycenter_wp" && kind != "gw_barycenter")
    throw ConfigError("the barycenter command needs problem.kind = barycenter_wp or gw_barycenter");
  const fs::path dir = cfg.out;
  for (int r = p.r_first; r <= p.r_last; ++r) christoffel_order_for(cfg, r);
  fs::create_directories(dir);
  Metadata meta{"barycenter"};
  int code = Ok;
  for (std::size_t w = 0; w < cfg.problem.weights.size(); ++w) {
    for (int r = p.r_first; r <= p.r_last; ++r) {
      const fs::path sub = dir / ("lambda_" + std::to_string(w)) / ("r" + std::to_string(r));
      fs::create_directories(sub);
      Stopwatch sw;
      TruncatedMomentSequence bar;
      json j;
      if (kind == "barycenter_wp") {
        const auto g = p.problem(2 * r, w);
        const auto res = solve_order(g, r, p.relaxation());
        j = relaxation_json(p, g, res, write_sequences(sub, g, res.sequences));
        log << "barycenter: weights " << w << " r=" << r << " rho=" << io::fmt(res.rho)
            << " status=" << res.status_name() << "\n";
        if (!res.solved()) {
          code = SolverFailure;
        } else {
          bar = g.extract("barycenter", res.sequences);
        }
      } else {
        const auto res = gw_barycenter(p.measures(2 * r), cfg.problem.weights[w], p.X, p.Y, r, p.fixed_point());
        const auto g = p.problem(2 * r, w);
        write_trace(sub / "trace.csv", res.fixed_point);
        j = fixed_point_json(p, r, res.fixed_point, write_sequences(sub, g, res.fixed_point.best));
        j["vertex"] = res.vertex;
        io::write_moments_csv(sub / "moments_barycenter.csv", res.barycenter);
        j["moments"]["barycenter"] = "moments_barycenter.csv";
        log << "barycenter: weights " << w << " r=" << r << " objective=" << io::fmt(res.fixed_point.best_objective)
            << " converged=" << res.fixed_point.converged << "\n";
        const auto st = res.fixed_point.status;
        if (st != SolveStatus::Optimal && st != SolveStatus::NearOptimal)
          code = SolverFailure;
        else {
          bar = res.barycenter;
          if (!res.fixed_point.converged && code == Ok) code = NoConvergence;
        }
      }
      j["weights"] = cfg.problem.weights[w];
      if (!cfg.postprocess.grid.empty() && bar.mass() > 0.0) {
        write_support(sub, cfg, bar, christoffel_order_for(cfg, r), "barycenter");
        j["support"] = "support.json";
      }
      write_json(sub / "result.json", j);
      meta.runs.push_back({{"weights", w}, {"order", r}, {"runtime_s", sw.seconds()}});
    }
  }
  meta.write(dir);
  return code;
}

inline int cmd_support(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  const auto& pp = cfg.postprocess;
  const fs::path dir = cfg.out;
  TruncatedMomentSequence y;
  std::string source;
  int k = 0;
  int code = Ok;
  Metadata meta{"support"};
  if (!pp.moments.empty()) {
    y = io::read_moments_csv(cfg.resolve(pp.moments));
    if (y.dimension() == p.X.dimension()) y = reframe(y, p.X.frame());
    k = pp.christoffel_order > 0 ? pp.christoffel_order : y.degree() / 2;
    source = pp.moments;
  } else if (cfg.problem.kind == "none") {
    if (p.sources.empty()) throw ConfigError("support needs postprocess.moments, a problem, or a marginal");
    k = pp.christoffel_order > 0 ? pp.christoffel_order : p.r_first;
    y = moments_of(p.sources[0], p.X, 2 * k);
    source = "marginals[0]";
  } else {
    const int r = p.r_first;
    k = christoffel_order_for(cfg, r);
    const std::string view = pp.variable.empty() ? default_view(cfg.problem.kind) : pp.variable;
    if (cfg.problem.kind == "gw_barycenter") {
      auto res = gw_barycenter(p.measures(2 * r), cfg.problem.weights[0], p.X, p.Y, r, p.fixed_point());
      y = res.barycenter;
      if (!res.fixed_point.converged) code = NoConvergence;
    } else {
      const auto g = p.problem(2 * r);
      g.view(view);
      std::vector<TruncatedMomentSequence> ys;
      if (g.is_quadratic()) {
        auto f = gw_fixed_point(g, r, std::nullopt, p.fixed_point());
        if (f.status != SolveStatus::Optimal && f.status != SolveStatus::NearOptimal) {
          log << "solver failure: " << f.message << "\n";
          return SolverFailure;
        }
        if (!f.converged) code = NoConvergence;
        ys = f.best;
      } else {
        auto res = solve_order(g, r, p.relaxation());
        if (!res.solved()) {
          log << "solver failure: " << res.message << "\n";
          return SolverFailure;
        }
        ys = res.sequences;
      }
      y = g.extract(view, ys);
    }
    source = view;
  }
  if (2 * k > y.degree())
    throw ConfigError("christoffel order " + std::to_string(k) + " needs moments of degree " + std::to_string(2 * k));
  // validate the grid before writing anything
  grid_counts(pp, y.dimension());
  grid_bounds(cfg, y.dimension());
  fs::create_directories(dir);
  auto out = write_support(dir, cfg, y, k, source);
  meta.write(dir);
  log << "support: order " << k << " rank " << out.model.rank << "/" << out.model.basis_size() << " inside "
      << io::fmt(out.estimate.inside_fraction()) << "\n";
  return code;
}

inline int cmd_export_sdpa(const Prepared& p, std::ostream& log)
{
  const auto& cfg = p.cfg;
  const fs::path dir = cfg.out;
  std::vector<std::pair<int, GeneralizedMomentProblem>> gs;
  for (int r = p.r_first; r <= p.r_last; ++r) {
    auto g = p.problem(2 * r);
    // quadratic objectives export the first fixed-point subproblem
    if (g.is_quadratic()) g.objective = gw_linearize(g, product_initialization(g, r));
    gs.push_back({r, std::move(g)});
  }
  fs::create_directories(dir);
  for (const auto& [r, g] : gs) {
    const auto a = assemble(g, RelaxationOrder::checked(g, r), p.relaxation().assembly);
    std::ostringstream os;
    export_sdpa(a.program, os);
    const std::string f = "problem_r" + std::to_string(r) + ".dat-s";
    io::detail::write_text(dir / f, os.str());
    log << "export-sdpa: " << (dir / f).string() << " (" << a.program.num_vars << " variables, "
        << a.program.blocks.size() << " blocks)\n";
  }
  return Ok;
}

// runs a prepared command; failures after preparation count as solver failures
inline int run(const RunConfig& cfg, std::ostream& log = std::cerr)
{
  Prepared p;
  try {
    p = prepare(cfg);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return ConfigFailure;
  }
  try {
    const auto& c = p.cfg.command;
    if (c == "solve") return cmd_solve(p, log);
    if (c == "sweep") return cmd_sweep(p, log);
    if (c == "support") return cmd_support(p, log);
    if (c == "gw") return cmd_gw(p, log);
    if (c == "barycenter") return cmd_barycenter(p, log);
    return cmd_export_sdpa(p, log);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return ConfigFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return SolverFailure;
  }
}

}  // namespace momentot::app
