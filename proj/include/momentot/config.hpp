#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "io.hpp"
#include "polyalg.hpp"
#include "shapes.hpp"

namespace momentot {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SetSpec {
  std::string type = "box";  // box | ball
  std::vector<double> lo, hi;
  std::vector<double> center;
  double radius = 1.0;
  std::vector<std::string> inequalities;  // extra g(x) >= 0 in original coordinates
  bool normalize = true;

  std::size_t dimension() const { return type == "ball" ? center.size() : lo.size(); }

  void validate(const std::string& where) const
  {
    if (type == "box") {
      if (lo.empty() || lo.size() != hi.size()) throw ConfigError(where + ": box needs lo and hi of equal length");
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw ConfigError(where + ": box needs lo < hi");
    } else if (type == "ball") {
      if (center.empty()) throw ConfigError(where + ": ball needs a center");
      if (!(radius > 0.0)) throw ConfigError(where + ": ball radius must be positive");
    } else {
      throw ConfigError(where + ": unknown set type '" + type + "'");
    }
  }

  SemialgebraicSet build() const
  {
    auto s = type == "ball" ? SemialgebraicSet::ball(center, radius) : SemialgebraicSet::box(lo, hi);
    if (!inequalities.empty()) {
      std::vector<Polynomial> g;
      for (const auto& t : inequalities) g.push_back(Polynomial::parse(t, dimension()));
      s = s.with(g);
    }
    return normalize ? s.normalized() : s;
  }

  // bounding box in original coordinates
  std::pair<std::vector<double>, std::vector<double>> bounds() const
  {
    if (type == "box") return {lo, hi};
    std::vector<double> a, b;
    for (double c : center) {
      a.push_back(c - radius);
      b.push_back(c + radius);
    }
    return {a, b};
  }

  bool operator==(const SetSpec&) const = default;
};

struct FactorSpec {
  std::string kind = "uniform";  // uniform | dirac | power
  double a = 0.0, b = 1.0;
  int k = 0;

  bool operator==(const FactorSpec&) const = default;
};

struct MarginalSpec {
  // empirical | mask | smiley | face | closed_form | moments
  std::string type = "empirical";
  std::string path;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  std::vector<double> origin{0.0, 0.0};  // lower-left corner of a mask
  std::vector<double> extent{1.0, 1.0};  // width and height of a mask
  std::vector<std::size_t> resolution{40, 40};  // rows, cols of a rasterized smiley
  std::vector<double> shape{0.5, 0.5, 0.25};   // smiley center x, y and radius
  std::size_t count = 200;                     // samples for face
  std::vector<FactorSpec> factors;
  std::vector<double> translate;  // applied to empirical points and masks
  double rotate = 0.0;            // empirical points only, about rotate_center
  std::vector<double> rotate_center{0.5, 0.5};

  bool operator==(const MarginalSpec&) const = default;
};

struct SolverSpec {
  double tol = 1e-8;
  int max_iter = 200;
  bool scaling = true;
  int verbosity = 0;
  bool schmudgen = false;

  bool operator==(const SolverSpec&) const = default;
};

struct FixedPointSpec {
  double tol = 1e-6;
  int max_iter = 50;
  double damping = 0.0;

  bool operator==(const FixedPointSpec&) const = default;
};

struct PostprocessSpec {
  double eta = 0.3;
  std::vector<std::size_t> grid;  // points per axis; empty disables grids outside the support command
  int christoffel_order = 0;      // 0 uses the relaxation order
  std::vector<double> lo, hi;     // grid bounds; defaults to the bounding box of the set
  std::string moments;            // moments CSV for the support command
  std::string variable;           // view to post-process; defaults by problem kind
  bool pgm = true;

  bool operator==(const PostprocessSpec&) const = default;
};

struct ProblemSpec {
  // wp | multimarginal | barycenter_wp | gw | gw_barycenter | none
  std::string kind = "wp";
  int p = 2;
  int q = 2;
  std::string cost;  // multimarginal cost on the product space
  std::vector<std::vector<double>> weights;  // one simplex vector per barycenter run

  bool operator==(const ProblemSpec&) const = default;
};

struct RunConfig {
  std::string command = "solve";
  ProblemSpec problem;
  std::vector<MarginalSpec> marginals;
  SetSpec set;
  std::optional<SetSpec> set_y;
  int order = 0;      // 0 picks the minimal admissible order
  int order_max = 0;  // 0 means a single order
  SolverSpec solver;
  FixedPointSpec fixed_point;
  PostprocessSpec postprocess;
  std::uint64_t seed = 42;
  std::string out = "out";

  std::filesystem::path base_dir;  // directory of the config file, not serialized

  std::filesystem::path resolve(const std::string& p) const
  {
    std::filesystem::path f(p);
    return f.is_absolute() || base_dir.empty() ? f : base_dir / f;
  }

  bool operator==(const RunConfig& o) const
  {
    return command == o.command && problem == o.problem && marginals == o.marginals && set == o.set &&
           set_y == o.set_y && order == o.order && order_max == o.order_max && solver == o.solver &&
           fixed_point == o.fixed_point && postprocess == o.postprocess && seed == o.seed && out == o.out;
  }
};

inline const std::set<std::string>& known_commands()
{
  static const std::set<std::string> c{"solve", "sweep", "support", "gw", "barycenter", "export-sdpa"};
  return c;
}

namespace detail {

using nlohmann::json;

template <class T>
void get_opt(const json& j, const char* key, T& out)
{
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const SetSpec& s)
{
  const SetSpec d;
  j = {{"type", s.type}};
  if (s.lo != d.lo) j["lo"] = s.lo;
  if (s.hi != d.hi) j["hi"] = s.hi;
  if (s.center != d.center) j["center"] = s.center;
  if (s.radius != d.radius) j["radius"] = s.radius;
  if (s.inequalities != d.inequalities) j["inequalities"] = s.inequalities;
  if (s.normalize != d.normalize) j["normalize"] = s.normalize;
}

inline void from_json(const nlohmann::json& j, SetSpec& s)
{
  detail::check_keys(j, "set", {"type", "lo", "hi", "center", "radius", "inequalities", "normalize"});
  s = SetSpec{};
  detail::get_opt(j, "type", s.type);
  detail::get_opt(j, "lo", s.lo);
  detail::get_opt(j, "hi", s.hi);
  detail::get_opt(j, "center", s.center);
  detail::get_opt(j, "radius", s.radius);
  detail::get_opt(j, "inequalities", s.inequalities);
  detail::get_opt(j, "normalize", s.normalize);
}

inline void to_json(nlohmann::json& j, const FactorSpec& f)
{
  j = {{"kind", f.kind}, {"a", f.a}};
  if (f.kind != "dirac") j["b"] = f.b;
  if (f.k != 0) j["k"] = f.k;
}

inline void from_json(const nlohmann::json& j, FactorSpec& f)
{
  detail::check_keys(j, "factor", {"kind", "a", "b", "k"});
  f = FactorSpec{};
  detail::get_opt(j, "kind", f.kind);
  detail::get_opt(j, "a", f.a);
  detail::get_opt(j, "b", f.b);
  detail::get_opt(j, "k", f.k);
  if (f.kind == "dirac") f.b = f.a;
}

inline void to_json(nlohmann::json& j, const MarginalSpec& m)
{
  const MarginalSpec d;
  j = {{"type", m.type}};
  if (m.path != d.path) j["path"] = m.path;
  if (m.points != d.points) j["points"] = m.points;
  if (m.weights != d.weights) j["weights"] = m.weights;
  if (m.origin != d.origin) j["origin"] = m.origin;
  if (m.extent != d.extent) j["extent"] = m.extent;
  if (m.resolution != d.resolution) j["resolution"] = m.resolution;
  if (m.shape != d.shape) j["shape"] = m.shape;
  if (m.count != d.count) j["count"] = m.count;
  if (m.factors != d.factors) j["factors"] = m.factors;
  if (m.translate != d.translate) j["translate"] = m.translate;
  if (m.rotate != d.rotate) j["rotate"] = m.rotate;
  if (m.rotate_center != d.rotate_center) j["rotate_center"] = m.rotate_center;
}

inline void from_json(const nlohmann::json& j, MarginalSpec& m)
{
  detail::check_keys(j, "marginal", {"type", "path", "points", "weights", "origin", "extent", "resolution", "shape",
                                     "count", "factors", "translate", "rotate", "rotate_center"});
  m = MarginalSpec{};
  detail::get_opt(j, "type", m.type);
  detail::get_opt(j, "path", m.path);
  detail::get_opt(j, "points", m.points);
  detail::get_opt(j, "weights", m.weights);
  detail::get_opt(j, "origin", m.origin);
  detail::get_opt(j, "extent", m.extent);
  detail::get_opt(j, "resolution", m.resolution);
  detail::get_opt(j, "shape", m.shape);
  detail::get_opt(j, "count", m.count);
  detail::get_opt(j, "factors", m.factors);
  detail::get_opt(j, "translate", m.translate);
  detail::get_opt(j, "rotate", m.rotate);
  detail::get_opt(j, "rotate_center", m.rotate_center);
}

inline void to_json(nlohmann::json& j, const SolverSpec& s)
{
  j = {{"tol", s.tol}, {"max_iter", s.max_iter}, {"scaling", s.scaling}, {"verbosity", s.verbosity},
       {"schmudgen", s.schmudgen}};
}

inline void from_json(const nlohmann::json& j, SolverSpec& s)
{
  detail::check_keys(j, "solver", {"tol", "max_iter", "scaling", "verbosity", "schmudgen"});
  s = SolverSpec{};
  detail::get_opt(j, "tol", s.tol);
  detail::get_opt(j, "max_iter", s.max_iter);
  detail::get_opt(j, "scaling", s.scaling);
  detail::get_opt(j, "verbosity", s.verbosity);
  detail::get_opt(j, "schmudgen", s.schmudgen);
}

inline void to_json(nlohmann::json& j, const FixedPointSpec& s)
{
  j = {{"tol", s.tol}, {"max_iter", s.max_iter}, {"damping", s.damping}};
}

inline void from_json(const nlohmann::json& j, FixedPointSpec& s)
{
  detail::check_keys(j, "fixed_point", {"tol", "max_iter", "damping"});
  s = FixedPointSpec{};
  detail::get_opt(j, "tol", s.tol);
  detail::get_opt(j, "max_iter", s.max_iter);
  detail::get_opt(j, "damping", s.damping);
}

inline void to_json(nlohmann::json& j, const PostprocessSpec& s)
{
  const PostprocessSpec d;
  j = {{"eta", s.eta}};
  if (s.grid != d.grid) j["grid"] = s.grid;
  if (s.christoffel_order != d.christoffel_order) j["christoffel_order"] = s.christoffel_order;
  if (s.lo != d.lo) j["lo"] = s.lo;
  if (s.hi != d.hi) j["hi"] = s.hi;
  if (s.moments != d.moments) j["moments"] = s.moments;
  if (s.variable != d.variable) j["variable"] = s.variable;
  if (s.pgm != d.pgm) j["pgm"] = s.pgm;
}

inline void from_json(const nlohmann::json& j, PostprocessSpec& s)
{
  detail::check_keys(j, "postprocess", {"eta", "grid", "christoffel_order", "lo", "hi", "moments", "variable", "pgm"});
  s = PostprocessSpec{};
  detail::get_opt(j, "eta", s.eta);
  detail::get_opt(j, "grid", s.grid);
  detail::get_opt(j, "christoffel_order", s.christoffel_order);
  detail::get_opt(j, "lo", s.lo);
  detail::get_opt(j, "hi", s.hi);
  detail::get_opt(j, "moments", s.moments);
  detail::get_opt(j, "variable", s.variable);
  detail::get_opt(j, "pgm", s.pgm);
}

inline void to_json(nlohmann::json& j, const ProblemSpec& p)
{
  j = {{"kind", p.kind}, {"p", p.p}};
  if (p.q != ProblemSpec{}.q) j["q"] = p.q;
  if (!p.cost.empty()) j["cost"] = p.cost;
  if (p.weights.size() == 1)
    j["weights"] = p.weights[0];
  else if (!p.weights.empty())
    j["weights"] = p.weights;
}

inline void from_json(const nlohmann::json& j, ProblemSpec& p)
{
  detail::check_keys(j, "problem", {"kind", "p", "q", "cost", "weights"});
  p = ProblemSpec{};
  detail::get_opt(j, "kind", p.kind);
  detail::get_opt(j, "p", p.p);
  detail::get_opt(j, "q", p.q);
  detail::get_opt(j, "cost", p.cost);
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (!w.is_array()) throw ConfigError("problem.weights: expected an array");
    if (!w.empty() && w[0].is_array())
      w.get_to(p.weights);
    else
      p.weights = {w.get<std::vector<double>>()};
  }
}

inline nlohmann::json to_json(const RunConfig& c)
{
  nlohmann::json j;
  j["command"] = c.command;
  j["problem"] = c.problem;
  j["marginals"] = c.marginals;
  j["set"] = c.set;
  if (c.set_y) j["set_y"] = *c.set_y;
  if (c.order_max > 0 && c.order_max != c.order)
    j["orders"] = {c.order, c.order_max};
  else if (c.order > 0)
    j["order"] = c.order;
  j["solver"] = c.solver;
  j["fixed_point"] = c.fixed_point;
  j["postprocess"] = c.postprocess;
  j["seed"] = c.seed;
  j["out"] = c.out;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j)
{
  try {
    detail::check_keys(j, "config", {"command", "problem", "marginals", "set", "set_y", "order", "orders", "solver",
                                     "fixed_point", "postprocess", "seed", "out"});
    RunConfig c;
    detail::get_opt(j, "command", c.command);
    detail::get_opt(j, "problem", c.problem);
    detail::get_opt(j, "marginals", c.marginals);
    detail::get_opt(j, "set", c.set);
    if (j.contains("set_y") && !j.at("set_y").is_null()) c.set_y = j.at("set_y").get<SetSpec>();
    detail::get_opt(j, "order", c.order);
    if (j.contains("orders")) {
      const auto o = j.at("orders").get<std::vector<int>>();
      if (o.size() != 2) throw ConfigError("orders: expected [first, last]");
      if (j.contains("order")) throw ConfigError("give either order or orders, not both");
      c.order = o[0];
      c.order_max = o[1];
    }
    detail::get_opt(j, "solver", c.solver);
    detail::get_opt(j, "fixed_point", c.fixed_point);
    detail::get_opt(j, "postprocess", c.postprocess);
    detail::get_opt(j, "seed", c.seed);
    detail::get_opt(j, "out", c.out);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto c = config_from_json(j);
  c.base_dir = path.parent_path();
  return c;
}

// "a..b" or a single order
inline std::pair<int, int> parse_order_range(const std::string& s)
{
  const auto dots = s.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int r = std::stoi(s, &used);
      if (used != s.size()) throw ConfigError("");
      return {r, r};
    }
    const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
    const int ra = std::stoi(a, &used);
    if (used != a.size()) throw ConfigError("");
    const int rb = std::stoi(b, &used);
    if (used != b.size()) throw ConfigError("");
    return {ra, rb};
  } catch (const std::exception&) {
    throw ConfigError("orders: expected 'a..b', got '" + s + "'");
  }
}

// "NxM" or "N"
inline std::vector<std::size_t> parse_grid(const std::string& s)
{
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto x = s.find('x', pos);
    const std::string tok = s.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
    long v = 0;
    try {
      std::size_t used = 0;
      v = std::stol(tok, &used);
      if (used != tok.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("grid: expected NxM, got '" + s + "'");
    }
    if (v <= 0) throw ConfigError("grid: resolution must be positive, got '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
    if (x == std::string::npos) break;
    pos = x + 1;
  }
  return out;
}

// structural checks that need no solver; inputs are checked when they are loaded
inline void validate(const RunConfig& c)
{
  if (!known_commands().count(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  static const std::set<std::string> kinds{"wp", "multimarginal", "barycenter_wp", "gw", "gw_barycenter", "none"};
  const auto& k = c.problem.kind;
  if (!kinds.count(k)) throw ConfigError("problem.kind: unknown kind '" + k + "'");
  c.set.validate("set");
  if (c.set_y) c.set_y->validate("set_y");
  if (c.order < 0 || c.order_max < 0) throw ConfigError("orders must be positive");
  if (c.order_max > 0 && c.order_max < c.order) throw ConfigError("orders: last order is below the first");
  if (c.problem.p < 1) throw ConfigError("problem.p must be >= 1");
  if (k == "gw" || k == "gw_barycenter") {
    if (c.problem.p % 2 || c.problem.q % 2 || c.problem.q < 2)
      throw ConfigError("GW problems need even p and q");
    if (k == "gw_barycenter" && (c.problem.p != 2 || c.problem.q != 2))
      throw ConfigError("GW barycenters support p = q = 2 only");
  }
  const std::size_t need = k == "wp" || k == "gw" ? 2 : 1;
  if (k != "none" && c.marginals.size() < need)
    throw ConfigError("problem '" + k + "' needs " + std::to_string(need) + " marginals");
  if ((k == "wp" || k == "gw") && c.marginals.size() != 2) throw ConfigError("problem '" + k + "' takes two marginals");
  if (k == "multimarginal" && c.problem.cost.empty()) throw ConfigError("multimarginal problems need a cost");
  if (k == "barycenter_wp" || k == "gw_barycenter") {
    if (c.problem.weights.empty()) throw ConfigError("barycenter problems need weights");
    for (const auto& w : c.problem.weights) {
      if (w.size() != c.marginals.size()) throw ConfigError("problem.weights: one weight per marginal is required");
      double s = 0.0;
      for (double x : w) {
        if (!(x >= 0.0)) throw ConfigError("problem.weights: weights must be nonnegative");
        s += x;
      }
      if (std::abs(s - 1.0) > 1e-9) throw ConfigError("problem.weights: weights must sum to 1");
    }
  }
  const auto& pp = c.postprocess;
  if (!(pp.eta > 0.0 && pp.eta < 1.0)) throw ConfigError("postprocess.eta must lie in (0, 1)");
  for (auto g : pp.grid)
    if (g == 0) throw ConfigError("postprocess.grid: resolution must be positive");
  if (pp.christoffel_order < 0) throw ConfigError("postprocess.christoffel_order must be >= 0");
  if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1) throw ConfigError("solver: tol and max_iter must be positive");
  if (!(c.fixed_point.tol > 0.0) || c.fixed_point.max_iter < 1)
    throw ConfigError("fixed_point: tol and max_iter must be positive");
  if (!(c.fixed_point.damping >= 0.0 && c.fixed_point.damping < 1.0))
    throw ConfigError("fixed_point.damping must lie in [0, 1)");
  static const std::set<std::string> mtypes{"empirical", "mask", "smiley", "face", "closed_form", "moments"};
  for (std::size_t i = 0; i < c.marginals.size(); ++i) {
    const auto& m = c.marginals[i];
    const std::string where = "marginals[" + std::to_string(i) + "]";
    if (!mtypes.count(m.type)) throw ConfigError(where + ": unknown type '" + m.type + "'");
    const bool needs_file = m.type == "moments" || m.type == "mask" || (m.type == "empirical" && m.points.empty());
    if (needs_file) {
      if (m.path.empty()) throw ConfigError(where + ": a path is required");
      if (!std::filesystem::exists(c.resolve(m.path)))
        throw ConfigError(where + ": file '" + c.resolve(m.path).string() + "' does not exist");
    }
  }
  if (!pp.moments.empty() && !std::filesystem::exists(c.resolve(pp.moments)))
    throw ConfigError("postprocess.moments: file '" + c.resolve(pp.moments).string() + "' does not exist");
}

}  // namespace momentot
