#pragma once

#include <optional>
#include <string>
#include <vector>

#include "formulations.hpp"
#include "relaxation.hpp"

namespace momentot {

struct FixedPointOptions {
  double tol = 1e-7;
  int max_iter = 50;
  double damping = 0.0;  // next iterate = (1 - damping) * argmin + damping * previous
  RelaxationOptions relaxation;
};

struct FixedPointResult {
  std::vector<double> trace;  // trace[0] is the value at the initial sequences
  std::vector<TruncatedMomentSequence> best;
  double best_objective = 0.0;
  int best_iteration = 0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::Optimal;
  std::string message;
};

// moments of (id, id)_# mu on X x X from moments of mu, in the frame `target`
inline TruncatedMomentSequence identity_coupling(const TruncatedMomentSequence& mu, int degree, const AffineFrame& target)
{
  const auto m = to_original(mu);
  const std::size_t d = m.dimension();
  if (m.degree() < degree) throw std::invalid_argument("identity_coupling: measure moments of insufficient degree");
  TruncatedMomentSequence out(2 * d, degree);
  const auto basis = enumerate_indices(2 * d, degree);
  for (std::size_t k = 0; k < basis.size(); ++k)
    out.values()(static_cast<Eigen::Index>(k)) = m.at(basis[k].slice(0, d) + basis[k].slice(d, d));
  return reframe(out, target);
}

// truncated moments of mu (x) nu on the plan variable's frame
inline std::vector<TruncatedMomentSequence> product_initialization(const GeneralizedMomentProblem& g, int r)
{
  if (g.marginals.size() != 2 || g.variables.size() != 1)
    throw std::invalid_argument("product_initialization: expects a two-marginal single-plan problem");
  const auto& a = g.marginals[0];
  const auto& b = g.marginals[1];
  if (a.degree() < 2 * r || b.degree() < 2 * r)
    throw std::invalid_argument("product_initialization: marginal moments of insufficient degree");
  return {tensor_product(a, b, 2 * r)};
}

// y^(k) = argmin of the relaxation of order r with objective linearized at y^(k-1)
inline FixedPointResult gw_fixed_point(const GeneralizedMomentProblem& g, int r,
                                       std::optional<std::vector<TruncatedMomentSequence>> init = std::nullopt,
                                       const FixedPointOptions& opts = {})
{
  const auto* q = std::get_if<QuadraticMomentFunctional>(&g.objective);
  if (!q) throw std::invalid_argument("gw_fixed_point: objective is not quadratic");
  RelaxationOrder::checked(g, r);
  if (!(opts.damping >= 0.0 && opts.damping < 1.0)) throw std::invalid_argument("gw_fixed_point: damping must lie in [0, 1)");
  std::vector<TruncatedMomentSequence> prev = init ? *init : product_initialization(g, r);
  if (prev.size() != g.variables.size()) throw std::invalid_argument("gw_fixed_point: one initial sequence per variable");
  for (std::size_t v = 0; v < prev.size(); ++v) {
    if (prev[v].dimension() != g.variables[v].support.dimension())
      throw std::invalid_argument("gw_fixed_point: initial sequence dimension mismatch");
    if (prev[v].degree() < 2 * r) throw std::invalid_argument("gw_fixed_point: initial sequence degree below 2r");
    prev[v] = reframe(prev[v].truncated(2 * r), g.variables[v].support.frame());
  }

  FixedPointResult res;
  double last = q->evaluate(prev);
  res.trace.push_back(last);
  res.best = prev;
  res.best_objective = last;
  GeneralizedMomentProblem lin = g;
  for (int k = 1; k <= opts.max_iter; ++k) {
    lin.objective = gw_linearize(g, prev);
    RelaxationResult step;
    try {
      step = solve_order(lin, r, opts.relaxation);
    } catch (const std::exception& e) {
      step.status = SolveStatus::NumericalFailure;
      step.message = e.what();
    }
    res.iterations = k;
    if (!step.solved() || step.sequences.empty()) {
      res.status = step.status == SolveStatus::Optimal ? SolveStatus::NumericalFailure : step.status;
      res.message = "iteration " + std::to_string(k) + ": " + to_string(step.status) +
                    (step.message.empty() ? "" : " (" + step.message + ")");
      return res;
    }
    if (step.status == SolveStatus::NearOptimal) res.status = SolveStatus::NearOptimal;
    if (opts.damping > 0.0)
      for (std::size_t v = 0; v < prev.size(); ++v)
        step.sequences[v].values() = (1.0 - opts.damping) * step.sequences[v].values() + opts.damping * prev[v].values();
    const double val = q->evaluate(step.sequences);
    res.trace.push_back(val);
    if (val < res.best_objective) {
      res.best_objective = val;
      res.best = step.sequences;
      res.best_iteration = k;
    }
    prev = std::move(step.sequences);
    if (std::abs(val - last) <= opts.tol * std::max(1.0, std::abs(val))) {
      res.converged = true;
      break;
    }
    last = val;
  }
  return res;
}

struct GWBarycenterResult {
  TruncatedMomentSequence barycenter;
  FixedPointResult fixed_point;
  bool vertex = false;  // a weight equal to one selected the measure directly
};

// fixed point on the barycenter problem, started from the measure with the largest weight
inline GWBarycenterResult gw_barycenter(const std::vector<TruncatedMomentSequence>& measures,
                                        const std::vector<double>& weights, const SemialgebraicSet& setX,
                                        const SemialgebraicSet& setY, int r, const FixedPointOptions& opts = {})
{
  const auto g = build_gw_barycenter(measures, weights, setX, setY);
  const std::size_t j = static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
  const auto& plan_frame = g.variables[1].support.frame();
  for (const auto& m : measures)
    if (m.degree() < 2 * r) throw std::invalid_argument("gw_barycenter: measure moments of insufficient degree");
  GWBarycenterResult out;
  if (setX.dimension() != setY.dimension())
    throw std::invalid_argument("gw_barycenter: X and Y must have the same dimension");
  const auto y0 = reframe(to_original(measures[j]).truncated(2 * r), setX.frame());
  if (weights[j] >= 1.0 - 1e-12) {
    out.vertex = true;
    out.barycenter = y0;
    std::vector<TruncatedMomentSequence> ys{y0};
    for (std::size_t i = 0; i < measures.size(); ++i)
      ys.push_back(i == j ? identity_coupling(measures[j], 2 * r, plan_frame)
                          : tensor_product(y0, reframe(measures[i], setY.frame()), 2 * r));
    out.fixed_point.best = ys;
    out.fixed_point.best_objective = std::get<QuadraticMomentFunctional>(g.objective).evaluate(ys);
    out.fixed_point.trace = {out.fixed_point.best_objective};
    out.fixed_point.converged = true;
    return out;
  }
  std::vector<TruncatedMomentSequence> init{y0};
  for (const auto& m : measures) init.push_back(tensor_product(y0, reframe(m, setY.frame()), 2 * r));
  out.fixed_point = gw_fixed_point(g, r, init, opts);
  out.barycenter = out.fixed_point.best[0];
  return out;
}

}  // namespace momentot
