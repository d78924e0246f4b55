#pragma once

#include <Eigen/Eigenvalues>
#include <map>
#include <string>
#include <vector>

#include "conic.hpp"
#include "formulations.hpp"

namespace momentot {

struct RelaxationOrder {
  int r = 1;

  static RelaxationOrder checked(const GeneralizedMomentProblem& g, int r)
  {
    const int rs = g.minimal_order();
    if (r < rs)
      throw std::invalid_argument("relaxation order " + std::to_string(r) + " is below the minimal order " +
                                  std::to_string(rs));
    return {r};
  }
};

struct AssemblyOptions {
  bool schmudgen = false;
};

struct AssembledRelaxation {
  ConicProgram program;
  std::vector<int> offsets;  // first decision index of each variable
  int order = 0;
};

namespace detail {

// g_0 = 1 and the inequalities, or all products g_I of degree at most 2r
inline std::vector<Polynomial> localizers(const SemialgebraicSet& s, bool schmudgen, int r)
{
  const auto& g = s.inequalities();
  std::vector<Polynomial> out{Polynomial::constant(s.dimension(), 1.0)};
  if (!schmudgen) {
    out.insert(out.end(), g.begin(), g.end());
    return out;
  }
  if (g.size() > 11) throw std::invalid_argument("Schmudgen mode: too many inequalities");
  const std::size_t J = g.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << J); ++mask) {
    Polynomial p = Polynomial::constant(s.dimension(), 1.0);
    for (std::size_t j = 0; j < J; ++j)
      if (mask >> j & 1) p = p * g[j];
    if (p.degree() <= 2 * r) out.push_back(p);
  }
  return out;
}

inline SparseRow merged_row(const std::vector<std::pair<int, double>>& entries)
{
  std::map<int, double> acc;
  for (auto [j, v] : entries) acc[j] += v;
  SparseRow row;
  for (auto [j, v] : acc)
    if (v != 0.0) {
      row.index.push_back(j);
      row.value.push_back(v);
    }
  return row;
}

}  // namespace detail

inline AssembledRelaxation assemble(const GeneralizedMomentProblem& g, RelaxationOrder order,
                                    const AssemblyOptions& opts = {})
{
  if (g.is_quadratic()) throw std::invalid_argument("assemble: quadratic objective; linearize it first");
  g.validate();
  const int r = RelaxationOrder::checked(g, order.r).r;
  AssembledRelaxation out;
  out.order = r;
  ConicProgram& P = out.program;

  int total = 0;
  for (const auto& v : g.variables) {
    out.offsets.push_back(total);
    for (const auto& a : enumerate_indices(v.support.dimension(), 2 * r))
      P.var_names.push_back(v.id + "[" + a.to_string() + "]");
    total += static_cast<int>(basis_size(v.support.dimension(), 2 * r));
  }
  P.num_vars = total;
  P.c.assign(total, 0.0);
  auto col = [&](std::size_t var, const MultiIndex& a) {
    return out.offsets[var] + static_cast<int>(grlex_rank(a));
  };

  for (const auto& t : std::get<LinearMomentFunctional>(g.objective).terms) P.c[col(t.variable, t.index)] += t.coefficient;

  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& var = g.variables[v];
    const std::size_t n = var.support.dimension();
    const auto locs = detail::localizers(var.support, opts.schmudgen, r);
    for (std::size_t k = 0; k < locs.size(); ++k) {
      const auto& gk = locs[k];
      const int rk = r - (gk.degree() + 1) / 2;
      if (rk < 0) throw std::invalid_argument("assemble: localizer degree exceeds the relaxation order");
      const auto basis = enumerate_indices(n, rk);
      ConeBlock blk;
      blk.kind = ConeKind::PSD;
      blk.size = static_cast<int>(basis.size());
      blk.label = var.id + (k == 0 ? " moment" : " localizing " + std::to_string(k));
      std::map<int, std::vector<BlockEntry>> per_var;
      for (int i = 0; i < blk.size; ++i)
        for (int j = i; j < blk.size; ++j) {
          const MultiIndex ab = basis[i] + basis[j];
          for (const auto& [gam, c] : gk.terms()) per_var[col(v, ab + gam)].push_back({i, j, c});
        }
      for (auto& [j, es] : per_var) blk.coefficients.push_back({j, std::move(es)});
      P.blocks.push_back(std::move(blk));
    }
    if (var.mass == MassBound::AtMost) {
      ConeBlock blk;
      blk.kind = ConeKind::Nonneg;
      blk.size = 1;
      blk.label = var.id + " mass";
      blk.constant = {{0, 0, 1.0}};
      blk.coefficients = {{out.offsets[v], {{0, 0, -1.0}}}};
      P.blocks.push_back(std::move(blk));
    }
  }

  for (std::size_t v = 0; v < g.variables.size(); ++v)
    if (g.variables[v].mass == MassBound::Equal) {
      P.rows.push_back({{out.offsets[v]}, {1.0}});
      P.b.push_back(1.0);
    }
  for (const auto& c : g.equalities(2 * r)) {
    std::vector<std::pair<int, double>> es;
    for (const auto& t : c.lhs.terms) es.push_back({col(t.variable, t.index), t.coefficient});
    auto row = detail::merged_row(es);
    if (row.index.empty()) {
      if (std::abs(c.rhs) > 1e-12) throw std::invalid_argument("assemble: constraint 0 = nonzero");
      continue;
    }
    P.rows.push_back(std::move(row));
    P.b.push_back(c.rhs);
  }
  P.validate();
  return out;
}

struct RelaxationResult {
  int order = 0;
  double rho = 0.0;
  std::vector<TruncatedMomentSequence> sequences;
  SolveStatus status = SolveStatus::NumericalFailure;
  SolveReport report;
  double max_equality_violation = 0.0;
  double min_psd_eigenvalue = 0.0;
  bool monotonicity_violation = false;
  std::string message;

  std::string status_name() const { return to_string(status); }
  bool solved() const { return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal; }
};

struct RelaxationOptions {
  SolverOptions solver;
  AssemblyOptions assembly;
};

inline std::vector<TruncatedMomentSequence> extract_sequences(const GeneralizedMomentProblem& g,
                                                              const AssembledRelaxation& a, const Eigen::VectorXd& x)
{
  std::vector<TruncatedMomentSequence> ys;
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& s = g.variables[v].support;
    const auto len = static_cast<Eigen::Index>(basis_size(s.dimension(), 2 * a.order));
    ys.emplace_back(s.dimension(), 2 * a.order, x.segment(a.offsets[v], len), s.frame());
  }
  return ys;
}

// residuals recomputed from the extracted sequences
inline void fill_residuals(const GeneralizedMomentProblem& g, const AssembledRelaxation& a, RelaxationResult& res,
                           const AssemblyOptions& opts)
{
  double viol = 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.program.num_vars);
  for (std::size_t v = 0; v < res.sequences.size(); ++v)
    x.segment(a.offsets[v], res.sequences[v].values().size()) = res.sequences[v].values();
  for (std::size_t i = 0; i < a.program.rows.size(); ++i) {
    double s = -a.program.b[i];
    for (std::size_t t = 0; t < a.program.rows[i].index.size(); ++t)
      s += a.program.rows[i].value[t] * x(a.program.rows[i].index[t]);
    viol = std::max(viol, std::abs(s));
  }
  res.max_equality_violation = viol;
  double mineig = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < g.variables.size(); ++v)
    for (const auto& gk : detail::localizers(g.variables[v].support, opts.schmudgen, res.order)) {
      const int rk = res.order - (gk.degree() + 1) / 2;
      auto M = localizing_matrix(res.sequences[v], gk, rk).entries;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      mineig = std::min(mineig, es.eigenvalues()(0));
    }
  res.min_psd_eigenvalue = mineig;
}

inline RelaxationResult solve_order(const GeneralizedMomentProblem& g, int r, const RelaxationOptions& opts = {})
{
  const auto a = assemble(g, RelaxationOrder::checked(g, r), opts.assembly);
  auto sol = solve(a.program, opts.solver);
  RelaxationResult res;
  res.order = a.order;
  res.report = sol.report;
  res.status = sol.report.status;
  res.rho = sol.report.primal_objective;
  res.message = sol.report.message;
  if (sol.x.size() == a.program.num_vars) {
    res.sequences = extract_sequences(g, a, sol.x);
    fill_residuals(g, a, res, opts.assembly);
  }
  return res;
}

// flags orders whose optimum drops below the best earlier one by more than 10x the tolerance
inline void flag_monotonicity(std::vector<RelaxationResult>& results, double tol)
{
  bool have = false;
  double best = 0.0;
  for (auto& r : results) {
    if (!r.solved()) continue;
    if (have && r.rho < best - 10.0 * tol * std::max(1.0, std::abs(best))) r.monotonicity_violation = true;
    best = have ? std::max(best, r.rho) : r.rho;
    have = true;
  }
}

inline std::vector<RelaxationResult> hierarchy(const GeneralizedMomentProblem& g, int r_min, int r_max,
                                               const RelaxationOptions& opts = {})
{
  RelaxationOrder::checked(g, r_min);
  if (r_max < r_min) throw std::invalid_argument("hierarchy: r_max < r_min");
  std::vector<RelaxationResult> out;
  for (int r = r_min; r <= r_max; ++r) {
    try {
      out.push_back(solve_order(g, r, opts));
    } catch (const std::exception& e) {
      RelaxationResult f;
      f.order = r;
      f.status = SolveStatus::NumericalFailure;
      f.message = e.what();
      out.push_back(std::move(f));
    }
  }
  flag_monotonicity(out, opts.solver.tol);
  return out;
}

}  // namespace momentot
