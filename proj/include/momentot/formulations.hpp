#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "moments.hpp"
#include "polyalg.hpp"

namespace momentot {

enum class VariableRole { TransportPlan, SplitPiece, Barycenter, Auxiliary };
enum class MassBound { Equal, AtMost };

struct MeasureVariable {
  std::string id;
  SemialgebraicSet support;
  VariableRole role = VariableRole::TransportPlan;
  MassBound mass = MassBound::Equal;
  std::optional<ProductStructure> structure;
};

struct LinearTerm {
  std::size_t variable = 0;
  MultiIndex index;
  double coefficient = 0.0;
};

struct LinearMomentFunctional {
  std::vector<LinearTerm> terms;

  int degree() const
  {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, t.index.degree());
    return d;
  }
  double evaluate(const std::vector<TruncatedMomentSequence>& ys) const
  {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * ys.at(t.variable).at(t.index);
    return s;
  }
  void add(std::size_t var, const Polynomial& p, double scale = 1.0)
  {
    for (const auto& [a, c] : p.terms()) terms.push_back({var, a, scale * c});
  }
};

struct QuadraticTerm {
  std::size_t variable = 0;
  MultiIndex left;
  MultiIndex right;
  double coefficient = 0.0;
};

// sum_k a_k y[left_k] y[right_k]
struct QuadraticMomentFunctional {
  std::vector<QuadraticTerm> terms;

  int degree() const
  {
    int d = 0;
    for (const auto& t : terms) d = std::max({d, t.left.degree(), t.right.degree()});
    return d;
  }
  double evaluate(const std::vector<TruncatedMomentSequence>& ys) const
  {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * ys.at(t.variable).at(t.left) * ys.at(t.variable).at(t.right);
    return s;
  }
};

struct MomentConstraint {
  LinearMomentFunctional lhs;
  double rhs = 0.0;
};

// A whole family of equalities, one per index beta of a linked space:
//   sum_t coef_t * y_{var_t}[embed(beta, block_t)] = data[beta]  (0 without data)
// Expanded at assembly for |beta| <= 2r.
struct MomentLink {
  struct Term {
    std::size_t variable = 0;
    std::optional<std::size_t> block;  // factor of the variable's product structure, or the whole space
    double coefficient = 1.0;
  };
  std::vector<Term> terms;
  std::size_t dimension = 1;
  std::optional<TruncatedMomentSequence> data;
  std::string label;
};

// A measure obtained from the variables, e.g. a barycenter as a left marginal
struct MarginalView {
  std::string name;
  std::vector<std::pair<std::size_t, double>> variables;
  std::optional<std::size_t> block;
  std::size_t dimension = 1;
  AffineFrame frame;
};

class GeneralizedMomentProblem {
 public:
  using Objective = std::variant<LinearMomentFunctional, QuadraticMomentFunctional>;

  std::string kind;
  std::vector<MeasureVariable> variables;
  Objective objective;
  std::vector<MomentConstraint> constraints;
  std::vector<MomentLink> links;
  std::vector<MarginalView> views;
  std::vector<TruncatedMomentSequence> marginals;

  bool is_quadratic() const { return std::holds_alternative<QuadraticMomentFunctional>(objective); }

  std::size_t index_of(const std::string& id) const
  {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].id == id) return i;
    throw std::out_of_range("GeneralizedMomentProblem: unknown variable '" + id + "'");
  }

  int objective_degree() const
  {
    return std::visit([](const auto& o) { return o.degree(); }, objective);
  }

  // smallest admissible relaxation order
  int minimal_order() const
  {
    int r = (objective_degree() + 1) / 2;
    for (const auto& v : variables) r = std::max(r, (v.support.max_inequality_degree() + 1) / 2);
    for (const auto& c : constraints) r = std::max(r, (c.lhs.degree() + 1) / 2);
    return std::max(r, 1);
  }

  const MarginalView& view(const std::string& name) const
  {
    for (const auto& v : views)
      if (v.name == name) return v;
    throw std::out_of_range("GeneralizedMomentProblem: unknown view '" + name + "'");
  }

  void validate() const
  {
    std::set<std::string> ids;
    for (const auto& v : variables) {
      if (!ids.insert(v.id).second) throw std::invalid_argument("GeneralizedMomentProblem: duplicate id " + v.id);
      if (v.support.inequalities().empty()) throw std::invalid_argument("GeneralizedMomentProblem: support without ball");
    }
    auto check_var = [&](std::size_t var, const MultiIndex* a) {
      if (var >= variables.size()) throw std::invalid_argument("GeneralizedMomentProblem: unknown variable index");
      if (a && a->size() != variables[var].support.dimension())
        throw std::invalid_argument("GeneralizedMomentProblem: index dimension does not match variable");
    };
    std::visit(
        [&](const auto& o) {
          for (const auto& t : o.terms) {
            if constexpr (std::is_same_v<std::decay_t<decltype(t)>, LinearTerm>) {
              check_var(t.variable, &t.index);
            } else {
              check_var(t.variable, &t.left);
              check_var(t.variable, &t.right);
            }
          }
        },
        objective);
    for (const auto& c : constraints)
      for (const auto& t : c.lhs.terms) check_var(t.variable, &t.index);
    for (const auto& l : links) {
      if (l.data && l.data->dimension() != l.dimension)
        throw std::invalid_argument("GeneralizedMomentProblem: link data dimension mismatch");
      for (const auto& t : l.terms) {
        check_var(t.variable, nullptr);
        const auto& v = variables[t.variable];
        if (t.block) {
          if (!v.structure) throw std::invalid_argument("GeneralizedMomentProblem: block link on a non-product variable");
          if (v.structure->factor_dimensions.at(*t.block) != l.dimension)
            throw std::invalid_argument("GeneralizedMomentProblem: link block dimension mismatch");
        } else if (v.support.dimension() != l.dimension) {
          throw std::invalid_argument("GeneralizedMomentProblem: link dimension mismatch");
        }
      }
    }
  }

  // equality rows active at relaxation degree 2r (explicit constraints plus expanded links)
  std::vector<MomentConstraint> equalities(int degree) const
  {
    std::vector<MomentConstraint> out;
    for (const auto& c : constraints)
      if (c.lhs.degree() <= degree) out.push_back(c);
    for (const auto& l : links) {
      if (l.data && l.data->degree() < degree)
        throw std::invalid_argument("link '" + l.label + "' carries moments up to degree " +
                                    std::to_string(l.data->degree()) + " but degree " + std::to_string(degree) +
                                    " is required");
      for (const auto& beta : enumerate_indices(l.dimension, degree)) {
        MomentConstraint c;
        for (const auto& t : l.terms) {
          const auto& v = variables[t.variable];
          MultiIndex a = t.block ? embed_marginal_index(beta, *t.block, *v.structure) : beta;
          c.lhs.terms.push_back({t.variable, std::move(a), t.coefficient});
        }
        c.rhs = l.data ? l.data->at(beta) : 0.0;
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  // moments of a view from solved sequences
  TruncatedMomentSequence extract(const std::string& name, const std::vector<TruncatedMomentSequence>& ys) const
  {
    const auto& v = view(name);
    int degree = INT_MAX;
    for (const auto& [var, c] : v.variables) degree = std::min(degree, ys.at(var).degree());
    TruncatedMomentSequence out(v.dimension, degree, v.frame);
    for (const auto& beta : enumerate_indices(v.dimension, degree)) {
      double s = 0.0;
      for (const auto& [var, c] : v.variables) {
        const auto& var_def = variables[var];
        MultiIndex a = v.block ? embed_marginal_index(beta, *v.block, *var_def.structure) : beta;
        s += c * ys[var].at(a);
      }
      out.at(beta) = s;
    }
    return out;
  }
};

namespace detail {

inline Polynomial in_frame(const Polynomial& p, const AffineFrame& f) { return p.compose_affine(f.offset, f.scale); }

inline void require_normalized(const TruncatedMomentSequence& m, const char* who)
{
  if (std::abs(m.mass() - 1.0) > 1e-12) throw std::invalid_argument(std::string(who) + ": marginal is not a probability measure");
}

inline TruncatedMomentSequence in_set_frame(const TruncatedMomentSequence& m, const SemialgebraicSet& s)
{
  if (m.dimension() != s.dimension()) throw std::invalid_argument("marginal dimension does not match its set");
  return reframe(m, s.frame());
}

inline MomentLink marginal_link(std::vector<std::size_t> vars, std::size_t block, const TruncatedMomentSequence& data,
                                std::string label)
{
  MomentLink l;
  for (auto v : vars) l.terms.push_back({v, block, 1.0});
  l.dimension = data.dimension();
  l.data = data;
  l.label = std::move(label);
  return l;
}

inline void check_weights(const std::vector<double>& w, std::size_t n)
{
  if (w.size() != n) throw std::invalid_argument("barycenter: one weight per measure is required");
  double s = 0.0;
  for (double v : w) {
    if (v < -1e-10) throw std::invalid_argument("barycenter: negative weight");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-10) throw std::invalid_argument("barycenter: weights must sum to 1");
}

// sum_i (x_i - y_i)^p on (x, y) of dimension 2d
inline Polynomial lp_cost(std::size_t d, int p)
{
  Polynomial c(2 * d);
  for (std::size_t i = 0; i < d; ++i)
    c = c + (Polynomial::variable(2 * d, i) - Polynomial::variable(2 * d, d + i)).pow(p);
  return c;
}

}  // namespace detail

// one plan on X_1 x ... x X_K with prescribed marginals
inline GeneralizedMomentProblem build_multimarginal(const Polynomial& cost,
                                                    const std::vector<TruncatedMomentSequence>& marginals,
                                                    const std::vector<SemialgebraicSet>& sets,
                                                    bool per_factor_balls = false)
{
  if (sets.empty() || marginals.size() != sets.size())
    throw std::invalid_argument("build_multimarginal: one marginal per set is required");
  auto [X, ps] = product_set(sets, per_factor_balls);
  if (cost.dimension() != X.dimension()) throw std::invalid_argument("build_multimarginal: cost dimension mismatch");
  GeneralizedMomentProblem g;
  g.kind = "multimarginal";
  g.variables.push_back({"plan", X, VariableRole::TransportPlan, MassBound::Equal, ps});
  LinearMomentFunctional obj;
  obj.add(0, detail::in_frame(cost, X.frame()));
  g.objective = obj;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    detail::require_normalized(marginals[i], "build_multimarginal");
    auto m = detail::in_set_frame(marginals[i], sets[i]);
    g.marginals.push_back(m);
    g.links.push_back(detail::marginal_link({0}, i, m, "marginal " + std::to_string(i + 1)));
    g.views.push_back({"marginal" + std::to_string(i + 1), {{0, 1.0}}, i, sets[i].dimension(), sets[i].frame()});
  }
  g.views.push_back({"plan", {{0, 1.0}}, std::nullopt, X.dimension(), X.frame()});
  g.validate();
  return g;
}

inline GeneralizedMomentProblem build_wp_even(int p, const TruncatedMomentSequence& mu, const TruncatedMomentSequence& nu,
                                              const SemialgebraicSet& set)
{
  if (p < 2 || p % 2) throw std::invalid_argument("build_wp_even: p must be even");
  if (mu.dimension() != nu.dimension() || mu.dimension() != set.dimension())
    throw std::invalid_argument("build_wp_even: dimension mismatch");
  auto g = build_multimarginal(detail::lp_cost(set.dimension(), p), {mu, nu}, {set, set});
  g.kind = "wasserstein";
  return g;
}

namespace detail {

// split pieces of an odd-power cost; returns the variable indices (plus, minus) per coordinate
inline std::vector<std::pair<std::size_t, std::size_t>> add_split_pieces(GeneralizedMomentProblem& g,
                                                                         const SemialgebraicSet& X,
                                                                         const ProductStructure& ps, int p,
                                                                         double weight, const std::string& prefix,
                                                                         LinearMomentFunctional& obj)
{
  const std::size_t d = ps.factor_dimensions[0];
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < d; ++i) {
    Polynomial diff = Polynomial::variable(2 * d, i) - Polynomial::variable(2 * d, d + i);
    diff = in_frame(diff, X.frame());
    const Polynomial cp = diff.pow(p);
    const std::size_t plus = g.variables.size();
    g.variables.push_back({prefix + "plus" + std::to_string(i + 1), X.with({diff}), VariableRole::SplitPiece,
                           MassBound::AtMost, ps});
    const std::size_t minus = g.variables.size();
    g.variables.push_back({prefix + "minus" + std::to_string(i + 1), X.with({-diff}), VariableRole::SplitPiece,
                           MassBound::AtMost, ps});
    obj.add(plus, cp, weight);
    obj.add(minus, cp, -weight);
    out.push_back({plus, minus});
  }
  // y_1^+ + y_1^- = y_i^+ + y_i^-
  for (std::size_t i = 1; i < d; ++i) {
    MomentLink l;
    l.terms = {{out[0].first, std::nullopt, 1.0},
               {out[0].second, std::nullopt, 1.0},
               {out[i].first, std::nullopt, -1.0},
               {out[i].second, std::nullopt, -1.0}};
    l.dimension = 2 * d;
    l.label = prefix + "split link " + std::to_string(i + 1);
    g.links.push_back(std::move(l));
  }
  return out;
}

}  // namespace detail

inline GeneralizedMomentProblem build_wp_odd(int p, const TruncatedMomentSequence& mu, const TruncatedMomentSequence& nu,
                                             const SemialgebraicSet& set)
{
  if (p < 1 || p % 2 == 0) throw std::invalid_argument("build_wp_odd: p must be odd");
  if (mu.dimension() != nu.dimension() || mu.dimension() != set.dimension())
    throw std::invalid_argument("build_wp_odd: dimension mismatch");
  detail::require_normalized(mu, "build_wp_odd");
  detail::require_normalized(nu, "build_wp_odd");
  auto [X, ps] = product_set({set, set});
  GeneralizedMomentProblem g;
  g.kind = "wasserstein";
  LinearMomentFunctional obj;
  auto pieces = detail::add_split_pieces(g, X, ps, p, 1.0, "", obj);
  g.objective = obj;
  const auto [p0, m0] = pieces[0];
  auto a = detail::in_set_frame(mu, set), b = detail::in_set_frame(nu, set);
  g.marginals = {a, b};
  g.links.push_back(detail::marginal_link({p0, m0}, 0, a, "marginal 1"));
  g.links.push_back(detail::marginal_link({p0, m0}, 1, b, "marginal 2"));
  g.views.push_back({"plan", {{p0, 1.0}, {m0, 1.0}}, std::nullopt, X.dimension(), X.frame()});
  g.validate();
  return g;
}

struct CostPiece {
  Polynomial cost;                 // on the product space, original coordinates
  std::vector<Polynomial> region;  // closure of the piece: region_j >= 0
};

inline GeneralizedMomentProblem build_piecewise(const std::vector<CostPiece>& pieces,
                                                const std::vector<TruncatedMomentSequence>& marginals,
                                                const std::vector<SemialgebraicSet>& sets)
{
  if (pieces.empty()) throw std::invalid_argument("build_piecewise: no pieces");
  if (sets.empty() || marginals.size() != sets.size())
    throw std::invalid_argument("build_piecewise: one marginal per set is required");
  auto [X, ps] = product_set(sets);
  GeneralizedMomentProblem g;
  g.kind = "piecewise";
  LinearMomentFunctional obj;
  std::vector<std::size_t> vars;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& pc = pieces[k];
    if (pc.cost.dimension() != X.dimension()) throw std::invalid_argument("build_piecewise: cost dimension mismatch");
    std::vector<Polynomial> reg;
    for (const auto& r : pc.region) {
      if (r.dimension() != X.dimension()) throw std::invalid_argument("build_piecewise: region dimension mismatch");
      reg.push_back(detail::in_frame(r, X.frame()));
    }
    vars.push_back(g.variables.size());
    g.variables.push_back({"piece" + std::to_string(k + 1), X.with(reg), VariableRole::SplitPiece, MassBound::AtMost, ps});
    obj.add(vars.back(), detail::in_frame(pc.cost, X.frame()));
  }
  g.objective = obj;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    detail::require_normalized(marginals[i], "build_piecewise");
    auto m = detail::in_set_frame(marginals[i], sets[i]);
    g.marginals.push_back(m);
    g.links.push_back(detail::marginal_link(vars, i, m, "marginal " + std::to_string(i + 1)));
  }
  MarginalView plan{"plan", {}, std::nullopt, X.dimension(), X.frame()};
  for (auto v : vars) plan.variables.push_back({v, 1.0});
  g.views.push_back(plan);
  g.validate();
  return g;
}

inline GeneralizedMomentProblem build_barycenter_wp(int p, const std::vector<TruncatedMomentSequence>& measures,
                                                    const std::vector<double>& weights, const SemialgebraicSet& set)
{
  if (measures.empty()) throw std::invalid_argument("build_barycenter_wp: no measures");
  if (p < 1) throw std::invalid_argument("build_barycenter_wp: p must be >= 1");
  detail::check_weights(weights, measures.size());
  const std::size_t d = set.dimension();
  auto [X, ps] = product_set({set, set});
  GeneralizedMomentProblem g;
  g.kind = "barycenter";
  LinearMomentFunctional obj;
  std::vector<std::vector<std::pair<std::size_t, double>>> heads;  // per measure: variables forming the plan
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (measures[i].dimension() != d) throw std::invalid_argument("build_barycenter_wp: dimension mismatch");
    detail::require_normalized(measures[i], "build_barycenter_wp");
    auto m = detail::in_set_frame(measures[i], set);
    g.marginals.push_back(m);
    std::vector<std::size_t> plan_vars;
    if (p % 2 == 0) {
      plan_vars.push_back(g.variables.size());
      g.variables.push_back({"plan" + std::to_string(i + 1), X, VariableRole::TransportPlan, MassBound::Equal, ps});
      obj.add(plan_vars[0], detail::in_frame(detail::lp_cost(d, p), X.frame()), weights[i]);
    } else {
      auto pieces = detail::add_split_pieces(g, X, ps, p, weights[i], "plan" + std::to_string(i + 1) + "_", obj);
      plan_vars = {pieces[0].first, pieces[0].second};
    }
    g.links.push_back(detail::marginal_link(plan_vars, 1, m, "right marginal " + std::to_string(i + 1)));
    std::vector<std::pair<std::size_t, double>> h;
    for (auto v : plan_vars) h.push_back({v, 1.0});
    heads.push_back(h);
  }
  g.objective = obj;
  // consecutive plans share the left marginal
  for (std::size_t i = 0; i + 1 < heads.size(); ++i) {
    MomentLink l;
    for (auto [v, c] : heads[i]) l.terms.push_back({v, 0, 1.0});
    for (auto [v, c] : heads[i + 1]) l.terms.push_back({v, 0, -1.0});
    l.dimension = d;
    l.label = "left marginal link " + std::to_string(i + 1);
    g.links.push_back(std::move(l));
  }
  g.views.push_back({"barycenter", heads[0], 0, d, set.frame()});
  g.validate();
  return g;
}

namespace detail {

// (c_X(x, x') - c_Y(y, y'))^p on z = (x, y, x', y') in normalized coordinates, split into (left, right) halves
inline QuadraticMomentFunctional gw_terms(int p, const Polynomial& cX, const Polynomial& cY, const SemialgebraicSet& X,
                                          const SemialgebraicSet& Y, std::size_t variable, double weight)
{
  const std::size_t dx = X.dimension(), dy = Y.dimension(), n = dx + dy;
  if (cX.dimension() != 2 * dx || cY.dimension() != 2 * dy)
    throw std::invalid_argument("build_gw_even: costs must act on X x X and Y x Y");
  std::vector<std::size_t> px, py;
  for (std::size_t i = 0; i < dx; ++i) px.push_back(i);
  for (std::size_t i = 0; i < dx; ++i) px.push_back(n + i);
  for (std::size_t i = 0; i < dy; ++i) py.push_back(dx + i);
  for (std::size_t i = 0; i < dy; ++i) py.push_back(n + dx + i);
  const AffineFrame fz = AffineFrame::concat({X.frame(), Y.frame(), X.frame(), Y.frame()});
  Polynomial base = cX.lift(2 * n, px) - cY.lift(2 * n, py);
  base = in_frame(base, fz);
  const Polynomial full = expand_abs_power_even(base, p);
  QuadraticMomentFunctional q;
  for (const auto& [a, c] : full.terms()) q.terms.push_back({variable, a.slice(0, n), a.slice(n, n), weight * c});
  return q;
}

}  // namespace detail

inline GeneralizedMomentProblem build_gw_even(int p, const Polynomial& cX, const Polynomial& cY,
                                              const TruncatedMomentSequence& mu, const TruncatedMomentSequence& nu,
                                              const SemialgebraicSet& setX, const SemialgebraicSet& setY)
{
  if (p < 2 || p % 2) throw std::invalid_argument("build_gw_even: p must be even");
  detail::require_normalized(mu, "build_gw_even");
  detail::require_normalized(nu, "build_gw_even");
  auto [Z, ps] = product_set({setX, setY});
  GeneralizedMomentProblem g;
  g.kind = "gw";
  g.variables.push_back({"plan", Z, VariableRole::TransportPlan, MassBound::Equal, ps});
  g.objective = detail::gw_terms(p, cX, cY, setX, setY, 0, 1.0);
  auto a = detail::in_set_frame(mu, setX), b = detail::in_set_frame(nu, setY);
  g.marginals = {a, b};
  g.links.push_back(detail::marginal_link({0}, 0, a, "marginal 1"));
  g.links.push_back(detail::marginal_link({0}, 1, b, "marginal 2"));
  g.views.push_back({"plan", {{0, 1.0}}, std::nullopt, Z.dimension(), Z.frame()});
  g.validate();
  return g;
}

// sum_i (u_i - u'_i)^q on (u, u')
inline Polynomial lq_cost(std::size_t d, int q)
{
  if (q < 2 || q % 2) throw std::invalid_argument("l^q cost: q must be even");
  return detail::lp_cost(d, q);
}

inline GeneralizedMomentProblem build_gw_pq(int p, int q, const TruncatedMomentSequence& mu,
                                            const TruncatedMomentSequence& nu, const SemialgebraicSet& setX,
                                            const SemialgebraicSet& setY)
{
  return build_gw_even(p, lq_cost(setX.dimension(), q), lq_cost(setY.dimension(), q), mu, nu, setX, setY);
}

// Barycenter y on X and plans y_i on X x Y with marginals (y, mu_i)
inline GeneralizedMomentProblem build_gw_barycenter(const std::vector<TruncatedMomentSequence>& measures,
                                                    const std::vector<double>& weights, const SemialgebraicSet& setX,
                                                    const SemialgebraicSet& setY, int p = 2, int q = 2)
{
  if (measures.empty()) throw std::invalid_argument("build_gw_barycenter: no measures");
  if (p != 2 || q != 2) throw std::invalid_argument("build_gw_barycenter: only p = q = 2 is supported");
  detail::check_weights(weights, measures.size());
  auto [Z, ps] = product_set({setX, setY});
  GeneralizedMomentProblem g;
  g.kind = "gw_barycenter";
  g.variables.push_back({"barycenter", setX, VariableRole::Barycenter, MassBound::Equal, std::nullopt});
  QuadraticMomentFunctional obj;
  const Polynomial cX = lq_cost(setX.dimension(), q), cY = lq_cost(setY.dimension(), q);
  for (std::size_t i = 0; i < measures.size(); ++i) {
    detail::require_normalized(measures[i], "build_gw_barycenter");
    auto m = detail::in_set_frame(measures[i], setY);
    g.marginals.push_back(m);
    const std::size_t v = g.variables.size();
    g.variables.push_back({"plan" + std::to_string(i + 1), Z, VariableRole::TransportPlan, MassBound::Equal, ps});
    auto t = detail::gw_terms(p, cX, cY, setX, setY, v, weights[i]);
    for (auto& term : t.terms)
      if (term.coefficient != 0.0) obj.terms.push_back(std::move(term));
    MomentLink left;
    left.terms = {{v, 0, 1.0}, {0, std::nullopt, -1.0}};
    left.dimension = setX.dimension();
    left.label = "left marginal " + std::to_string(i + 1);
    g.links.push_back(std::move(left));
    g.links.push_back(detail::marginal_link({v}, 1, m, "right marginal " + std::to_string(i + 1)));
  }
  g.objective = obj;
  g.views.push_back({"barycenter", {{0, 1.0}}, std::nullopt, setX.dimension(), setX.frame()});
  g.validate();
  return g;
}

// c_{left} = sum_k a_k prev[right_k], aggregated over equal left indices
inline LinearMomentFunctional gw_linearize(const GeneralizedMomentProblem& problem,
                                           const std::vector<TruncatedMomentSequence>& prev)
{
  const auto* q = std::get_if<QuadraticMomentFunctional>(&problem.objective);
  if (!q) throw std::invalid_argument("gw_linearize: objective is not quadratic");
  if (prev.size() != problem.variables.size()) throw std::invalid_argument("gw_linearize: one sequence per variable");
  std::map<std::pair<std::size_t, MultiIndex>, double> acc;
  for (const auto& t : q->terms) acc[{t.variable, t.left}] += t.coefficient * prev[t.variable].at(t.right);
  LinearMomentFunctional out;
  for (const auto& [key, c] : acc)
    if (c != 0.0) out.terms.push_back({key.first, key.second, c});
  return out;
}

inline LinearMomentFunctional gw_linearize(const GeneralizedMomentProblem& problem, const TruncatedMomentSequence& prev)
{
  if (problem.variables.size() != 1) throw std::invalid_argument("gw_linearize: problem has several variables");
  return gw_linearize(problem, std::vector<TruncatedMomentSequence>{prev});
}

}  // namespace momentot
