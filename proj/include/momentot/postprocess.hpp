#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "moments.hpp"

namespace momentot {

// Spectral form of M_r(y), built in the frame of y
struct ChristoffelModel {
  int order = 0;
  std::size_t dimension = 0;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXd moment_matrix;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  int rank = 0;
  double rank_threshold = 0.0;  // relative to the largest eigenvalue
  AffineFrame frame;

  std::size_t basis_size() const { return basis.size(); }
};

inline ChristoffelModel christoffel_model(const TruncatedMomentSequence& y, int r, double rank_threshold = -1.0)
{
  if (r < 0) throw std::invalid_argument("christoffel_model: negative order");
  if (2 * r > y.degree())
    throw std::invalid_argument("christoffel_model: order " + std::to_string(r) + " needs moments of degree " +
                                std::to_string(2 * r));
  if (!y.values().allFinite()) throw std::invalid_argument("christoffel_model: non-finite moments");
  ChristoffelModel m;
  m.order = r;
  m.dimension = y.dimension();
  m.frame = y.frame();
  auto M = moment_matrix(y, r);
  m.basis = std::move(M.basis);
  m.moment_matrix = std::move(M.entries);
  m.rank_threshold = rank_threshold > 0.0 ? rank_threshold : static_cast<double>(m.basis.size()) * 1e-10;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.moment_matrix);
  const Eigen::Index s = m.moment_matrix.rows();
  m.eigenvalues = es.eigenvalues().reverse();
  m.eigenvectors = es.eigenvectors().rowwise().reverse();
  const double lmax = std::max(0.0, m.eigenvalues(0));
  m.rank = 0;
  for (Eigen::Index i = 0; i < s; ++i)
    if (lmax > 0.0 && m.eigenvalues(i) >= m.rank_threshold * lmax) ++m.rank;
  return m;
}

// kappa(x, x) at a point in original coordinates, pseudo-inverse on the retained eigenpairs
inline double kernel_diag(const ChristoffelModel& m, std::span<const double> x)
{
  if (x.size() != m.dimension) throw std::invalid_argument("kernel_diag: point dimension mismatch");
  const auto z = m.frame.to_normalized(x);
  const Eigen::VectorXd phi = monomial_vector(z, m.basis);
  double k = 0.0;
  for (int i = 0; i < m.rank; ++i) {
    const double t = m.eigenvectors.col(i).dot(phi);
    k += t * t / m.eigenvalues(i);
  }
  return k;
}

inline double christoffel(const ChristoffelModel& m, std::span<const double> x)
{
  const double k = kernel_diag(m, x);
  return k > 0.0 ? 1.0 / k : std::numeric_limits<double>::infinity();
}

struct SupportEstimate {
  std::vector<std::vector<double>> points;
  std::vector<double> kappa;
  std::vector<bool> inside;
  double gamma = 0.0;      // threshold on the Christoffel function
  double threshold = 0.0;  // threshold on kappa, 1 / gamma

  double inside_fraction() const
  {
    if (inside.empty()) return 0.0;
    std::size_t c = 0;
    for (bool b : inside) c += b;
    return static_cast<double>(c) / static_cast<double>(inside.size());
  }
};

// x is inside when kappa(x, x) <= s(r) / eta
inline SupportEstimate support_estimate(const ChristoffelModel& m, const std::vector<std::vector<double>>& grid,
                                        double eta = 0.3)
{
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("support_estimate: eta must lie in (0, 1)");
  if (grid.empty()) throw std::invalid_argument("support_estimate: empty grid");
  SupportEstimate s;
  s.gamma = eta / static_cast<double>(m.basis_size());
  s.threshold = 1.0 / s.gamma;
  s.points = grid;
  for (const auto& x : grid) {
    const double k = kernel_diag(m, x);
    s.kappa.push_back(k);
    s.inside.push_back(k <= s.threshold);
  }
  return s;
}

// regular grid of cell centers over [lo, hi] with counts[i] points per axis, first axis fastest
inline std::vector<std::vector<double>> regular_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                                                     const std::vector<std::size_t>& counts)
{
  const std::size_t n = lo.size();
  if (n == 0 || hi.size() != n || counts.size() != n) throw std::invalid_argument("regular_grid: bad bounds");
  std::size_t total = 1;
  for (auto c : counts) {
    if (c == 0) throw std::invalid_argument("regular_grid: resolution must be positive");
    total *= c;
  }
  std::vector<std::vector<double>> out;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * (static_cast<double>(idx[i]) + 0.5) / static_cast<double>(counts[i]);
    out.push_back(std::move(x));
    for (std::size_t i = 0; i < n && ++idx[i] == counts[i]; ++i) idx[i] = 0;
  }
  return out;
}

// integral of g (original coordinates) against y
inline double qoi_estimate(const TruncatedMomentSequence& y, const Polynomial& g)
{
  if (g.dimension() != y.dimension()) throw std::invalid_argument("qoi_estimate: dimension mismatch");
  if (g.degree() > y.degree())
    throw std::invalid_argument("qoi_estimate: polynomial degree " + std::to_string(g.degree()) +
                                " exceeds the moment degree " + std::to_string(y.degree()));
  return riesz(y, g.compose_affine(y.frame().offset, y.frame().scale));
}

struct QoiApproximation {
  double value = 0.0;
  double fit_residual = 0.0;  // max |g - g_p| over the samples
  Polynomial fit;             // g_p in original coordinates
};

// least-squares polynomial fit of degree p to samples of g, then integrated against y
inline QoiApproximation qoi_estimate_approx(const TruncatedMomentSequence& y,
                                            const std::vector<std::vector<double>>& points,
                                            const std::vector<double>& values, int p)
{
  if (p < 0) throw std::invalid_argument("qoi_estimate_approx: negative degree");
  if (p > y.degree()) throw std::invalid_argument("qoi_estimate_approx: fit degree exceeds the moment degree");
  if (points.size() != values.size() || points.empty())
    throw std::invalid_argument("qoi_estimate_approx: one value per sample point is required");
  const std::size_t n = y.dimension();
  const auto basis = enumerate_indices(n, p);
  Eigen::MatrixXd V(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd g(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != n) throw std::invalid_argument("qoi_estimate_approx: point dimension mismatch");
    V.row(static_cast<Eigen::Index>(k)) = monomial_vector(y.frame().to_normalized(points[k]), basis).transpose();
    g(static_cast<Eigen::Index>(k)) = values[k];
  }
  const Eigen::VectorXd c = V.completeOrthogonalDecomposition().solve(g);
  QoiApproximation out;
  out.fit_residual = (V * c - g).cwiseAbs().maxCoeff();
  Polynomial normalized(n);
  for (std::size_t k = 0; k < basis.size(); ++k) normalized.add_term(basis[k], c(static_cast<Eigen::Index>(k)));
  out.value = riesz(y, normalized);
  const AffineFrame inv = y.frame().inverse();
  out.fit = normalized.compose_affine(inv.offset, inv.scale);
  return out;
}

struct DensityFit {
  Polynomial density;  // original coordinates
  double residual = 0.0;
  int rank = 0;
  bool rank_deficient = false;
};

// density f of degree p w.r.t. the reference nu with y_alpha ~ int x^alpha f dnu for |alpha| <= deg y
inline DensityFit density_fit(const TruncatedMomentSequence& y, const TruncatedMomentSequence& reference, int p,
                              std::vector<double> weights = {}, double cutoff = 1e-12)
{
  if (p < 0) throw std::invalid_argument("density_fit: negative degree");
  if (reference.dimension() != y.dimension()) throw std::invalid_argument("density_fit: dimension mismatch");
  const int dy = y.degree();
  if (reference.degree() < dy + p)
    throw std::invalid_argument("density_fit: reference moments up to degree " + std::to_string(dy + p) +
                                " are required, got " + std::to_string(reference.degree()));
  const std::size_t n = y.dimension();
  const auto rows = enumerate_indices(n, dy), cols = enumerate_indices(n, p);
  if (weights.empty()) weights.assign(rows.size(), 1.0);
  if (weights.size() != rows.size()) throw std::invalid_argument("density_fit: one weight per moment is required");
  const auto nu = reframe(reference, y.frame());
  Eigen::MatrixXd G(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size())), w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("density_fit: weights must be positive");
    w(static_cast<Eigen::Index>(i)) = weights[i];
    b(static_cast<Eigen::Index>(i)) = y.at(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j)
      G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = nu.at(rows[i] + cols[j]);
  }
  const Eigen::MatrixXd N = G.transpose() * w.asDiagonal() * G;
  const Eigen::VectorXd rhs = G.transpose() * w.asDiagonal() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
  const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(N.rows());
  DensityFit out;
  for (Eigen::Index i = 0; i < N.rows(); ++i) {
    const double l = es.eigenvalues()(i);
    if (lmax > 0.0 && l > cutoff * lmax) {
      a += es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(rhs) / l);
      ++out.rank;
    }
  }
  out.rank_deficient = out.rank < N.rows();
  out.residual = std::sqrt((w.array() * (G * a - b).array().square()).sum());
  // f is a function of the point, so express it in original coordinates
  Polynomial normalized(n);
  for (std::size_t j = 0; j < cols.size(); ++j) normalized.add_term(cols[j], a(static_cast<Eigen::Index>(j)));
  const AffineFrame inv = y.frame().inverse();
  out.density = normalized.compose_affine(inv.offset, inv.scale);
  return out;
}

}  // namespace momentot
