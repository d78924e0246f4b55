#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "polyalg.hpp"

namespace momentot {

// y_alpha for |alpha| <= degree, stored densely in graded lexicographic order.
// Values live in the normalized coordinates described by frame().
class TruncatedMomentSequence {
 public:
  TruncatedMomentSequence() = default;
  TruncatedMomentSequence(std::size_t n, int degree, AffineFrame frame = {})
      : n_(n), degree_(degree), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_size(n, degree)))),
        frame_(std::move(frame))
  {
    if (n == 0) throw std::invalid_argument("TruncatedMomentSequence: dimension must be >= 1");
    if (degree < 0) throw std::invalid_argument("TruncatedMomentSequence: negative degree");
    if (frame_.offset.empty()) frame_ = AffineFrame::identity(n);
  }
  TruncatedMomentSequence(std::size_t n, int degree, Eigen::VectorXd values, AffineFrame frame = {})
      : TruncatedMomentSequence(n, degree, std::move(frame))
  {
    if (values.size() != values_.size()) throw std::invalid_argument("TruncatedMomentSequence: value count");
    values_ = std::move(values);
  }

  std::size_t dimension() const { return n_; }
  int degree() const { return degree_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  const AffineFrame& frame() const { return frame_; }
  void set_frame(AffineFrame f) { frame_ = std::move(f); }

  bool normalized() const { return normalized_; }
  void mark_normalized()
  {
    if (std::abs(values_(0) - 1.0) > 1e-12)
      throw std::invalid_argument("TruncatedMomentSequence: mass is not 1");
    normalized_ = true;
  }

  double mass() const { return values_(0); }

  double at(const MultiIndex& a) const { return values_(index(a)); }
  double& at(const MultiIndex& a) { return values_(index(a)); }
  double operator[](const MultiIndex& a) const { return at(a); }

  std::map<MultiIndex, double> as_map() const
  {
    std::map<MultiIndex, double> m;
    auto idx = enumerate_indices(n_, degree_);
    for (std::size_t i = 0; i < idx.size(); ++i) m.emplace(idx[i], values_(static_cast<Eigen::Index>(i)));
    return m;
  }

  TruncatedMomentSequence truncated(int degree) const
  {
    if (degree > degree_) throw std::out_of_range("TruncatedMomentSequence: truncation above stored degree");
    TruncatedMomentSequence t(n_, degree, values_.head(static_cast<Eigen::Index>(basis_size(n_, degree))), frame_);
    t.normalized_ = normalized_;
    return t;
  }

  Eigen::Index index(const MultiIndex& a) const
  {
    if (a.size() != n_) throw std::invalid_argument("TruncatedMomentSequence: index dimension mismatch");
    if (a.degree() > degree_)
      throw std::out_of_range("TruncatedMomentSequence: index " + a.to_string() + " exceeds stored degree " +
                              std::to_string(degree_));
    return static_cast<Eigen::Index>(grlex_rank(a));
  }

 private:
  std::size_t n_ = 1;
  int degree_ = 0;
  Eigen::VectorXd values_ = Eigen::VectorXd::Zero(1);
  AffineFrame frame_ = AffineFrame::identity(1);
  bool normalized_ = false;
};

struct MomentMatrix {
  int order = 0;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXd entries;
};

inline double riesz(const TruncatedMomentSequence& y, const Polynomial& g)
{
  if (g.dimension() != y.dimension()) throw std::invalid_argument("riesz: dimension mismatch");
  double s = 0.0;
  for (const auto& [a, c] : g.terms()) s += c * y.at(a);
  return s;
}

inline MomentMatrix localizing_matrix(const TruncatedMomentSequence& y, const Polynomial& g, int r)
{
  if (r < 0) throw std::invalid_argument("localizing_matrix: negative order");
  if (g.dimension() != y.dimension()) throw std::invalid_argument("localizing_matrix: dimension mismatch");
  if (2 * r + g.degree() > y.degree())
    throw std::out_of_range("localizing_matrix: order " + std::to_string(r) + " needs degree " +
                            std::to_string(2 * r + g.degree()) + ", sequence has " + std::to_string(y.degree()));
  MomentMatrix m;
  m.order = r;
  m.basis = enumerate_indices(y.dimension(), r);
  const auto s = static_cast<Eigen::Index>(m.basis.size());
  m.entries.resize(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = i; j < s; ++j) {
      const MultiIndex ab = m.basis[i] + m.basis[j];
      double v = 0.0;
      for (const auto& [c, gc] : g.terms()) v += gc * y.at(ab + c);
      m.entries(i, j) = v;
      m.entries(j, i) = v;
    }
  return m;
}

inline MomentMatrix moment_matrix(const TruncatedMomentSequence& y, int r)
{
  return localizing_matrix(y, Polynomial::constant(y.dimension(), 1.0), r);
}

// alpha-th moment vector of phi(x) = (x^alpha)_{|alpha| <= d}
inline Eigen::VectorXd monomial_vector(std::span<const double> x, const std::vector<MultiIndex>& basis)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double t = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int e = 0; e < basis[k][i]; ++e) t *= x[i];
    v(static_cast<Eigen::Index>(k)) = t;
  }
  return v;
}

// 1-D measures on an interval for ClosedForm descriptors
struct Measure1D {
  enum class Kind { Uniform, Dirac, Power };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;
  int k = 0;  // Power: density proportional to (x - a)^k on [a, b]

  static Measure1D uniform(double a, double b) { return {Kind::Uniform, a, b, 0}; }
  static Measure1D dirac(double a) { return {Kind::Dirac, a, a, 0}; }
  static Measure1D power(double a, double b, int k) { return {Kind::Power, a, b, k}; }
};

struct Empirical {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;  // empty means uniform
};

struct UniformMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> active;  // row-major, row 0 at the top of the image
  double origin_x = 0.0;             // lower-left corner of the grid
  double origin_y = 0.0;
  double cell_w = 1.0;
  double cell_h = 1.0;

  bool at(std::size_t i, std::size_t j) const { return active[i * cols + j] != 0; }
  std::size_t count() const
  {
    std::size_t c = 0;
    for (auto v : active) c += v != 0;
    return c;
  }
  // lower-left corner of cell (i, j)
  std::pair<double, double> corner(std::size_t i, std::size_t j) const
  {
    return {origin_x + cell_w * static_cast<double>(j), origin_y + cell_h * static_cast<double>(rows - 1 - i)};
  }
};

struct ClosedForm {
  std::vector<Measure1D> factors;
};

using MeasureDescriptor = std::variant<Empirical, UniformMask, ClosedForm>;

// Gauss-Legendre nodes and weights on [-1, 1]
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int k)
{
  if (k < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(k), w(k);
  for (int i = 0; i < k; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

namespace detail {

// moments of a 1-D measure in the coordinate t = (x - o) / s, up to degree d
inline std::vector<double> moments_1d(const Measure1D& m, double o, double s, int d)
{
  std::vector<double> out(d + 1, 0.0);
  if (m.kind == Measure1D::Kind::Dirac) {
    const double t = (m.a - o) / s;
    double p = 1.0;
    for (int k = 0; k <= d; ++k, p *= t) out[k] = p;
    return out;
  }
  if (!(m.a < m.b)) throw std::invalid_argument("closed-form measure: empty interval");
  const int kk = m.kind == Measure1D::Kind::Power ? m.k : 0;
  if (kk < 0) throw std::invalid_argument("closed-form measure: negative power");
  // exact Gauss-Legendre for integrand of degree kk + d on [a, b]
  auto [x, w] = gauss_legendre((kk + d) / 2 + 1);
  const double half = 0.5 * (m.b - m.a), mid = 0.5 * (m.a + m.b);
  double norm = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    const double xv = mid + half * x[q];
    const double dens = std::pow(xv - m.a, kk);
    const double t = (xv - o) / s;
    norm += w[q] * dens;
    double p = w[q] * dens;
    for (int k = 0; k <= d; ++k, p *= t) out[k] += p;
  }
  for (auto& v : out) v /= norm;
  return out;
}

}  // namespace detail

// moments of the descriptor in the normalized coordinates of set, up to total degree `degree`
inline TruncatedMomentSequence descriptor_moments(const MeasureDescriptor& d, const SemialgebraicSet& set, int degree,
                                                  double support_tol = 1e-9)
{
  if (degree < 0) throw std::invalid_argument("descriptor_moments: negative degree");
  const std::size_t n = set.dimension();
  const AffineFrame& f = set.frame();
  const auto basis = enumerate_indices(n, degree);
  TruncatedMomentSequence y(n, degree, f);
  Eigen::VectorXd& v = y.values();

  if (const auto* e = std::get_if<Empirical>(&d)) {
    if (e->points.empty()) throw std::invalid_argument("descriptor_moments: empty empirical support");
    std::vector<double> w = e->weights;
    if (w.empty()) w.assign(e->points.size(), 1.0 / static_cast<double>(e->points.size()));
    if (w.size() != e->points.size()) throw std::invalid_argument("descriptor_moments: weight count mismatch");
    double tot = 0.0;
    for (double wi : w) {
      if (!(wi >= 0.0)) throw std::invalid_argument("descriptor_moments: negative weight");
      tot += wi;
    }
    if (std::abs(tot - 1.0) > 1e-12) throw std::invalid_argument("descriptor_moments: weights must sum to 1");
    // accumulate in a canonical point order so the result does not depend on input order
    std::vector<std::size_t> order(e->points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (e->points[a] != e->points[b]) return e->points[a] < e->points[b];
      return w[a] < w[b];
    });
    for (std::size_t k : order) {
      const auto& p = e->points[k];
      if (p.size() != n) throw std::invalid_argument("descriptor_moments: point dimension mismatch");
      auto z = f.to_normalized(p);
      if (!set.contains(z, support_tol)) throw std::invalid_argument("descriptor_moments: point outside the support set");
      v += w[k] * monomial_vector(z, basis);
    }
  } else if (const auto* m = std::get_if<UniformMask>(&d)) {
    if (n != 2) throw std::invalid_argument("descriptor_moments: masks are 2-D");
    if (m->active.size() != m->rows * m->cols) throw std::invalid_argument("descriptor_moments: mask size");
    const std::size_t cnt = m->count();
    if (cnt == 0) throw std::invalid_argument("descriptor_moments: mask has no active cell");
    auto [x, w] = gauss_legendre(degree / 2 + 1);
    const double wc = 1.0 / static_cast<double>(cnt);
    for (std::size_t i = 0; i < m->rows; ++i)
      for (std::size_t j = 0; j < m->cols; ++j) {
        if (!m->at(i, j)) continue;
        auto [x0, y0] = m->corner(i, j);
        for (double cx : {x0, x0 + m->cell_w})
          for (double cy : {y0, y0 + m->cell_h}) {
            std::vector<double> c = f.to_normalized(std::vector<double>{cx, cy});
            if (!set.contains(c, support_tol))
              throw std::invalid_argument("descriptor_moments: mask cell outside the support set");
          }
        for (std::size_t a = 0; a < x.size(); ++a)
          for (std::size_t b = 0; b < x.size(); ++b) {
            std::vector<double> p{x0 + 0.5 * m->cell_w * (x[a] + 1.0), y0 + 0.5 * m->cell_h * (x[b] + 1.0)};
            v += (wc * 0.25 * w[a] * w[b]) * monomial_vector(f.to_normalized(p), basis);
          }
      }
  } else {
    const auto& c = std::get<ClosedForm>(d);
    if (c.factors.size() != n) throw std::invalid_argument("descriptor_moments: closed form needs one factor per coordinate");
    std::vector<std::vector<double>> m1;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& fi = c.factors[i];
      m1.push_back(detail::moments_1d(fi, f.offset[i], f.scale[i], degree));
    }
    // corners of the product support must lie in the set
    std::vector<double> corner(n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) corner[i] = (mask >> i) & 1 ? c.factors[i].b : c.factors[i].a;
      if (!set.contains(f.to_normalized(corner), support_tol))
        throw std::invalid_argument("descriptor_moments: closed-form support outside the set");
    }
    for (std::size_t k = 0; k < basis.size(); ++k) {
      double t = 1.0;
      for (std::size_t i = 0; i < n; ++i) t *= m1[i][basis[k][i]];
      v(static_cast<Eigen::Index>(k)) = t;
    }
  }
  if (std::abs(v(0) - 1.0) <= 1e-12) v(0) = 1.0;
  y.mark_normalized();
  return y;
}

inline MultiIndex embed_marginal_index(const MultiIndex& beta, std::size_t factor, const ProductStructure& ps)
{
  if (factor >= ps.factors()) throw std::invalid_argument("embed_marginal_index: factor out of range");
  if (beta.size() != ps.factor_dimensions[factor])
    throw std::invalid_argument("embed_marginal_index: index does not match the factor dimension");
  return beta.embed(ps.dimension(), ps.offset(factor));
}

// moments of the image of y under z' = offset + scale .* z (coordinatewise affine map)
inline TruncatedMomentSequence pushforward_affine(const TruncatedMomentSequence& y, const AffineFrame& map,
                                                  AffineFrame new_frame = {})
{
  const std::size_t n = y.dimension();
  if (map.dimension() != n) throw std::invalid_argument("pushforward_affine: dimension mismatch");
  TruncatedMomentSequence out(n, y.degree(), std::move(new_frame));
  const auto basis = enumerate_indices(n, y.degree());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Polynomial q = Polynomial::monomial(basis[k]).compose_affine(map.offset, map.scale);
    out.values()(static_cast<Eigen::Index>(k)) = riesz(y, q);
  }
  return out;
}

// same measure expressed in the frame `target`
inline TruncatedMomentSequence reframe(const TruncatedMomentSequence& y, const AffineFrame& target)
{
  if (y.frame() == target) return y;
  // z_target = (o_y + s_y z - o_t) / s_t
  TruncatedMomentSequence out = pushforward_affine(y, y.frame().relative_to(target), target);
  if (y.normalized()) {
    out.values()(0) = 1.0;
    out.mark_normalized();
  }
  return out;
}

// moments in original coordinates
inline TruncatedMomentSequence to_original(const TruncatedMomentSequence& y)
{
  return reframe(y, AffineFrame::identity(y.dimension()));
}

// (y tensor z)[(a, b)] = y[a] z[b] for |a| + |b| <= degree
inline TruncatedMomentSequence tensor_product(const TruncatedMomentSequence& y, const TruncatedMomentSequence& z,
                                              int degree)
{
  const std::size_t n = y.dimension() + z.dimension();
  TruncatedMomentSequence out(n, degree, AffineFrame::concat({y.frame(), z.frame()}));
  const auto basis = enumerate_indices(n, degree);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    MultiIndex a = basis[k].slice(0, y.dimension()), b = basis[k].slice(y.dimension(), z.dimension());
    out.values()(static_cast<Eigen::Index>(k)) = y.at(a) * z.at(b);
  }
  return out;
}

}  // namespace momentot
