#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace momentot {

// binomial coefficient C(n, k), exact for the sizes used here
inline std::size_t binomial(std::size_t n, std::size_t k)
{
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// number of monomials of degree <= r in n variables
inline std::size_t basis_size(std::size_t n, int r)
{
  if (r < 0) return 0;
  return binomial(n + static_cast<std::size_t>(r), static_cast<std::size_t>(r));
}

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : exps_(n, 0) {}
  MultiIndex(std::initializer_list<int> e) : MultiIndex(std::vector<int>(e)) {}
  explicit MultiIndex(std::vector<int> e) : exps_(std::move(e))
  {
    for (int v : exps_)
      if (v < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
  }

  static MultiIndex unit(std::size_t n, std::size_t i, int k = 1)
  {
    std::vector<int> e(n, 0);
    e.at(i) = k;
    return MultiIndex(std::move(e));
  }

  std::size_t size() const { return exps_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }
  bool is_zero() const { return degree_ == 0; }

  MultiIndex operator+(const MultiIndex& o) const
  {
    if (o.size() != size()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    std::vector<int> e(exps_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.exps_[i];
    return MultiIndex(std::move(e));
  }

  // sub-block [from, from+len)
  MultiIndex slice(std::size_t from, std::size_t len) const
  {
    if (from + len > size()) throw std::out_of_range("MultiIndex: slice");
    return MultiIndex(std::vector<int>(exps_.begin() + from, exps_.begin() + from + len));
  }

  // place this index at offset inside a zero index of dimension n
  MultiIndex embed(std::size_t n, std::size_t offset) const
  {
    if (offset + size() > n) throw std::out_of_range("MultiIndex: embed");
    std::vector<int> e(n, 0);
    std::copy(exps_.begin(), exps_.end(), e.begin() + offset);
    return MultiIndex(std::move(e));
  }

  static MultiIndex concat(const MultiIndex& a, const MultiIndex& b)
  {
    std::vector<int> e(a.exps_);
    e.insert(e.end(), b.exps_.begin(), b.exps_.end());
    return MultiIndex(std::move(e));
  }

  bool operator==(const MultiIndex& o) const { return exps_ == o.exps_; }

  // graded lexicographic: lower degree first, then larger leading exponent first
  bool operator<(const MultiIndex& o) const
  {
    if (size() != o.size()) return size() < o.size();
    if (degree_ != o.degree_) return degree_ < o.degree_;
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] != o.exps_[i]) return exps_[i] > o.exps_[i];
    return false;
  }

  std::string to_string() const
  {
    std::string s = "(";
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(exps_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

// position of alpha in enumerate_indices(n, r) for any r >= |alpha|
inline std::size_t grlex_rank(const MultiIndex& a)
{
  const std::size_t n = a.size();
  int d = a.degree();
  std::size_t pos = basis_size(n, d - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // indices of degree d in the remaining n-i variables with a larger leading exponent
    const std::size_t m = n - i - 1;
    pos += basis_size(m, d - a[i] - 1);
    d -= a[i];
  }
  return pos;
}

// all alpha in N^n with |alpha| <= r, graded lexicographic order
inline std::vector<MultiIndex> enumerate_indices(std::size_t n, int r)
{
  if (n == 0) throw std::invalid_argument("enumerate_indices: n must be >= 1");
  if (r < 0) throw std::invalid_argument("enumerate_indices: r must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(basis_size(n, r));
  std::vector<int> e(n, 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == n) {
      e[i] = left;
      out.emplace_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[i] = k;
      self(self, i + 1, left - k);
    }
  };
  for (int d = 0; d <= r; ++d) rec(rec, 0, d);
  return out;
}

class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double>;

  explicit Polynomial(std::size_t n = 1) : n_(n) {}

  static Polynomial constant(std::size_t n, double c)
  {
    Polynomial p(n);
    p.add_term(MultiIndex(n), c);
    return p;
  }
  static Polynomial variable(std::size_t n, std::size_t i)
  {
    Polynomial p(n);
    p.add_term(MultiIndex::unit(n, i), 1.0);
    return p;
  }
  static Polynomial monomial(const MultiIndex& a, double c = 1.0)
  {
    Polynomial p(a.size());
    p.add_term(a, c);
    return p;
  }

  std::size_t dimension() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree() const
  {
    int d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }

  double coefficient(const MultiIndex& a) const
  {
    auto it = terms_.find(a);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const MultiIndex& a, double c)
  {
    if (a.size() != n_) throw std::invalid_argument("Polynomial: term dimension mismatch");
    if (c == 0.0) return;
    auto [it, fresh] = terms_.emplace(a, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double evaluate(std::span<const double> x) const
  {
    if (x.size() != n_) throw std::invalid_argument("Polynomial: point dimension mismatch");
    double s = 0.0;
    for (const auto& [a, c] : terms_) {
      double t = c;
      for (std::size_t i = 0; i < n_; ++i)
        for (int k = 0; k < a[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }
  double evaluate(std::initializer_list<double> x) const
  {
    return evaluate(std::span<const double>(x.begin(), x.size()));
  }

  Polynomial operator+(const Polynomial& o) const
  {
    check_dim(o);
    Polynomial r(*this);
    for (const auto& [a, c] : o.terms_) r.add_term(a, c);
    return r;
  }
  Polynomial operator-(const Polynomial& o) const
  {
    check_dim(o);
    Polynomial r(*this);
    for (const auto& [a, c] : o.terms_) r.add_term(a, -c);
    return r;
  }
  Polynomial operator-() const { return (*this) * -1.0; }
  Polynomial operator*(const Polynomial& o) const
  {
    check_dim(o);
    Polynomial r(n_);
    for (const auto& [a, c] : terms_)
      for (const auto& [b, d] : o.terms_) r.add_term(a + b, c * d);
    return r;
  }
  Polynomial operator*(double s) const
  {
    Polynomial r(n_);
    if (s == 0.0) return r;
    for (const auto& [a, c] : terms_) r.add_term(a, c * s);
    return r;
  }
  friend Polynomial operator*(double s, const Polynomial& p) { return p * s; }
  Polynomial operator+(double s) const { return *this + constant(n_, s); }
  Polynomial operator-(double s) const { return *this - constant(n_, s); }

  Polynomial pow(int k) const
  {
    if (k < 0) throw std::invalid_argument("Polynomial: negative power");
    Polynomial r = constant(n_, 1.0), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      k >>= 1;
      if (k) b = b * b;
    }
    return r;
  }

  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

  // q(x) = p(offset + scale .* x)
  Polynomial compose_affine(std::span<const double> offset, std::span<const double> scale) const
  {
    if (offset.size() != n_ || scale.size() != n_)
      throw std::invalid_argument("Polynomial: affine map dimension mismatch");
    std::vector<Polynomial> sub;
    for (std::size_t i = 0; i < n_; ++i)
      sub.push_back(variable(n_, i) * scale[i] + offset[i]);
    return substitute(sub);
  }

  // replace x_i by sub[i]; all sub[i] share one dimension
  Polynomial substitute(const std::vector<Polynomial>& sub) const
  {
    if (sub.size() != n_) throw std::invalid_argument("Polynomial: substitution size mismatch");
    const std::size_t m = sub.empty() ? 1 : sub[0].dimension();
    std::vector<std::vector<Polynomial>> powers(n_);
    Polynomial r(m);
    for (const auto& [a, c] : terms_) {
      Polynomial t = constant(m, c);
      for (std::size_t i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(constant(m, 1.0));
        while (static_cast<int>(pw.size()) <= a[i]) pw.push_back(pw.back() * sub[i]);
        t = t * pw[a[i]];
      }
      r = r + t;
    }
    return r;
  }

  // same polynomial in n_total variables, own variables placed at offset
  Polynomial lift(std::size_t n_total, std::size_t offset) const
  {
    Polynomial r(n_total);
    for (const auto& [a, c] : terms_) r.add_term(a.embed(n_total, offset), c);
    return r;
  }

  // lift with an explicit position for every variable
  Polynomial lift(std::size_t n_total, const std::vector<std::size_t>& positions) const
  {
    if (positions.size() != n_) throw std::invalid_argument("Polynomial: lift positions");
    Polynomial r(n_total);
    for (const auto& [a, c] : terms_) {
      std::vector<int> e(n_total, 0);
      for (std::size_t i = 0; i < n_; ++i) e.at(positions[i]) += a[i];
      r.add_term(MultiIndex(std::move(e)), c);
    }
    return r;
  }

  // fix variables [from, from+values.size()) to values; result keeps the others
  Polynomial partial_evaluate(std::size_t from, std::span<const double> values) const
  {
    const std::size_t len = values.size();
    if (from + len > n_) throw std::out_of_range("Polynomial: partial_evaluate");
    Polynomial r(n_ - len);
    for (const auto& [a, c] : terms_) {
      double t = c;
      std::vector<int> e;
      for (std::size_t i = 0; i < n_; ++i) {
        if (i >= from && i < from + len)
          t *= std::pow(values[i - from], a[i]);
        else
          e.push_back(a[i]);
      }
      r.add_term(MultiIndex(std::move(e)), t);
    }
    return r;
  }

  // "c * x1^a1*x2^a2 + ..." with 17 significant digits
  std::string to_string() const
  {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [a, c] : terms_) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(c));
      if (first)
        s += c < 0 ? "-" : "";
      else
        s += c < 0 ? " - " : " + ";
      first = false;
      s += buf;
      bool firstvar = true;
      for (std::size_t i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        s += firstvar ? " * " : "*";
        firstvar = false;
        s += "x" + std::to_string(i + 1);
        if (a[i] != 1) s += "^" + std::to_string(a[i]);
      }
    }
    return s;
  }

  static Polynomial parse(const std::string& text, std::size_t n);

 private:
  void check_dim(const Polynomial& o) const
  {
    if (o.n_ != n_) throw std::invalid_argument("Polynomial: dimension mismatch");
  }

  std::size_t n_;
  Terms terms_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(const std::string& s, std::size_t n) : s_(s), n_(n) {}

  Polynomial run()
  {
    Polynomial p(n_);
    skip();
    if (pos_ == s_.size()) fail("empty polynomial");
    bool first = true;
    while (pos_ < s_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      term(p, sign);
      skip();
    }
    return p;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const
  {
    throw std::invalid_argument("Polynomial::parse: " + what + " at position " +
                                std::to_string(pos_) + " in '" + s_ + "'");
  }

  void term(Polynomial& p, double sign)
  {
    double coef = 1.0;
    std::vector<int> e(n_, 0);
    bool any = false;
    for (;;) {
      skip();
      if (peek() == 'x') {
        ++pos_;
        std::size_t idx = integer();
        if (idx < 1 || idx > n_) fail("variable index out of range");
        int k = 1;
        skip();
        if (peek() == '^') {
          ++pos_;
          skip();
          k = static_cast<int>(integer());
        }
        e[idx - 1] += k;
      } else if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
        coef *= number();
      } else {
        fail("expected coefficient or variable");
      }
      any = true;
      skip();
      if (peek() != '*') break;
      ++pos_;
    }
    if (!any) fail("empty term");
    p.add_term(MultiIndex(std::move(e)), sign * coef);
  }

  std::size_t integer()
  {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stoul(s_.substr(start, pos_ - start));
  }

  double number()
  {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  const std::string& s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial Polynomial::parse(const std::string& text, std::size_t n)
{
  return detail::PolyParser(text, n).run();
}

// |base|^p for even p
inline Polynomial expand_abs_power_even(const Polynomial& base, int p)
{
  if (p < 2 || p % 2 != 0)
    throw std::invalid_argument("expand_abs_power_even: p must be even and >= 2");
  return base.pow(p);
}

// x_original = offset + scale .* x_normalized
struct AffineFrame {
  std::vector<double> offset;
  std::vector<double> scale;

  static AffineFrame identity(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)}; }
  std::size_t dimension() const { return offset.size(); }
  bool is_identity() const
  {
    for (std::size_t i = 0; i < offset.size(); ++i)
      if (offset[i] != 0.0 || scale[i] != 1.0) return false;
    return true;
  }

  std::vector<double> to_original(std::span<const double> x) const
  {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = offset[i] + scale[i] * x[i];
    return r;
  }
  std::vector<double> to_normalized(std::span<const double> x) const
  {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = (x[i] - offset[i]) / scale[i];
    return r;
  }

  // frame mapping normalized coordinates of *this to normalized coordinates of other
  AffineFrame relative_to(const AffineFrame& other) const
  {
    AffineFrame f;
    for (std::size_t i = 0; i < offset.size(); ++i) {
      f.offset.push_back((offset[i] - other.offset[i]) / other.scale[i]);
      f.scale.push_back(scale[i] / other.scale[i]);
    }
    return f;
  }

  // inverse map: x_normalized = offset' + scale' .* x_original
  AffineFrame inverse() const
  {
    AffineFrame f;
    for (std::size_t i = 0; i < offset.size(); ++i) {
      f.offset.push_back(-offset[i] / scale[i]);
      f.scale.push_back(1.0 / scale[i]);
    }
    return f;
  }

  static AffineFrame concat(const std::vector<AffineFrame>& fs)
  {
    AffineFrame f;
    for (const auto& g : fs) {
      f.offset.insert(f.offset.end(), g.offset.begin(), g.offset.end());
      f.scale.insert(f.scale.end(), g.scale.begin(), g.scale.end());
    }
    return f;
  }

  bool operator==(const AffineFrame&) const = default;
};

inline Polynomial ball_polynomial(std::size_t n, double radius)
{
  Polynomial g = Polynomial::constant(n, radius * radius);
  for (std::size_t i = 0; i < n; ++i) g.add_term(MultiIndex::unit(n, i, 2), -1.0);
  return g;
}

// {x : g_j(x) >= 0}, with g_1 = R^2 - |x|^2 always first.
// Polynomials act on normalized coordinates; frame() maps them back.
class SemialgebraicSet {
 public:
  SemialgebraicSet(std::size_t n, std::vector<Polynomial> inequalities, double ball_radius,
                   AffineFrame frame = {})
      : n_(n), radius_(ball_radius), frame_(std::move(frame))
  {
    if (n == 0) throw std::invalid_argument("SemialgebraicSet: dimension must be >= 1");
    if (!(ball_radius > 0.0) || !std::isfinite(ball_radius))
      throw std::invalid_argument("SemialgebraicSet: ball radius must be positive");
    if (frame_.offset.empty()) frame_ = AffineFrame::identity(n);
    if (frame_.dimension() != n) throw std::invalid_argument("SemialgebraicSet: frame dimension");
    Polynomial ball = ball_polynomial(n, radius_);
    g_.push_back(ball);
    for (auto& g : inequalities) {
      if (g.dimension() != n) throw std::invalid_argument("SemialgebraicSet: inequality dimension mismatch");
      if (g.degree() < 1) throw std::invalid_argument("SemialgebraicSet: inequality of degree 0");
      if (g == ball) continue;
      g_.push_back(std::move(g));
    }
    center_.assign(n, 0.0);
    bound_ = radius_;
  }

  // lo <= x <= hi, bounded by the ball through the corners farthest from the origin
  static SemialgebraicSet box(const std::vector<double>& lo, const std::vector<double>& hi)
  {
    const std::size_t n = lo.size();
    if (n == 0 || hi.size() != n) throw std::invalid_argument("box: bad bounds");
    std::vector<Polynomial> g;
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo must be < hi");
      g.push_back(Polynomial::variable(n, i) - lo[i]);
      g.push_back(Polynomial::constant(n, hi[i]) - Polynomial::variable(n, i));
      r2 += std::max(lo[i] * lo[i], hi[i] * hi[i]);
    }
    SemialgebraicSet s(n, std::move(g), std::sqrt(r2));
    s.center_.clear();
    r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s.center_.push_back(0.5 * (lo[i] + hi[i]));
      r2 += 0.25 * (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    s.bound_ = std::sqrt(r2);
    return s;
  }

  // |x - center| <= radius
  static SemialgebraicSet ball(const std::vector<double>& center, double radius)
  {
    const std::size_t n = center.size();
    double cn = 0.0;
    for (double c : center) cn += c * c;
    std::vector<Polynomial> g;
    Polynomial q = Polynomial::constant(n, radius * radius);
    for (std::size_t i = 0; i < n; ++i) q = q - (Polynomial::variable(n, i) - center[i]).pow(2);
    bool centered = cn == 0.0;
    if (!centered) g.push_back(q);
    SemialgebraicSet s(n, std::move(g), std::sqrt(cn) + radius);
    s.center_ = center;
    s.bound_ = radius;
    return s;
  }

  std::size_t dimension() const { return n_; }
  double ball_radius() const { return radius_; }
  const std::vector<Polynomial>& inequalities() const { return g_; }
  const AffineFrame& frame() const { return frame_; }
  const std::vector<double>& bounding_center() const { return center_; }
  double bounding_radius() const { return bound_; }

  int max_inequality_degree() const
  {
    int d = 0;
    for (const auto& g : g_) d = std::max(d, g.degree());
    return d;
  }

  // point given in normalized coordinates
  bool contains(std::span<const double> x, double tol = 0.0) const
  {
    for (const auto& g : g_)
      if (g.evaluate(x) < -tol) return false;
    return true;
  }
  bool contains_original(std::span<const double> x, double tol = 0.0) const
  {
    auto z = frame_.to_normalized(x);
    return contains(z, tol);
  }

  // add constraints given in normalized coordinates
  SemialgebraicSet with(const std::vector<Polynomial>& extra) const
  {
    SemialgebraicSet s(*this);
    for (const auto& g : extra) {
      if (g.dimension() != n_) throw std::invalid_argument("SemialgebraicSet::with: dimension mismatch");
      if (g.degree() < 1) throw std::invalid_argument("SemialgebraicSet::with: degree 0");
      s.g_.push_back(g);
    }
    return s;
  }

  // same set rescaled into the unit ball around its bounding center
  SemialgebraicSet normalized() const
  {
    std::vector<double> scale(n_, bound_);
    std::vector<Polynomial> g;
    for (std::size_t j = 1; j < g_.size(); ++j) g.push_back(g_[j].compose_affine(center_, scale));
    AffineFrame f;
    for (std::size_t i = 0; i < n_; ++i) {
      f.offset.push_back(frame_.offset[i] + frame_.scale[i] * center_[i]);
      f.scale.push_back(frame_.scale[i] * bound_);
    }
    return SemialgebraicSet(n_, std::move(g), 1.0, std::move(f));
  }

 private:
  std::size_t n_;
  double radius_;
  AffineFrame frame_;
  std::vector<Polynomial> g_;
  std::vector<double> center_;
  double bound_ = 1.0;
};

struct ProductStructure {
  std::vector<std::size_t> factor_dimensions;
  std::vector<SemialgebraicSet> factor_sets;
  bool per_factor_balls = false;

  std::size_t dimension() const
  {
    return std::accumulate(factor_dimensions.begin(), factor_dimensions.end(), std::size_t{0});
  }
  std::size_t factors() const { return factor_dimensions.size(); }
  std::size_t offset(std::size_t i) const
  {
    if (i >= factor_dimensions.size()) throw std::out_of_range("ProductStructure: factor index");
    std::size_t o = 0;
    for (std::size_t k = 0; k < i; ++k) o += factor_dimensions[k];
    return o;
  }
  // lifted inequality count: all non-ball factor inequalities plus the global ball
  std::size_t lifted_count() const
  {
    std::size_t c = 1;
    for (const auto& s : factor_sets) c += s.inequalities().size() - (per_factor_balls ? 0 : 1);
    return c;
  }
};

// X_1 x ... x X_K with one global ball R^2 = sum R_i^2 (or per-factor balls on request)
inline std::pair<SemialgebraicSet, ProductStructure> product_set(const std::vector<SemialgebraicSet>& factors,
                                                               bool per_factor_balls = false)
{
  if (factors.empty()) throw std::invalid_argument("product_set: need at least one factor");
  ProductStructure ps;
  ps.per_factor_balls = per_factor_balls;
  std::size_t n = 0;
  double r2 = 0.0;
  std::vector<AffineFrame> frames;
  for (const auto& f : factors) {
    ps.factor_dimensions.push_back(f.dimension());
    ps.factor_sets.push_back(f);
    n += f.dimension();
    r2 += f.ball_radius() * f.ball_radius();
    frames.push_back(f.frame());
  }
  if (factors.size() == 1) return {factors[0], ps};
  std::vector<Polynomial> g;
  std::size_t off = 0;
  for (const auto& f : factors) {
    const auto& gi = f.inequalities();
    for (std::size_t j = per_factor_balls ? 0 : 1; j < gi.size(); ++j) g.push_back(gi[j].lift(n, off));
    off += f.dimension();
  }
  SemialgebraicSet s(n, std::move(g), std::sqrt(r2), AffineFrame::concat(frames));
  return {s, ps};
}

}  // namespace momentot
