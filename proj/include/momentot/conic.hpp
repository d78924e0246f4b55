#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace momentot {

// Conic program in linear-matrix-inequality form:
//
//   minimize    c'x + offset
//   subject to  A x = b
//               F_k(x) = C_k + sum_i x_i A_{k,i}  in cone K_k   (PSD or Nonneg)
//
// x is free. The dual is
//
//   maximize    b'l - sum_k C_k . Y_k + offset
//   subject to  A'l + sum_k A_k^*(Y_k) = c,  Y_k in K_k.

enum class ConeKind { PSD, Nonneg };

struct BlockEntry {
  int row = 0;
  int col = 0;  // row <= col; Nonneg blocks use row == col
  double value = 0.0;
  bool operator==(const BlockEntry&) const = default;
};

struct ConeBlock {
  ConeKind kind = ConeKind::PSD;
  int size = 0;
  std::string label;
  std::vector<BlockEntry> constant;
  std::vector<std::pair<int, std::vector<BlockEntry>>> coefficients;  // variable ascending
  bool operator==(const ConeBlock&) const = default;
};

struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;
  bool operator==(const SparseRow&) const = default;
};

struct ConicProgram {
  int num_vars = 0;
  std::vector<double> c;
  double objective_offset = 0.0;
  std::vector<SparseRow> rows;
  std::vector<double> b;
  std::vector<ConeBlock> blocks;
  std::vector<std::string> var_names;

  bool operator==(const ConicProgram&) const = default;

  void validate() const
  {
    if (num_vars < 0 || static_cast<int>(c.size()) != num_vars)
      throw std::invalid_argument("ConicProgram: objective length does not match the variable count");
    if (rows.size() != b.size()) throw std::invalid_argument("ConicProgram: row count does not match rhs");
    for (double v : b)
      if (!std::isfinite(v)) throw std::invalid_argument("ConicProgram: non-finite rhs");
    for (const auto& r : rows) {
      if (r.index.size() != r.value.size()) throw std::invalid_argument("ConicProgram: malformed row");
      for (int j : r.index)
        if (j < 0 || j >= num_vars) throw std::invalid_argument("ConicProgram: row index out of range");
    }
    for (const auto& blk : blocks) {
      if (blk.size <= 0) throw std::invalid_argument("ConicProgram: empty cone block");
      auto check = [&](const std::vector<BlockEntry>& es) {
        for (const auto& e : es) {
          if (e.row < 0 || e.col >= blk.size || e.row > e.col)
            throw std::invalid_argument("ConicProgram: block entry outside the upper triangle");
          if (blk.kind == ConeKind::Nonneg && e.row != e.col)
            throw std::invalid_argument("ConicProgram: off-diagonal entry in a nonnegative block");
          if (!std::isfinite(e.value)) throw std::invalid_argument("ConicProgram: non-finite block entry");
        }
      };
      check(blk.constant);
      int last = -1;
      for (const auto& [j, es] : blk.coefficients) {
        if (j <= last || j >= num_vars) throw std::invalid_argument("ConicProgram: block variable order");
        last = j;
        check(es);
      }
    }
  }

  // F_k(x) as a dense matrix (Nonneg blocks as a diagonal)
  Eigen::MatrixXd block_value(std::size_t k, const Eigen::VectorXd& x) const
  {
    const auto& blk = blocks.at(k);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(blk.size, blk.size);
    auto add = [&](const std::vector<BlockEntry>& es, double s) {
      for (const auto& e : es) {
        F(e.row, e.col) += s * e.value;
        if (e.row != e.col) F(e.col, e.row) += s * e.value;
      }
    };
    add(blk.constant, 1.0);
    for (const auto& [j, es] : blk.coefficients) add(es, x(j));
    return F;
  }
};

enum class SolveStatus { Optimal, NearOptimal, PrimalInfeasible, DualInfeasible, NumericalFailure };

inline const char* to_string(SolveStatus s)
{
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near-optimal";
    case SolveStatus::PrimalInfeasible: return "infeasible";
    case SolveStatus::DualInfeasible: return "unbounded";
    case SolveStatus::NumericalFailure: return "solver-failure";
  }
  return "solver-failure";
}

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool scaling = true;
  int verbosity = 0;
};

struct SolveReport {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;              // relative duality gap
  double primal_residual = 0.0;  // |Ax - b| / max(1, |b|)
  double dual_residual = 0.0;    // |c - A'l - A^*(Y)| / max(1, |c|)
  double cone_violation = 0.0;   // max_k max(0, -lambda_min(F_k(x))) / max(1, |F_k(x)|)
  int iterations = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  std::string message;
};

struct SolveResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;        // l, one per equality row
  std::vector<Eigen::MatrixXd> duals;  // Y_k
  SolveReport report;
};

namespace detail {

struct Coef {
  int var;
  std::vector<BlockEntry> entries;
};

struct WorkBlock {
  ConeKind kind;
  int n;
  Eigen::MatrixXd C;  // dense constant (diagonal stored as a column vector for Nonneg)
  std::vector<Coef> coefs;
  // Nonneg: per position, the (var, value) pairs
  std::vector<std::vector<std::pair<int, double>>> lp_rows;
  double scale = 1.0;
};

inline double inner(const std::vector<BlockEntry>& es, const Eigen::MatrixXd& M)
{
  double s = 0.0;
  for (const auto& e : es) s += e.value * (e.row == e.col ? M(e.row, e.col) : M(e.row, e.col) + M(e.col, e.row));
  return s;
}

inline void accumulate(const std::vector<BlockEntry>& es, double s, Eigen::MatrixXd& M)
{
  for (const auto& e : es) {
    M(e.row, e.col) += s * e.value;
    if (e.row != e.col) M(e.col, e.row) += s * e.value;
  }
}

// largest alpha with X + alpha dX PSD, given the Cholesky factor of X
inline double max_step_psd(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& dX)
{
  const Eigen::MatrixXd& L = llt.matrixL();
  Eigen::MatrixXd M = L.triangularView<Eigen::Lower>().solve(dX);
  M = L.triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

inline double max_step_lp(const Eigen::VectorXd& x, const Eigen::VectorXd& dx)
{
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a)
  {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void join(int a, int b) { p[find(a)] = find(b); }
};

// Cholesky with growing diagonal shift when the matrix is numerically singular
inline Eigen::LLT<Eigen::MatrixXd> robust_llt(Eigen::MatrixXd M)
{
  double diag = M.diagonal().cwiseAbs().maxCoeff();
  if (!(diag > 0.0)) diag = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  double shift = 1e-14 * diag;
  while (llt.info() != Eigen::Success && shift < diag) {
    M.diagonal().array() += shift;
    llt.compute(M);
    shift *= 10.0;
  }
  return llt;
}

// objectives, residuals and cone violation of (x, l, Y) on the original data
inline void fill_report(const ConicProgram& P, SolveResult& res, double tol)
{
  auto& rep = res.report;
  const Eigen::VectorXd& x = res.x;
  const Eigen::Map<const Eigen::VectorXd> c(P.c.data(), P.num_vars), b(P.b.data(), static_cast<Eigen::Index>(P.b.size()));
  rep.primal_objective = c.dot(x) + P.objective_offset;
  Eigen::VectorXd ay = Eigen::VectorXd::Zero(P.num_vars);
  Eigen::VectorXd ax = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P.rows.size()));
  for (std::size_t r = 0; r < P.rows.size(); ++r)
    for (std::size_t t = 0; t < P.rows[r].index.size(); ++t) {
      const int j = P.rows[r].index[t];
      ax(r) += P.rows[r].value[t] * x(j);
      ay(j) += P.rows[r].value[t] * res.multipliers(r);
    }
  double cy = 0.0;
  rep.cone_violation = 0.0;
  for (std::size_t k = 0; k < P.blocks.size(); ++k) {
    const auto& blk = P.blocks[k];
    const Eigen::MatrixXd& Yk = res.duals[k];
    auto pair = [&](const BlockEntry& e) { return e.row == e.col ? Yk(e.row, e.col) : 2.0 * Yk(e.row, e.col); };
    for (const auto& e : blk.constant) cy += e.value * pair(e);
    for (const auto& [j, es] : blk.coefficients)
      for (const auto& e : es) ay(j) += e.value * pair(e);
    Eigen::MatrixXd F = P.block_value(k, x);
    const double lmin =
        blk.kind == ConeKind::PSD
            ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(F, Eigen::EigenvaluesOnly).eigenvalues()(0)
            : F.diagonal().minCoeff();
    rep.cone_violation = std::max(rep.cone_violation, std::max(0.0, -lmin) / std::max(1.0, F.norm()));
  }
  rep.dual_objective = b.dot(res.multipliers) - cy + P.objective_offset;
  rep.gap = std::abs(rep.primal_objective - rep.dual_objective) /
            (1.0 + std::abs(rep.primal_objective) + std::abs(rep.dual_objective));
  rep.primal_residual = P.rows.empty() ? 0.0 : (ax - b).norm() / std::max(1.0, b.norm());
  rep.dual_residual = P.num_vars ? (c - ay).norm() / std::max(1.0, c.norm()) : 0.0;
  if (rep.status == SolveStatus::Optimal) {
    // scaled convergence did not carry over to the original data
    if (rep.primal_residual > 10 * tol || rep.dual_residual > 10 * tol || rep.gap > 10 * tol ||
        rep.cone_violation > 10 * tol)
      rep.status = SolveStatus::NearOptimal;
  }
}

class InteriorPoint {
 public:
  InteriorPoint(const ConicProgram& prog, const SolverOptions& opt) : P_(prog), opt_(opt) {}

  SolveResult run()
  {
    P_.validate();
    setup();
    SolveResult res;
    if (inconsistent_) {
      res.x = Eigen::VectorXd::Zero(P_.num_vars);
      res.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P_.rows.size()));
      res.report.status = SolveStatus::PrimalInfeasible;
      res.report.message = "equality constraints are inconsistent";
      return res;
    }
    iterate(res.report);
    finish(res);
    fill_report(P_, res, opt_.tol);
    return res;
  }

 private:
  // ---------- setup ----------
  void setup()
  {
    m_ = P_.num_vars;
    colscale_ = Eigen::VectorXd::Ones(m_);
    const int p0 = static_cast<int>(P_.rows.size());
    rowscale_ = Eigen::VectorXd::Ones(p0);
    blocks_.clear();
    for (const auto& blk : P_.blocks) {
      WorkBlock w;
      w.kind = blk.kind;
      w.n = blk.size;
      for (const auto& [j, es] : blk.coefficients)
        if (!es.empty()) w.coefs.push_back({j, es});
      if (w.kind == ConeKind::PSD) {
        w.C = Eigen::MatrixXd::Zero(w.n, w.n);
        accumulate(blk.constant, 1.0, w.C);
      } else {
        w.C = Eigen::MatrixXd::Zero(w.n, 1);
        for (const auto& e : blk.constant) w.C(e.row, 0) += e.value;
      }
      blocks_.push_back(std::move(w));
    }
    A0_ = Eigen::MatrixXd::Zero(p0, m_);
    for (int r = 0; r < p0; ++r)
      for (std::size_t k = 0; k < P_.rows[r].index.size(); ++k) A0_(r, P_.rows[r].index[k]) += P_.rows[r].value[k];
    b0_ = Eigen::Map<const Eigen::VectorXd>(P_.b.data(), p0);
    c0_ = Eigen::Map<const Eigen::VectorXd>(P_.c.data(), m_);

    if (opt_.scaling) equilibrate();
    objscale_ = 1.0;
    {
      Eigen::VectorXd cs = c0_.cwiseProduct(colscale_);
      const double cn = cs.cwiseAbs().maxCoeff();
      if (m_ > 0 && cn > 0.0 && opt_.scaling) objscale_ = 1.0 / cn;
    }
    // scaled data
    A_ = rowscale_.asDiagonal() * A0_ * colscale_.asDiagonal();
    b_ = rowscale_.cwiseProduct(b0_);
    c_ = objscale_ * c0_.cwiseProduct(colscale_);
    for (auto& w : blocks_) {
      w.C *= w.scale;
      for (auto& cf : w.coefs)
        for (auto& e : cf.entries) e.value *= w.scale * colscale_(cf.var);
      if (w.kind == ConeKind::Nonneg) {
        w.lp_rows.assign(w.n, {});
        for (const auto& cf : w.coefs)
          for (const auto& e : cf.entries) w.lp_rows[e.row].push_back({cf.var, e.value});
      }
    }
    remove_dependent_rows();
    components();
    gram();
  }

  // Gram matrix of the block operator, used to restore dual feasibility of search directions
  void gram()
  {
    Gllt_.assign(comps_.size(), {});
    std::vector<Eigen::MatrixXd> G(comps_.size());
    for (std::size_t q = 0; q < comps_.size(); ++q) G[q] = Eigen::MatrixXd::Zero(comps_[q].size(), comps_[q].size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& w = blocks_[k];
      if (w.coefs.empty()) continue;
      Eigen::MatrixXd& Gq = G[block_comp_[k]];
      for (const auto& cj : w.coefs) {
        Eigen::MatrixXd Aj = apply_one(w, cj);
        for (const auto& ci : w.coefs) {
          double v = 0.0;
          if (w.kind == ConeKind::PSD)
            v = inner(ci.entries, Aj);
          else
            for (const auto& e : ci.entries) v += e.value * Aj(e.row, 0);
          Gq(local_[ci.var], local_[cj.var]) += v;
        }
      }
    }
    for (std::size_t q = 0; q < comps_.size(); ++q) Gllt_[q] = robust_llt(sym(G[q]));
  }

  Eigen::MatrixXd apply_one(const WorkBlock& w, const Coef& c) const
  {
    if (w.kind == ConeKind::PSD) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(w.n, w.n);
      accumulate(c.entries, 1.0, M);
      return M;
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(w.n, 1);
    for (const auto& e : c.entries) v(e.row, 0) += e.value;
    return v;
  }

  // dY += A(z) with A^*(A(z)) = e
  void restore_dual(const Eigen::VectorXd& e, std::vector<Eigen::MatrixXd>& dY) const
  {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m_);
    for (std::size_t q = 0; q < comps_.size(); ++q) {
      const auto& vars = comps_[q];
      if (Gllt_[q].info() != Eigen::Success) continue;
      Eigen::VectorXd sub(vars.size());
      for (std::size_t i = 0; i < vars.size(); ++i) sub(i) = e(vars[i]);
      sub = Gllt_[q].solve(sub);
      for (std::size_t i = 0; i < vars.size(); ++i) z(vars[i]) = sub(i);
    }
    for (std::size_t k = 0; k < blocks_.size(); ++k) dY[k] += apply(blocks_[k], z);
  }

  void equilibrate()
  {
    const int p0 = static_cast<int>(A0_.rows());
    for (int it = 0; it < 12; ++it) {
      Eigen::VectorXd colmax = Eigen::VectorXd::Zero(m_);
      for (int r = 0; r < p0; ++r)
        for (int j = 0; j < m_; ++j)
          colmax(j) = std::max(colmax(j), std::abs(A0_(r, j)) * rowscale_(r) * colscale_(j));
      for (auto& w : blocks_)
        for (const auto& cf : w.coefs)
          for (const auto& e : cf.entries)
            colmax(cf.var) = std::max(colmax(cf.var), std::abs(e.value) * w.scale * colscale_(cf.var));
      for (int j = 0; j < m_; ++j)
        if (colmax(j) > 0.0) colscale_(j) /= std::sqrt(colmax(j));
      for (int r = 0; r < p0; ++r) {
        double mx = 0.0;
        for (int j = 0; j < m_; ++j) mx = std::max(mx, std::abs(A0_(r, j)) * rowscale_(r) * colscale_(j));
        if (mx > 0.0) rowscale_(r) /= std::sqrt(mx);
      }
      for (auto& w : blocks_) {
        double mx = 0.0;
        for (const auto& cf : w.coefs)
          for (const auto& e : cf.entries) mx = std::max(mx, std::abs(e.value) * w.scale * colscale_(cf.var));
        if (mx > 0.0) w.scale /= std::sqrt(mx);
      }
    }
  }

  void remove_dependent_rows()
  {
    const int p0 = static_cast<int>(A_.rows());
    keep_.clear();
    if (p0 == 0) {
      p_ = 0;
      return;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A_.transpose());
    const Eigen::MatrixXd R = qr.matrixR().triangularView<Eigen::Upper>();
    const double rmax = R.diagonal().cwiseAbs().maxCoeff();
    int rank = 0;
    for (int i = 0; i < std::min<int>(R.rows(), R.cols()); ++i)
      if (std::abs(R(i, i)) > 1e-10 * std::max(1.0, rmax)) ++rank;
    for (int i = 0; i < rank; ++i) keep_.push_back(qr.colsPermutation().indices()(i));
    std::sort(keep_.begin(), keep_.end());
    p_ = rank;
    Eigen::MatrixXd Ak(p_, m_);
    Eigen::VectorXd bk(p_);
    for (int i = 0; i < p_; ++i) {
      Ak.row(i) = A_.row(keep_[i]);
      bk(i) = b_(keep_[i]);
    }
    if (rank < p0) {
      // dropped rows must be combinations of kept rows with matching rhs
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qk(Ak.transpose());
      const double bn = std::max(1.0, b_.cwiseAbs().maxCoeff());
      std::vector<char> kept(p0, 0);
      for (int k : keep_) kept[k] = 1;
      for (int r = 0; r < p0; ++r) {
        if (kept[r]) continue;
        Eigen::VectorXd w = qk.solve(A_.row(r).transpose());
        if (std::abs(w.dot(bk) - b_(r)) > 1e-8 * bn) inconsistent_ = true;
      }
    }
    A_ = std::move(Ak);
    b_ = std::move(bk);
  }

  void components()
  {
    UnionFind uf(m_);
    for (const auto& w : blocks_)
      for (std::size_t k = 1; k < w.coefs.size(); ++k) uf.join(w.coefs[k].var, w.coefs[0].var);
    comp_of_.assign(m_, -1);
    local_.assign(m_, -1);
    comps_.clear();
    std::vector<int> root_id(m_, -1);
    for (int j = 0; j < m_; ++j) {
      const int r = uf.find(j);
      if (root_id[r] < 0) {
        root_id[r] = static_cast<int>(comps_.size());
        comps_.emplace_back();
      }
      comp_of_[j] = root_id[r];
      local_[j] = static_cast<int>(comps_[root_id[r]].size());
      comps_[root_id[r]].push_back(j);
    }
    block_comp_.clear();
    for (const auto& w : blocks_) block_comp_.push_back(w.coefs.empty() ? -1 : comp_of_[w.coefs[0].var]);
  }

  // ---------- linear algebra helpers ----------
  Eigen::MatrixXd apply(const WorkBlock& w, const Eigen::VectorXd& x) const
  {
    if (w.kind == ConeKind::PSD) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(w.n, w.n);
      for (const auto& cf : w.coefs) accumulate(cf.entries, x(cf.var), M);
      return M;
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(w.n, 1);
    for (const auto& cf : w.coefs)
      for (const auto& e : cf.entries) v(e.row, 0) += x(cf.var) * e.value;
    return v;
  }

  void adjoint_add(const WorkBlock& w, const Eigen::MatrixXd& Y, Eigen::VectorXd& out) const
  {
    if (w.kind == ConeKind::PSD) {
      for (const auto& cf : w.coefs) out(cf.var) += inner(cf.entries, Y);
    } else {
      for (const auto& cf : w.coefs)
        for (const auto& e : cf.entries) out(cf.var) += e.value * Y(e.row, 0);
    }
  }

  static double dot(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) { return (X.array() * Y.array()).sum(); }

  // ---------- main loop ----------
  struct State {
    Eigen::VectorXd x, l;
    std::vector<Eigen::MatrixXd> S, Y;
  };

  void iterate(SolveReport& rep)
  {
    const int nb = static_cast<int>(blocks_.size());
    st_.x = Eigen::VectorXd::Zero(m_);
    st_.l = Eigen::VectorXd::Zero(p_);
    st_.S.resize(nb);
    st_.Y.resize(nb);
    double nu = 0.0;
    for (int k = 0; k < nb; ++k) {
      const auto& w = blocks_[k];
      const double xi = std::max(10.0, std::sqrt(static_cast<double>(w.n)));
      if (w.kind == ConeKind::PSD) {
        st_.S[k] = xi * Eigen::MatrixXd::Identity(w.n, w.n);
        st_.Y[k] = xi * Eigen::MatrixXd::Identity(w.n, w.n);
      } else {
        st_.S[k] = Eigen::MatrixXd::Constant(w.n, 1, xi);
        st_.Y[k] = Eigen::MatrixXd::Constant(w.n, 1, xi);
      }
      nu += w.n;
    }
    const double bnorm = 1.0 + b_.norm(), cnorm = 1.0 + c_.norm();
    int stall = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    State best = st_;
    int it = 0;
    for (; it < opt_.max_iter; ++it) {
      // residuals
      std::vector<Eigen::MatrixXd> R(nb);
      double rpn2 = p_ > 0 ? (b_ - A_ * st_.x).squaredNorm() : 0.0;
      Eigen::VectorXd ay = Eigen::VectorXd::Zero(m_);
      double mu = 0.0, cY = 0.0;
      for (int k = 0; k < nb; ++k) {
        R[k] = blocks_[k].C + apply(blocks_[k], st_.x) - st_.S[k];
        rpn2 += R[k].squaredNorm();
        adjoint_add(blocks_[k], st_.Y[k], ay);
        mu += dot(st_.S[k], st_.Y[k]);
      }
      // rd = c - A'l - A^*(Y)
      const Eigen::VectorXd rd = c_ - A_.transpose() * st_.l - ay;
      for (int k = 0; k < nb; ++k) cY += dot(blocks_[k].C, st_.Y[k]);
      mu /= std::max(1.0, nu);
      const double pobj = c_.dot(st_.x);
      const double dobj = b_.dot(st_.l) - cY;
      const double relp = std::sqrt(rpn2) / bnorm;
      const double reld = rd.norm() / cnorm;
      const double relg = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (opt_.verbosity > 0)
        std::fprintf(stderr, "%3d  pobj % .10e  dobj % .10e  p %.2e  d %.2e  g %.2e  mu %.2e\n", it, pobj, dobj, relp,
                     reld, relg, mu);
      const double merit = std::max({relp, reld, relg});
      if (merit < best_merit) {
        best_merit = merit;
        best = st_;
      }
      if (relp <= opt_.tol && reld <= opt_.tol && relg <= opt_.tol) {
        rep.status = SolveStatus::Optimal;
        rep.iterations = it;
        return;
      }
      // normalized infeasibility certificates
      {
        const double t = b_.dot(st_.l) - cY;
        if (t > 0.0) {
          const double ratio = (A_.transpose() * st_.l + ay).norm() / t;
          if (ratio < opt_.tol && t > 1e6) {
            rep.status = SolveStatus::PrimalInfeasible;
            rep.iterations = it;
            rep.message = "dual ray found";
            return;
          }
        }
        const double tc = -c_.dot(st_.x);
        if (tc > 1e6) {
          double viol = (A_ * st_.x).norm();
          for (int k = 0; k < nb; ++k) {
            Eigen::MatrixXd Ax = apply(blocks_[k], st_.x);
            double lmin = blocks_[k].kind == ConeKind::PSD
                              ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Ax, Eigen::EigenvaluesOnly).eigenvalues()(0)
                              : Ax.minCoeff();
            viol = std::max(viol, -lmin);
          }
          if (viol / tc < opt_.tol) {
            rep.status = SolveStatus::DualInfeasible;
            rep.iterations = it;
            rep.message = "primal ray found";
            return;
          }
        }
      }

      if (!step(R, rd, mu)) {
        rep.message = "step computation failed";
        break;
      }
      if (last_alpha_ < 1e-8) {
        if (++stall >= 5) {
          rep.message = "stalled";
          break;
        }
      } else {
        stall = 0;
      }
    }
    st_ = best;
    rep.iterations = it;
    rep.status = best_merit <= std::max(opt_.tol, 1e3 * opt_.tol) ? SolveStatus::NearOptimal
                                                                   : SolveStatus::NumericalFailure;
    if (rep.message.empty()) rep.message = "iteration limit reached";
  }

  // one predictor-corrector step; returns false on breakdown
  bool step(const std::vector<Eigen::MatrixXd>& R, const Eigen::VectorXd& rd, double mu)
  {
    const int nb = static_cast<int>(blocks_.size());
    std::vector<Eigen::LLT<Eigen::MatrixXd>> Sllt(nb), Yllt(nb);
    std::vector<Eigen::MatrixXd> W(nb);
    for (int k = 0; k < nb; ++k) {
      if (blocks_[k].kind == ConeKind::PSD) {
        Sllt[k].compute(st_.S[k]);
        Yllt[k].compute(st_.Y[k]);
        // rounding pushed an iterate out of the cone: nudge it back, the residuals absorb the shift
        for (int t = 0; t < 8 && Sllt[k].info() != Eigen::Success; ++t) {
          st_.S[k].diagonal().array() += std::ldexp(st_.S[k].diagonal().cwiseAbs().maxCoeff(), -50 + 3 * t);
          Sllt[k].compute(st_.S[k]);
        }
        for (int t = 0; t < 8 && Yllt[k].info() != Eigen::Success; ++t) {
          st_.Y[k].diagonal().array() += std::ldexp(st_.Y[k].diagonal().cwiseAbs().maxCoeff(), -50 + 3 * t);
          Yllt[k].compute(st_.Y[k]);
        }
        if (Sllt[k].info() != Eigen::Success || Yllt[k].info() != Eigen::Success) return false;
        W[k] = Sllt[k].solve(Eigen::MatrixXd::Identity(blocks_[k].n, blocks_[k].n));
        W[k] = sym(W[k]);
      } else {
        W[k] = st_.S[k].cwiseInverse();
      }
    }
    // Schur complement, one dense matrix per coupled variable component
    std::vector<Eigen::MatrixXd> H(comps_.size());
    for (std::size_t q = 0; q < comps_.size(); ++q) H[q] = Eigen::MatrixXd::Zero(comps_[q].size(), comps_[q].size());
    for (int k = 0; k < nb; ++k) {
      const auto& w = blocks_[k];
      if (w.coefs.empty()) continue;
      Eigen::MatrixXd& Hq = H[block_comp_[k]];
      if (w.kind == ConeKind::PSD) {
        const Eigen::MatrixXd& Y = st_.Y[k];
        Eigen::MatrixXd G(w.n, w.n);
        for (const auto& cj : w.coefs) {
          G.setZero();
          for (const auto& e : cj.entries) {
            G.noalias() += e.value * W[k].col(e.row) * Y.row(e.col);
            if (e.row != e.col) G.noalias() += e.value * W[k].col(e.col) * Y.row(e.row);
          }
          const int lj = local_[cj.var];
          for (const auto& ci : w.coefs) Hq(local_[ci.var], lj) += inner(ci.entries, G);
        }
      } else {
        for (int pos = 0; pos < w.n; ++pos) {
          const double d = st_.Y[k](pos, 0) * W[k](pos, 0);
          for (const auto& [i, vi] : w.lp_rows[pos])
            for (const auto& [j, vj] : w.lp_rows[pos]) Hq(local_[i], local_[j]) += vi * vj * d;
        }
      }
    }
    std::vector<Eigen::LLT<Eigen::MatrixXd>> Hllt(comps_.size());
    for (std::size_t q = 0; q < comps_.size(); ++q) {
      H[q] = sym(H[q]);
      Eigen::MatrixXd Hs = H[q];
      const double dmax = std::max(1e-300, Hs.diagonal().cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < Hs.rows(); ++i)
        if (Hs(i, i) <= 1e-13 * dmax) Hs(i, i) += 1e-10 * dmax;
      Hllt[q] = robust_llt(std::move(Hs));
      if (Hllt[q].info() != Eigen::Success) return false;
    }
    auto Hsolve = [&](const Eigen::MatrixXd& rhs) {
      Eigen::MatrixXd out(rhs.rows(), rhs.cols());
      for (std::size_t q = 0; q < comps_.size(); ++q) {
        const auto& vars = comps_[q];
        Eigen::MatrixXd sub(vars.size(), rhs.cols());
        for (std::size_t i = 0; i < vars.size(); ++i) sub.row(i) = rhs.row(vars[i]);
        sub = Hllt[q].solve(sub);
        for (std::size_t i = 0; i < vars.size(); ++i) out.row(vars[i]) = sub.row(i);
      }
      return out;
    };
    Eigen::MatrixXd HiAt;
    Eigen::LLT<Eigen::MatrixXd> Kllt;
    if (p_ > 0) {
      HiAt = Hsolve(A_.transpose());
      Kllt = robust_llt(sym(A_ * HiAt));
      if (Kllt.info() != Eigen::Success) return false;
    }
    const Eigen::VectorXd rp = p_ > 0 ? Eigen::VectorXd(b_ - A_ * st_.x) : Eigen::VectorXd();
    auto Hmul = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd out(v.size());
      for (std::size_t q = 0; q < comps_.size(); ++q) {
        const auto& vars = comps_[q];
        Eigen::VectorXd sub(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) sub(i) = v(vars[i]);
        sub = H[q] * sub;
        for (std::size_t i = 0; i < vars.size(); ++i) out(vars[i]) = sub(i);
      }
      return out;
    };
    // H dx - A' dl = h, A dx = rp, with iterative refinement against the unshifted H
    auto kkt = [&](const Eigen::VectorXd& h, Eigen::VectorXd& dx, Eigen::VectorXd& dl) {
      auto once = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& ex, Eigen::VectorXd& el) {
        const Eigen::VectorXd Hih = Hsolve(r1);
        if (p_ > 0) {
          el = Kllt.solve(r2 - A_ * Hih);
          ex = Hih + HiAt * el;
        } else {
          el = Eigen::VectorXd();
          ex = Hih;
        }
      };
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p_);
      once(h, p_ > 0 ? rp : zero, dx, dl);
      const double hn = std::max(1e-300, h.norm() + (p_ > 0 ? rp.norm() : 0.0));
      for (int it = 0; it < 3; ++it) {
        Eigen::VectorXd r1 = h - Hmul(dx);
        if (p_ > 0) r1 += A_.transpose() * dl;
        const Eigen::VectorXd r2 = p_ > 0 ? Eigen::VectorXd(rp - A_ * dx) : zero;
        if (r1.norm() + r2.norm() <= 1e-15 * hn) break;
        Eigen::VectorXd ex, el;
        once(r1, r2, ex, el);
        dx += ex;
        if (p_ > 0) dl += el;
      }
    };

    // solve for a target T (nullptr: affine predictor)
    struct Dir {
      Eigen::VectorXd dx, dl;
      std::vector<Eigen::MatrixXd> dS, dY;
    };
    auto direction = [&](const std::vector<Eigen::MatrixXd>* T, Dir& d) {
      std::vector<Eigen::MatrixXd> M(nb);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(m_);
      for (int k = 0; k < nb; ++k) {
        const auto& w = blocks_[k];
        if (w.kind == ConeKind::PSD) {
          M[k] = -st_.Y[k] - W[k] * R[k] * st_.Y[k];
          if (T) M[k] += W[k] * (*T)[k];
          adjoint_add(w, M[k], g);
        } else {
          M[k] = -st_.Y[k] - (W[k].array() * R[k].array() * st_.Y[k].array()).matrix();
          if (T) M[k] += (W[k].array() * (*T)[k].array()).matrix();
          adjoint_add(w, M[k], g);
        }
      }
      kkt(g - rd, d.dx, d.dl);
      d.dS.resize(nb);
      d.dY.resize(nb);
      for (int k = 0; k < nb; ++k) {
        const auto& w = blocks_[k];
        d.dS[k] = R[k] + apply(w, d.dx);
        if (w.kind == ConeKind::PSD) {
          Eigen::MatrixXd dY = -st_.Y[k] - W[k] * d.dS[k] * st_.Y[k];
          if (T) dY += W[k] * (*T)[k];
          d.dY[k] = sym(dY);
        } else {
          d.dY[k] = -st_.Y[k] - (W[k].array() * d.dS[k].array() * st_.Y[k].array()).matrix();
          if (T) d.dY[k] += (W[k].array() * (*T)[k].array()).matrix();
        }
      }
      Eigen::VectorXd e = rd;
      if (p_ > 0) e -= A_.transpose() * d.dl;
      Eigen::VectorXd ady = Eigen::VectorXd::Zero(m_);
      for (int k = 0; k < nb; ++k) adjoint_add(blocks_[k], d.dY[k], ady);
      e -= ady;
      restore_dual(e, d.dY);
    };
    auto steps = [&](const Dir& d, double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = ap;
      for (int k = 0; k < nb; ++k) {
        if (blocks_[k].kind == ConeKind::PSD) {
          ap = std::min(ap, max_step_psd(Sllt[k], d.dS[k]));
          ad = std::min(ad, max_step_psd(Yllt[k], d.dY[k]));
        } else {
          ap = std::min(ap, max_step_lp(st_.S[k], d.dS[k]));
          ad = std::min(ad, max_step_lp(st_.Y[k], d.dY[k]));
        }
      }
    };

    Dir pred;
    direction(nullptr, pred);
    double ap, ad;
    steps(pred, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double nu = 0.0, mu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      nu += blocks_[k].n;
      mu_aff += ((st_.S[k] + ap * pred.dS[k]).array() * (st_.Y[k] + ad * pred.dY[k]).array()).sum();
    }
    mu_aff /= nu;
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);
    std::vector<Eigen::MatrixXd> T(nb);
    for (int k = 0; k < nb; ++k) {
      const auto& w = blocks_[k];
      if (w.kind == ConeKind::PSD)
        T[k] = sigma * mu * Eigen::MatrixXd::Identity(w.n, w.n) - pred.dS[k] * pred.dY[k];
      else
        T[k] = (Eigen::MatrixXd::Constant(w.n, 1, sigma * mu).array() - pred.dS[k].array() * pred.dY[k].array())
                   .matrix();
    }
    Dir corr;
    direction(&T, corr);
    steps(corr, ap, ad);
    const double gamma = 0.95;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (!corr.dx.allFinite()) return false;
    st_.x += ap * corr.dx;
    if (p_ > 0) st_.l += ad * corr.dl;
    for (int k = 0; k < nb; ++k) {
      st_.S[k] += ap * corr.dS[k];
      st_.Y[k] += ad * corr.dY[k];
      if (blocks_[k].kind == ConeKind::PSD) {
        st_.S[k] = sym(st_.S[k]);
        st_.Y[k] = sym(st_.Y[k]);
      }
    }
    last_alpha_ = std::min(ap, ad);
    return true;
  }

  // ---------- unscale and report ----------
  void finish(SolveResult& res)
  {
    const int nb = static_cast<int>(blocks_.size());
    res.x = colscale_.cwiseProduct(st_.x);
    const int p0 = static_cast<int>(P_.rows.size());
    res.multipliers = Eigen::VectorXd::Zero(p0);
    for (int i = 0; i < p_; ++i) res.multipliers(keep_[i]) = rowscale_(keep_[i]) * st_.l(i) / objscale_;
    res.duals.resize(nb);
    for (int k = 0; k < nb; ++k) {
      res.duals[k] = blocks_[k].scale * st_.Y[k] / objscale_;
      if (blocks_[k].kind == ConeKind::Nonneg) {
        const Eigen::VectorXd d = res.duals[k].col(0);
        res.duals[k] = d.asDiagonal();
      }
    }
  }

  const ConicProgram& P_;
  SolverOptions opt_;
  int m_ = 0, p_ = 0;
  Eigen::MatrixXd A0_, A_;
  Eigen::VectorXd b0_, c0_, b_, c_;
  Eigen::VectorXd colscale_, rowscale_;
  double objscale_ = 1.0;
  std::vector<WorkBlock> blocks_;
  std::vector<int> keep_;
  bool inconsistent_ = false;
  std::vector<std::vector<int>> comps_;
  std::vector<int> comp_of_, local_, block_comp_;
  State st_;
  double last_alpha_ = 1.0;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> Gllt_;
};

}  // namespace detail

namespace detail {

// Variables fixed by single-entry equality rows are substituted into the
// blocks; rows and blocks left without variables are checked and dropped.
struct Presolve {
  ConicProgram reduced;
  std::vector<int> var_map, row_map, block_map;  // reduced index -> original
  std::vector<char> fixed;
  Eigen::VectorXd value;
  std::vector<std::pair<int, int>> eliminated;  // (variable, defining row) in elimination order
  bool infeasible = false;
  std::string message;

  explicit Presolve(const ConicProgram& P)
  {
    const int m = P.num_vars;
    const int p = static_cast<int>(P.rows.size());
    fixed.assign(m, 0);
    value = Eigen::VectorXd::Zero(m);
    std::vector<double> rhs(P.b.begin(), P.b.end());
    std::vector<char> row_done(p, 0);
    std::vector<std::vector<int>> rows_of(m);
    for (int r = 0; r < p; ++r)
      for (int j : P.rows[r].index) rows_of[j].push_back(r);
    auto live = [&](int r, int& j, double& a) {
      int count = 0;
      for (std::size_t t = 0; t < P.rows[r].index.size(); ++t)
        if (!fixed[P.rows[r].index[t]] && P.rows[r].value[t] != 0.0) {
          ++count;
          j = P.rows[r].index[t];
          a = P.rows[r].value[t];
        }
      return count;
    };
    const double bscale = std::max(1.0, P.b.empty() ? 0.0 : Eigen::Map<const Eigen::VectorXd>(P.b.data(), p).cwiseAbs().maxCoeff());
    std::vector<int> queue(p);
    std::iota(queue.begin(), queue.end(), 0);
    while (!queue.empty()) {
      std::vector<int> next;
      for (int r : queue) {
        if (row_done[r]) continue;
        int j = -1;
        double a = 0.0;
        const int cnt = live(r, j, a);
        if (cnt == 0) {
          row_done[r] = 1;
          if (std::abs(rhs[r]) > 1e-9 * bscale) {
            infeasible = true;
            message = "equality constraints are inconsistent";
          }
          continue;
        }
        if (cnt > 1) continue;
        row_done[r] = 1;
        fixed[j] = 1;
        value(j) = rhs[r] / a;
        eliminated.push_back({j, r});
        for (int q : rows_of[j]) {
          if (q == r) continue;
          for (std::size_t t = 0; t < P.rows[q].index.size(); ++t)
            if (P.rows[q].index[t] == j) rhs[q] -= P.rows[q].value[t] * value(j);
          if (!row_done[q]) next.push_back(q);
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      queue = std::move(next);
    }

    std::vector<int> new_index(m, -1);
    for (int j = 0; j < m; ++j)
      if (!fixed[j]) {
        new_index[j] = static_cast<int>(var_map.size());
        var_map.push_back(j);
      }
    ConicProgram& R = reduced;
    R.num_vars = static_cast<int>(var_map.size());
    R.objective_offset = P.objective_offset;
    for (int j = 0; j < m; ++j) {
      if (fixed[j])
        R.objective_offset += P.c[j] * value(j);
      else
        R.c.push_back(P.c[j]);
    }
    for (int r = 0; r < p; ++r) {
      if (row_done[r]) continue;
      SparseRow row;
      for (std::size_t t = 0; t < P.rows[r].index.size(); ++t) {
        const int j = P.rows[r].index[t];
        if (!fixed[j]) {
          row.index.push_back(new_index[j]);
          row.value.push_back(P.rows[r].value[t]);
        }
      }
      R.rows.push_back(std::move(row));
      R.b.push_back(rhs[r]);
      row_map.push_back(r);
    }
    for (std::size_t k = 0; k < P.blocks.size(); ++k) {
      const auto& blk = P.blocks[k];
      ConeBlock nb;
      nb.kind = blk.kind;
      nb.size = blk.size;
      nb.label = blk.label;
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(blk.size, blk.size);
      for (const auto& e : blk.constant) C(e.row, e.col) += e.value;
      for (const auto& [j, es] : blk.coefficients) {
        if (fixed[j]) {
          for (const auto& e : es) C(e.row, e.col) += value(j) * e.value;
        } else {
          nb.coefficients.push_back({new_index[j], es});
        }
      }
      for (int i = 0; i < blk.size; ++i)
        for (int c = i; c < blk.size; ++c)
          if (C(i, c) != 0.0) nb.constant.push_back({i, c, C(i, c)});
      if (nb.coefficients.empty()) {
        Eigen::MatrixXd F = C.selfadjointView<Eigen::Upper>();
        const double lmin = blk.kind == ConeKind::PSD
                                ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(F, Eigen::EigenvaluesOnly).eigenvalues()(0)
                                : F.diagonal().minCoeff();
        if (lmin < -1e-9 * std::max(1.0, F.norm())) {
          infeasible = true;
          message = "fixed block '" + blk.label + "' is not in its cone";
        }
        continue;
      }
      R.blocks.push_back(std::move(nb));
      block_map.push_back(static_cast<int>(k));
    }
  }

  // full primal and dual solution from the reduced one
  SolveResult expand(const ConicProgram& P, const SolveResult& red) const
  {
    SolveResult out;
    out.report = red.report;
    out.x = value;
    for (std::size_t i = 0; i < var_map.size(); ++i) out.x(var_map[i]) = red.x(static_cast<Eigen::Index>(i));
    out.duals.resize(P.blocks.size());
    for (std::size_t k = 0; k < P.blocks.size(); ++k) out.duals[k] = Eigen::MatrixXd::Zero(P.blocks[k].size, P.blocks[k].size);
    for (std::size_t k = 0; k < block_map.size(); ++k) out.duals[block_map[k]] = red.duals[k];
    out.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P.rows.size()));
    for (std::size_t i = 0; i < row_map.size(); ++i) out.multipliers(row_map[i]) = red.multipliers(static_cast<Eigen::Index>(i));
    // dual equation of each eliminated variable determines its row multiplier
    Eigen::VectorXd ay = Eigen::VectorXd::Zero(P.num_vars);
    for (std::size_t k = 0; k < P.blocks.size(); ++k) {
      const Eigen::MatrixXd& Y = out.duals[k];
      for (const auto& [j, es] : P.blocks[k].coefficients)
        for (const auto& e : es) ay(j) += e.value * (e.row == e.col ? Y(e.row, e.col) : 2.0 * Y(e.row, e.col));
    }
    std::vector<std::vector<std::pair<int, double>>> rows_of(P.num_vars);
    for (std::size_t r = 0; r < P.rows.size(); ++r)
      for (std::size_t t = 0; t < P.rows[r].index.size(); ++t)
        rows_of[P.rows[r].index[t]].push_back({static_cast<int>(r), P.rows[r].value[t]});
    for (auto it = eliminated.rbegin(); it != eliminated.rend(); ++it) {
      const auto [j, r] = *it;
      double s = P.c[j] - ay(j), a = 0.0;
      for (const auto& [q, v] : rows_of[j]) {
        if (q == r)
          a += v;
        else
          s -= v * out.multipliers(q);
      }
      out.multipliers(r) = s / a;
    }
    return out;
  }
};

}  // namespace detail

inline SolveResult solve(const ConicProgram& program, const SolverOptions& options = {})
{
  program.validate();
  detail::Presolve pre(program);
  if (pre.infeasible || pre.eliminated.empty() || pre.reduced.num_vars == 0) {
    if (!pre.infeasible && pre.eliminated.empty()) return detail::InteriorPoint(program, options).run();
    SolveResult res;
    res.x = pre.value;
    res.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(program.rows.size()));
    for (const auto& blk : program.blocks) res.duals.push_back(Eigen::MatrixXd::Zero(blk.size, blk.size));
    if (pre.infeasible) {
      res.report.status = SolveStatus::PrimalInfeasible;
      res.report.message = pre.message;
      return res;
    }
    SolveResult red;
    red.x = Eigen::VectorXd();
    red.report.status = SolveStatus::Optimal;
    red.report.message = "all variables fixed by equalities";
    res = pre.expand(program, red);
    detail::fill_report(program, res, options.tol);
    return res;
  }
  auto red = detail::InteriorPoint(pre.reduced, options).run();
  if (red.duals.size() != pre.reduced.blocks.size()) {
    SolveResult res;
    res.x = pre.value;
    res.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(program.rows.size()));
    res.report = red.report;
    return res;
  }
  auto res = pre.expand(program, red);
  detail::fill_report(program, res, options.tol);
  return res;
}

// SDPA sparse format. With F0 = -C and Fi = A_i the SDPA primal
// min c'x s.t. sum_i F_i x_i - F0 >= 0 is exactly this program. Equalities
// become a trailing diagonal block holding the pair a_r'x - b_r >= 0, b_r - a_r'x >= 0.
// The objective offset has no SDPA counterpart and is dropped.
inline void export_sdpa(const ConicProgram& prog, std::ostream& os)
{
  prog.validate();
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const bool eq = !prog.rows.empty();
  const std::size_t nblocks = prog.blocks.size() + (eq ? 1 : 0);
  os << prog.num_vars << "\n" << nblocks << "\n";
  for (std::size_t k = 0; k < prog.blocks.size(); ++k) {
    const auto& blk = prog.blocks[k];
    os << (k ? " " : "") << (blk.kind == ConeKind::PSD ? blk.size : -blk.size);
  }
  if (eq) os << (prog.blocks.empty() ? "" : " ") << -2 * static_cast<long>(prog.rows.size());
  os << "\n";
  for (int i = 0; i < prog.num_vars; ++i) os << (i ? " " : "") << num(prog.c[i]);
  os << "\n";
  // matrix 0 first, then matrices 1..m, each block in order
  for (std::size_t k = 0; k < prog.blocks.size(); ++k)
    for (const auto& e : prog.blocks[k].constant)
      if (e.value != 0.0)
        os << 0 << " " << k + 1 << " " << e.row + 1 << " " << e.col + 1 << " " << num(-e.value) << "\n";
  if (eq)
    for (std::size_t r = 0; r < prog.rows.size(); ++r)
      if (prog.b[r] != 0.0) {
        os << 0 << " " << nblocks << " " << 2 * r + 1 << " " << 2 * r + 1 << " " << num(prog.b[r]) << "\n";
        os << 0 << " " << nblocks << " " << 2 * r + 2 << " " << 2 * r + 2 << " " << num(-prog.b[r]) << "\n";
      }
  // gather per-variable entries
  std::vector<std::vector<std::pair<std::size_t, BlockEntry>>> per(prog.num_vars);
  for (std::size_t k = 0; k < prog.blocks.size(); ++k)
    for (const auto& [j, es] : prog.blocks[k].coefficients)
      for (const auto& e : es) per[j].push_back({k + 1, e});
  std::vector<std::vector<std::pair<std::size_t, double>>> eqcol(prog.num_vars);
  for (std::size_t r = 0; r < prog.rows.size(); ++r)
    for (std::size_t t = 0; t < prog.rows[r].index.size(); ++t)
      eqcol[prog.rows[r].index[t]].push_back({r, prog.rows[r].value[t]});
  for (int j = 0; j < prog.num_vars; ++j) {
    for (const auto& [k, e] : per[j])
      if (e.value != 0.0)
        os << j + 1 << " " << k << " " << e.row + 1 << " " << e.col + 1 << " " << num(e.value) << "\n";
    // merge duplicate row entries so each position is written once
    std::vector<std::pair<std::size_t, double>> col = eqcol[j];
    std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < col.size();) {
      std::size_t r = col[t].first;
      double v = 0.0;
      for (; t < col.size() && col[t].first == r; ++t) v += col[t].second;
      if (v != 0.0) {
        os << j + 1 << " " << nblocks << " " << 2 * r + 1 << " " << 2 * r + 1 << " " << num(v) << "\n";
        os << j + 1 << " " << nblocks << " " << 2 * r + 2 << " " << 2 * r + 2 << " " << num(-v) << "\n";
      }
    }
  }
}

}  // namespace momentot
