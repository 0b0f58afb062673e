#pragma once

// Sparse linear algebra for the assembled systems.
//
// Matrices are compressed sparse rows (Eigen storage). Symmetric systems,
// real SPD or complex symmetric with positive definite real part, are
// factored with an up-looking sparse LDLᵀ (transpose, not adjoint) after a
// fill-reducing AMD permutation. Pivoting is not needed for either class.
// BiCGSTAB with Jacobi preconditioning and a tridiagonal elimination are
// also provided.

#include <Eigen/OrderingMethods>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcloak {

template <class T>
using CsrMatrix = Eigen::SparseMatrix<T, Eigen::RowMajor, int>;

template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
        relative_residual(residual) {}
  double relative_residual;
};

template <class T>
struct SparseSystem {
  CsrMatrix<T> matrix;
  Vector<T> rhs;
};

template <class T>
double relative_residual(const CsrMatrix<T>& a, const Vector<T>& x, const Vector<T>& b) {
  const double bn = b.norm();
  const double rn = (b - a * x).norm();
  return bn > 0.0 ? rn / bn : rn;
}

/// Sparse LDLᵀ of a structurally and numerically symmetric matrix.
template <class T>
class SparseLdlt {
public:
  SparseLdlt() = default;
  explicit SparseLdlt(const CsrMatrix<T>& a) { factor(a); }

  void factor(const CsrMatrix<T>& a) {
    if (a.rows() != a.cols()) throw SolverError("SparseLdlt: matrix is not square", 1.0);
    n_ = static_cast<int>(a.rows());
    compute_ordering(a);
    build_permuted_upper(a);
    symbolic();
    numeric();
  }

  int size() const { return n_; }
  std::size_t factor_nonzeros() const { return lx_.size(); }

  Vector<T> solve(const Vector<T>& b) const {
    Vector<T> x(n_);
    for (int i = 0; i < n_; ++i) x[new_of_old_[i]] = b[i];
    for (int j = 0; j < n_; ++j) {
      const T xj = x[j];
      for (int p = lp_[j]; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * xj;
    }
    for (int j = 0; j < n_; ++j) x[j] /= d_[j];
    for (int j = n_ - 1; j >= 0; --j) {
      T acc = x[j];
      for (int p = lp_[j]; p < lp_[j + 1]; ++p) acc -= lx_[p] * x[li_[p]];
      x[j] = acc;
    }
    Vector<T> out(n_);
    for (int i = 0; i < n_; ++i) out[i] = x[new_of_old_[i]];
    return out;
  }

private:
  void compute_ordering(const CsrMatrix<T>& a) {
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> pattern(n_, n_);
    std::vector<Eigen::Triplet<double, int>> entries;
    entries.reserve(a.nonZeros());
    for (int r = 0; r < n_; ++r)
      for (typename CsrMatrix<T>::InnerIterator it(a, r); it; ++it) entries.emplace_back(r, it.col(), 1.0);
    pattern.setFromTriplets(entries.begin(), entries.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> order;
    Eigen::AMDOrdering<int> amd;
    amd(pattern, order);
    // order.indices()[new] = old
    new_of_old_.assign(n_, 0);
    for (int k = 0; k < n_; ++k) new_of_old_[order.indices()[k]] = k;
  }

  // Column-compressed upper triangle of P A Pᵀ.
  void build_permuted_upper(const CsrMatrix<T>& a) {
    ap_.assign(n_ + 1, 0);
    for (int r = 0; r < n_; ++r)
      for (typename CsrMatrix<T>::InnerIterator it(a, r); it; ++it) {
        const int i = new_of_old_[r], j = new_of_old_[it.col()];
        if (i <= j) ++ap_[j + 1];
      }
    for (int j = 0; j < n_; ++j) ap_[j + 1] += ap_[j];
    ai_.resize(ap_[n_]);
    ax_.resize(ap_[n_]);
    std::vector<int> next(ap_.begin(), ap_.end() - 1);
    for (int r = 0; r < n_; ++r)
      for (typename CsrMatrix<T>::InnerIterator it(a, r); it; ++it) {
        const int i = new_of_old_[r], j = new_of_old_[it.col()];
        if (i > j) continue;
        ai_[next[j]] = i;
        ax_[next[j]] = it.value();
        ++next[j];
      }
  }

  void symbolic() {
    parent_.assign(n_, -1);
    std::vector<int> flag(n_), lnz(n_, 0);
    for (int k = 0; k < n_; ++k) {
      flag[k] = k;
      for (int p = ap_[k]; p < ap_[k + 1]; ++p) {
        for (int i = ai_[p]; i < k && flag[i] != k; i = parent_[i]) {
          if (parent_[i] == -1) parent_[i] = k;
          ++lnz[i];
          flag[i] = k;
        }
      }
    }
    lp_.assign(n_ + 1, 0);
    for (int k = 0; k < n_; ++k) lp_[k + 1] = lp_[k] + lnz[k];
    li_.resize(lp_[n_]);
    lx_.resize(lp_[n_]);
  }

  void numeric() {
    d_.assign(n_, T(0));
    std::vector<T> y(n_, T(0));
    std::vector<int> flag(n_), pattern(n_), lnz(n_, 0);
    for (int k = 0; k < n_; ++k) {
      int top = n_;
      flag[k] = k;
      for (int p = ap_[k]; p < ap_[k + 1]; ++p) {
        int i = ai_[p];
        y[i] += ax_[p];
        int len = 0;
        for (; i < k && flag[i] != k; i = parent_[i]) {
          pattern[len++] = i;
          flag[i] = k;
        }
        while (len > 0) pattern[--top] = pattern[--len];
      }
      d_[k] = y[k];
      y[k] = T(0);
      for (; top < n_; ++top) {
        const int i = pattern[top];
        const T yi = y[i];
        y[i] = T(0);
        const int end = lp_[i] + lnz[i];
        for (int p = lp_[i]; p < end; ++p) y[li_[p]] -= lx_[p] * yi;
        const T lki = yi / d_[i];
        d_[k] -= lki * yi;
        li_[end] = k;
        lx_[end] = lki;
        ++lnz[i];
      }
      if (std::abs(d_[k]) == 0.0 || !std::isfinite(std::abs(d_[k])))
        throw SolverError("SparseLdlt: zero pivot, matrix is singular", 1.0);
    }
    // Release the copy of A.
    ap_ = {};
    ai_ = {};
    ax_ = {};
  }

  int n_ = 0;
  std::vector<int> new_of_old_;
  std::vector<int> ap_, ai_;
  std::vector<T> ax_;
  std::vector<int> parent_, lp_, li_;
  std::vector<T> lx_;
  std::vector<T> d_;
};

struct KrylovOptions {
  double tolerance = 1e-11;
  int max_iterations = 20000;
};

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned BiCGSTAB. Works for general (non-Hermitian)
/// systems; x holds the initial guess on entry.
template <class T>
KrylovResult bicgstab(const CsrMatrix<T>& a, const Vector<T>& b, Vector<T>& x, const KrylovOptions& opt = {}) {
  const Eigen::Index n = a.rows();
  Vector<T> inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T d = a.coeff(i, i);
    inv_diag[i] = std::abs(d) > 0.0 ? T(1) / d : T(1);
  }
  KrylovResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  Vector<T> r = b - a * x;
  const Vector<T> r_hat = r;
  T rho = 1, alpha = 1, omega = 1;
  Vector<T> v = Vector<T>::Zero(n), p = Vector<T>::Zero(n);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const T rho_new = r_hat.dot(r);  // conjugates r_hat
    if (std::abs(rho_new) == 0.0) break;
    const T beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    const Vector<T> p_hat = inv_diag.cwiseProduct(p);
    v = a * p_hat;
    alpha = rho / r_hat.dot(v);
    const Vector<T> s = r - alpha * v;
    const Vector<T> s_hat = inv_diag.cwiseProduct(s);
    const Vector<T> t = a * s_hat;
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(s) / T(tt) : T(0);
    x += alpha * p_hat + omega * s_hat;
    r = s - omega * t;
    res.iterations = it;
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= opt.tolerance) {
      res.relative_residual = relative_residual(a, x, b);
      res.converged = res.relative_residual <= 10.0 * opt.tolerance;
      if (res.converged) return res;
      r = b - a * x;
    }
    if (std::abs(omega) == 0.0) break;
  }
  res.relative_residual = relative_residual(a, x, b);
  res.converged = res.relative_residual <= opt.tolerance;
  return res;
}

/// Thomas elimination for a tridiagonal matrix given by its sub-, main and
/// super-diagonal. Stable without pivoting for the diagonally dominant and
/// complex-symmetric-with-positive-real-part systems of the radial solver.
template <class T>
Vector<T> solve_tridiagonal(const std::vector<T>& lower, const std::vector<T>& diag,
                            const std::vector<T>& upper, const Vector<T>& rhs) {
  const std::size_t n = diag.size();
  std::vector<T> c(n), d(n);
  T denom = diag[0];
  if (std::abs(denom) == 0.0) throw SolverError("solve_tridiagonal: zero pivot", 1.0);
  c[0] = n > 1 ? upper[0] / denom : T(0);
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i - 1] * c[i - 1];
    if (std::abs(denom) == 0.0) throw SolverError("solve_tridiagonal: zero pivot", 1.0);
    c[i] = i + 1 < n ? upper[i] / denom : T(0);
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
  }
  Vector<T> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

enum class SolverKind { automatic, direct, krylov, tridiagonal };

struct SolveOptions {
  SolverKind kind = SolverKind::automatic;
  double tolerance = 1e-10;
  KrylovOptions krylov{};
};

template <class T>
struct SolveResult {
  Vector<T> solution;
  double relative_residual = 0.0;
  int iterations = 0;
};

namespace detail {

template <class T>
bool is_tridiagonal(const CsrMatrix<T>& a) {
  for (int r = 0; r < a.outerSize(); ++r)
    for (typename CsrMatrix<T>::InnerIterator it(a, r); it; ++it)
      if (std::abs(it.col() - r) > 1) return false;
  return true;
}

}  // namespace detail

/// Solves system.matrix x = system.rhs.
///
/// `automatic` picks tridiagonal elimination for tridiagonal matrices and the
/// sparse LDLᵀ otherwise. Throws SolverError when the relative residual
/// exceeds the tolerance.
template <class T>
SolveResult<T> solve_sparse(const SparseSystem<T>& system, const SolveOptions& opt = {}) {
  const auto& a = system.matrix;
  const auto& b = system.rhs;
  SolveResult<T> out;
  if (b.norm() == 0.0) {
    out.solution = Vector<T>::Zero(b.size());
    return out;
  }
  SolverKind kind = opt.kind;
  if (kind == SolverKind::automatic) kind = detail::is_tridiagonal(a) ? SolverKind::tridiagonal : SolverKind::direct;

  switch (kind) {
    case SolverKind::tridiagonal: {
      const Eigen::Index n = a.rows();
      std::vector<T> lo(n > 0 ? n - 1 : 0), di(n), up(n > 0 ? n - 1 : 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        di[i] = a.coeff(i, i);
        if (i + 1 < n) {
          up[i] = a.coeff(i, i + 1);
          lo[i] = a.coeff(i + 1, i);
        }
      }
      out.solution = solve_tridiagonal(lo, di, up, b);
      break;
    }
    case SolverKind::krylov: {
      out.solution = Vector<T>::Zero(b.size());
      KrylovOptions ko = opt.krylov;
      ko.tolerance = std::min(ko.tolerance, opt.tolerance);
      const auto kr = bicgstab(a, b, out.solution, ko);
      out.iterations = kr.iterations;
      if (!kr.converged) throw SolverError("solve_sparse: BiCGSTAB did not converge", kr.relative_residual);
      break;
    }
    default: {
      SparseLdlt<T> ldlt(a);
      out.solution = ldlt.solve(b);
      break;
    }
  }
  out.relative_residual = relative_residual(a, out.solution, b);
  if (!(out.relative_residual <= opt.tolerance))
    throw SolverError("solve_sparse: residual above tolerance", out.relative_residual);
  return out;
}

}  // namespace heatcloak
