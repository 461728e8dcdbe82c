#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tfde/error.hpp"

namespace tfde {

struct GmresReport {
  int iterations = 0;
  std::vector<double> residual_history;  // relative to ||b||, entry 0 is the initial residual
  double wall_ms = 0.0;
  bool converged = false;
};

template <class T>
using LinearMap = std::function<Eigen::Matrix<T, Eigen::Dynamic, 1>(const Eigen::Matrix<T, Eigen::Dynamic, 1>&)>;

namespace detail {
inline void givens(double a, double b, double& c, double& s) {
  const double r = std::hypot(a, b);
  if (r == 0.0) { c = 1.0; s = 0.0; return; }
  c = a / r;
  s = b / r;
}
inline void givens(const std::complex<double>& a, const std::complex<double>& b, double& c,
                   std::complex<double>& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) { c = 1.0; s = 0.0; return; }
  if (na == 0.0) { c = 0.0; s = std::conj(b) / nb; return; }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}
inline double conj_of(double v) { return v; }
inline std::complex<double> conj_of(const std::complex<double>& v) { return std::conj(v); }
}  // namespace detail

// Un-restarted GMRES with modified Gram-Schmidt and right preconditioning x = P y.
// Stops at the first iterate with ||b - A x|| <= tol ||b||.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, 1> gmres(const LinearMap<T>& op, const Eigen::Matrix<T, Eigen::Dynamic, 1>& b,
                                          double tol, int max_iter, GmresReport& report,
                                          const LinearMap<T>& precond = nullptr) {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using S = std::conditional_t<std::is_same_v<T, double>, double, std::complex<double>>;
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "gmres tolerance must be positive");
  if (max_iter < 1) throw Error(ErrorKind::InvalidParameter, "gmres needs max_iter >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  report = GmresReport{};
  const int n = static_cast<int>(b.size());
  Vec x = Vec::Zero(n);
  const double bnorm = b.norm();
  report.residual_history.push_back(bnorm == 0.0 ? 0.0 : 1.0);
  if (bnorm == 0.0) {
    report.converged = true;
    return x;
  }
  const int m = std::min(max_iter, n);
  Mat V(n, m + 1);
  Mat H = Mat::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<S> sn(m);
  Vec g = Vec::Zero(m + 1);
  V.col(0) = b / bnorm;
  g(0) = bnorm;
  int k = 0;
  for (; k < m; ++k) {
    Vec w = precond ? op(precond(V.col(k))) : op(V.col(k));
    if (w.size() != n) throw Error(ErrorKind::DimensionMismatch, "gmres operator size mismatch");
    for (int i = 0; i <= k; ++i) {
      H(i, k) = V.col(i).dot(w);
      w -= H(i, k) * V.col(i);
    }
    const double hn = w.norm();
    H(k + 1, k) = hn;
    if (hn > 0.0) V.col(k + 1) = w / hn;
    for (int i = 0; i < k; ++i) {
      const T a = H(i, k), c2 = H(i + 1, k);
      H(i, k) = cs[i] * a + sn[i] * c2;
      H(i + 1, k) = -detail::conj_of(sn[i]) * a + cs[i] * c2;
    }
    detail::givens(H(k, k), H(k + 1, k), cs[k], sn[k]);
    const T a = H(k, k), c2 = H(k + 1, k);
    H(k, k) = cs[k] * a + sn[k] * c2;
    H(k + 1, k) = T(0);
    g(k + 1) = -detail::conj_of(sn[k]) * g(k);
    g(k) = cs[k] * g(k);
    const double rel = std::abs(g(k + 1)) / bnorm;
    report.residual_history.push_back(rel);
    if (rel <= tol || hn == 0.0) {
      ++k;
      report.converged = rel <= tol || hn == 0.0;
      break;
    }
  }
  report.iterations = k;
  Vec y = H.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(g.head(k));
  Vec z = V.leftCols(k) * y;
  x = precond ? precond(z) : z;
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return x;
}

// 2-norm condition number from a dense realization; n <= 1024.
double condition_number(const Eigen::MatrixXd& a);

// LU with partial pivoting; throws singular-matrix on a zero or tiny pivot.
Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs);
Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& rhs);

// Dense matrix of a linear map on R^n by unit-vector probing; op must be thread-safe.
Eigen::MatrixXd densify(const LinearMap<double>& op, int n);

}  // namespace tfde
