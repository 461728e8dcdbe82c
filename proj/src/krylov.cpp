#include "tfde/krylov.hpp"

namespace tfde {

double condition_number(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "condition number needs a square matrix");
  if (a.rows() > 1024) throw Error(ErrorKind::UnsupportedSize, "condition number limited to n <= 1024", a.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

namespace {
template <class M, class V>
V lu_solve(const M& a, const V& rhs) {
  if (a.rows() != a.cols() || a.rows() != rhs.size())
    throw Error(ErrorKind::DimensionMismatch, "dense solve size mismatch");
  if (a.rows() > 4096) throw Error(ErrorKind::UnsupportedSize, "dense solve limited to n <= 4096", a.rows());
  Eigen::PartialPivLU<M> lu(a);
  const auto& f = lu.matrixLU();
  const double scale = a.cwiseAbs().maxCoeff();
  for (int i = 0; i < f.rows(); ++i) {
    if (!(std::abs(f(i, i)) > 1e-14 * scale))
      throw Error(ErrorKind::SingularMatrix, "zero pivot in dense LU", i);
  }
  return lu.solve(rhs);
}
}  // namespace

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs) { return lu_solve(a, rhs); }
Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& rhs) { return lu_solve(a, rhs); }

Eigen::MatrixXd densify(const LinearMap<double>& op, int n) {
  Eigen::MatrixXd d(n, n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    d.col(j) = op(e);
  }
  return d;
}

}  // namespace tfde
