#include "tfde/wavelet_precond.hpp"

#include <cmath>
#include <vector>

namespace tfde {

FwtPlan::FwtPlan(int levels, double h) : J_(levels), h_(h) {
  if (levels < 1 || levels > 26) throw Error(ErrorKind::InvalidParameter, "FWT levels out of range", levels);
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParameter, "FWT mesh width must be positive");
  n_ = (1 << levels) - 1;
}

// Level-l nodal arrays carry the two boundary zeros: size 2^l + 1.
Eigen::VectorXd FwtPlan::apply(const Eigen::VectorXd& x, std::int64_t* ops) const {
  if (x.size() != n_) throw Error(ErrorKind::DimensionMismatch, "FWT input size mismatch");
  std::int64_t count = 0;
  std::vector<double> coarse{0.0, 0.0}, fine;
  for (int l = 0; l < J_; ++l) {
    const int nc = 1 << l;
    fine.assign(2 * nc + 1, 0.0);
    const double s = std::pow(2.0, 0.5 * l);
    const double* xl = x.data() + offset(l);
    for (int i = 0; i <= nc; ++i) fine[2 * i] = coarse[i];
    for (int k = 0; k < nc; ++k) fine[2 * k + 1] = 0.5 * (coarse[k] + coarse[k + 1]) + s * xl[k];
    count += 4 * nc;
    coarse.swap(fine);
  }
  Eigen::VectorXd u(n_);
  const double sh = std::sqrt(h_);
  for (int i = 0; i < n_; ++i) u(i) = sh * coarse[i + 1];
  count += n_;
  if (ops) *ops = count;
  return u;
}

Eigen::VectorXd FwtPlan::transpose_apply(const Eigen::VectorXd& y, std::int64_t* ops) const {
  if (y.size() != n_) throw Error(ErrorKind::DimensionMismatch, "FWT input size mismatch");
  std::int64_t count = n_;
  const double sh = std::sqrt(h_);
  std::vector<double> fine(n_ + 2, 0.0), coarse;
  for (int i = 0; i < n_; ++i) fine[i + 1] = sh * y(i);
  Eigen::VectorXd x(n_);
  for (int l = J_ - 1; l >= 0; --l) {
    const int nc = 1 << l;
    const double s = std::pow(2.0, 0.5 * l);
    for (int k = 0; k < nc; ++k) x(offset(l) + k) = s * fine[2 * k + 1];
    coarse.assign(nc + 1, 0.0);
    for (int i = 1; i < nc; ++i) coarse[i] = fine[2 * i] + 0.5 * (fine[2 * i - 1] + fine[2 * i + 1]);
    count += 4 * nc;
    fine.swap(coarse);
  }
  if (ops) *ops = count;
  return x;
}

Eigen::VectorXd FwtPlan::inverse_apply(const Eigen::VectorXd& u, std::int64_t* ops) const {
  if (u.size() != n_) throw Error(ErrorKind::DimensionMismatch, "FWT input size mismatch");
  std::int64_t count = n_;
  const double ish = 1.0 / std::sqrt(h_);
  std::vector<double> fine(n_ + 2, 0.0), coarse;
  for (int i = 0; i < n_; ++i) fine[i + 1] = ish * u(i);
  Eigen::VectorXd x(n_);
  for (int l = J_ - 1; l >= 0; --l) {
    const int nc = 1 << l;
    const double is = std::pow(2.0, -0.5 * l);
    for (int k = 0; k < nc; ++k)
      x(offset(l) + k) = is * (fine[2 * k + 1] - 0.5 * (fine[2 * k] + fine[2 * k + 2]));
    coarse.assign(nc + 1, 0.0);
    for (int i = 0; i <= nc; ++i) coarse[i] = fine[2 * i];
    count += 4 * nc;
    fine.swap(coarse);
  }
  if (ops) *ops = count;
  return x;
}

Eigen::MatrixXd FwtPlan::dense() const {
  Eigen::MatrixXd w(n_, n_);
  for (int j = 0; j < n_; ++j) w.col(j) = apply(Eigen::VectorXd::Unit(n_, j));
  return w;
}

DiagScaling build_diag(const FwtPlan& plan, const LinearMap<double>& A, bool translation_invariant, Exec exec) {
  const int n = plan.dofs();
  DiagScaling out;
  out.d.resize(n);
  auto entry = [&](int idx) {
    const Eigen::VectorXd psi = plan.apply(Eigen::VectorXd::Unit(n, idx));
    const double a = psi.dot(A(psi));
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(ErrorKind::IndefiniteForm, "non-positive wavelet diagonal entry", idx);
    return 1.0 / std::sqrt(a);
  };
  if (translation_invariant) {
    for (int l = 0; l < plan.levels(); ++l) {
      const double v = entry(FwtPlan::offset(l));
      out.d.segment(FwtPlan::offset(l), 1 << l).setConstant(v);
    }
    return out;
  }
  if (exec == Exec::Serial) {
    for (int i = 0; i < n; ++i) out.d(i) = entry(i);
    return out;
  }
  bool failed = false;
  int worst = 0;
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    try {
      out.d(i) = entry(i);
    } catch (const Error&) {
#pragma omp critical
      {
        worst = failed ? std::min(worst, i) : i;
        failed = true;
      }
    }
  }
  if (failed) throw Error(ErrorKind::IndefiniteForm, "non-positive wavelet diagonal entry", worst);
  return out;
}

Eigen::VectorXd preconditioned_apply(const FwtPlan& plan, const DiagScaling& d, const LinearMap<double>& A,
                                     const Eigen::VectorXd& x) {
  if (x.size() != plan.dofs() || d.d.size() != plan.dofs())
    throw Error(ErrorKind::DimensionMismatch, "preconditioned apply size mismatch");
  const Eigen::VectorXd y = plan.apply(d.d.cwiseProduct(x));
  return d.d.cwiseProduct(plan.transpose_apply(A(y)));
}

}  // namespace tfde
