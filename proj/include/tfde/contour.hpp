#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tfde/exec.hpp"
#include "tfde/krylov.hpp"

namespace tfde {

using cplx = std::complex<double>;

enum class Scheme { CF, PC, DTI };
const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Quadrature for Pi^{gamma,beta}(t) v = t^{beta-1} E_{gamma,beta}(-K t^gamma L) v.
// Only upper half-plane nodes are stored (real nodes once); results are Re sum_k weights_k g_k X_k,
// conjugate doubling already folded into the weights.
//   CF, PC:  X_k = (z_k^gamma M + K t^gamma S)^{-1} M v,  g_k = t^{beta-1} z_k^{gamma-beta}
//   DTI:     X_k = (z_k M - S)^{-1} M v,                 g_k = t^{beta-1} E_{gamma,beta}(-K t^gamma z_k^power)
struct ContourRule {
  Scheme scheme = Scheme::CF;
  int n1 = 0;
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  double predicted_error = 0.0;
  // PC parabola z = sigma (i p + 1)^2, p_k = k tau
  double sigma = 0.0, tau = 0.0;
  // DTI ellipse w = center + focal cosh(eta + i theta) in w = log z
  double center = 0.0, focal = 0.0, eta = 0.0, power = 1.0;
  double sigma_min = 0.0, sigma_max = 0.0;
};

// Type (N1-1, N1) CF approximation of e^z on (-inf, 0]; 8 <= N1 <= 20, N1 even.
ContourRule cf_nodes(int n1);
// Truncated trapezoid rule on the parabola, k = 0..N1.
ContourRule pc_nodes(double gamma, double beta, int n1 = 16);
// Trapezoid rule on an ellipse in the log plane enclosing [sigma_min, sigma_max]; N1 = 10 ceil(log(kappa) + 3).
ContourRule dti_nodes(double sigma_min, double sigma_max, double power = 1.0);

// max |sum c_k/(z - z_k) - e^z| over a dense sample of [-zmax, 0]
double cf_max_error(const ContourRule& rule, double zmax = 1e6, int samples = 10000);

// Spatial pencil (M, S), L = M^{-1} S.
class Pencil {
 public:
  virtual ~Pencil() = default;
  virtual int size() const = 0;
  virtual Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const = 0;
  // (a M + b S) X = R
  virtual Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const = 0;
  virtual bool symmetric() const = 0;
  virtual Eigen::MatrixXd dense_mass() const = 0;
  virtual Eigen::MatrixXd dense_stiffness() const = 0;
};

class SparsePencil : public Pencil {
 public:
  SparsePencil(Eigen::SparseMatrix<double> M, Eigen::SparseMatrix<double> S);
  int size() const override { return static_cast<int>(M_.rows()); }
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const override { return M_ * v; }
  Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const override { return S_ * v; }
  Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const override;
  bool symmetric() const override { return symmetric_; }
  Eigen::MatrixXd dense_mass() const override { return Eigen::MatrixXd(M_); }
  Eigen::MatrixXd dense_stiffness() const override { return Eigen::MatrixXd(S_); }

 private:
  Eigen::SparseMatrix<double> M_, S_;
  bool symmetric_;
};

class DensePencil : public Pencil {
 public:
  DensePencil(Eigen::MatrixXd M, Eigen::MatrixXd S);
  int size() const override { return static_cast<int>(M_.rows()); }
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const override { return M_ * v; }
  Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const override { return S_ * v; }
  Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const override;
  bool symmetric() const override { return symmetric_; }
  Eigen::MatrixXd dense_mass() const override { return M_; }
  Eigen::MatrixXd dense_stiffness() const override { return S_; }

 private:
  Eigen::MatrixXd M_, S_;
  bool symmetric_;
};

class DiagonalPencil : public Pencil {
 public:
  DiagonalPencil(Eigen::VectorXd m, Eigen::VectorXd s);
  int size() const override { return static_cast<int>(m_.size()); }
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const override { return m_.cwiseProduct(v); }
  Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const override { return s_.cwiseProduct(v); }
  Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const override;
  bool symmetric() const override { return true; }
  Eigen::MatrixXd dense_mass() const override { return m_.asDiagonal(); }
  Eigen::MatrixXd dense_stiffness() const override { return s_.asDiagonal(); }

 private:
  Eigen::VectorXd m_, s_;
};

// Sparse mass with a matrix-free stiffness; shifted systems by complex GMRES.
class GmresPencil : public Pencil {
 public:
  GmresPencil(Eigen::SparseMatrix<double> M, LinearMap<cplx> S, double tol = 1e-12, int max_iter = 2000);
  int size() const override { return static_cast<int>(M_.rows()); }
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const override { return M_ * v; }
  Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const override;
  bool symmetric() const override { return false; }
  Eigen::MatrixXd dense_mass() const override { return Eigen::MatrixXd(M_); }
  Eigen::MatrixXd dense_stiffness() const override;

 private:
  Eigen::SparseMatrix<double> M_;
  LinearMap<cplx> S_;
  double tol_;
  int max_iter_;
};

// Extreme eigenvalues of the symmetric pencil S x = sigma M x.
std::pair<double, double> spectral_bounds(const Pencil& pencil);

struct MlTerm {
  double beta = 1.0;
  double t = 1.0;
  Eigen::VectorXd v;
};

struct MlOptions {
  Exec exec = Exec::Parallel;
  // solve at both members of every conjugate pair and report the imaginary part of the full sum
  bool expand_conjugates = false;
  double* imag_residue = nullptr;
};

// sum_i Pi^{gamma,beta_i}(t_i) v_i
Eigen::VectorXd ml_apply(const ContourRule& rule, double gamma, double K, const Pencil& pencil,
                         const std::vector<MlTerm>& terms, const MlOptions& opts = {});
Eigen::VectorXd ml_apply(const ContourRule& rule, double gamma, double beta, double t, double K,
                         const Pencil& pencil, const Eigen::VectorXd& v, const MlOptions& opts = {});

}  // namespace tfde
