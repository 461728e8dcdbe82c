#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tfde/contour.hpp"
#include "tfde/exec.hpp"
#include "tfde/fem_space.hpp"

namespace tfde {

// Spatial operator L in  C D_t^{gamma,lambda} u = -K L u + f.
enum class SpaceOperator {
  Laplacian,           // -u_xx
  TemperedFractional,  // -aD^{alpha,lambda} u with the low-order corrections
  FractionalLaplacian  // (-u_xx)^{alpha/2}, spectral
};

struct TimeModelSpec {
  double gamma = 0.5;
  double lambda = 0.0;  // time tempering
  double K = 1.0;
  SpaceOperator op = SpaceOperator::Laplacian;
  double alpha = 2.0;         // order of the tempered or fractional-Laplacian operator
  double space_lambda = 0.0;  // tempering of the space operator
  RealFn g;                   // initial data
  double T = 1.0;
};

void validate(const TimeModelSpec& spec);

struct SpaceDiscretization {
  UniformMesh mesh;
  BasisKind kind = BasisKind::Linear;
  SpaceOperator op = SpaceOperator::Laplacian;
  double power = 1.0;  // L^power in the Mittag-Leffler argument (DTI only)
  Eigen::SparseMatrix<double> mass;
  Eigen::SparseMatrix<double> laplacian;  // H1 seminorm
  std::shared_ptr<const Pencil> pencil;

  int dofs() const { return static_cast<int>(mass.rows()); }
  // M^{-1} F
  Eigen::VectorXd mass_solve(const Eigen::VectorXd& F) const;
  Eigen::VectorXd project(const RealFn& g) const;
  double h1_seminorm(const Eigen::VectorXd& U) const;

 private:
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> mass_ldlt_;
  friend SpaceDiscretization discretize(const TimeModelSpec&, const UniformMesh&, BasisKind, bool);
};

// iterative: matrix-free stiffness with shifted GMRES (tempered operator only)
SpaceDiscretization discretize(const TimeModelSpec& spec, const UniformMesh& mesh, BasisKind kind,
                               bool iterative = false);

// Everything needed to apply Pi^{gamma,beta}(t) = t^{beta-1} E_{gamma,beta}(-K t^gamma L).
struct MlContext {
  ContourRule rule;
  double gamma = 0.5;
  double K = 1.0;
  std::shared_ptr<const Pencil> pencil;
  MlOptions opts;
  std::vector<std::string> diagnostics;

  // terms with beta > 4 get their own PC rule under CF and PC
  Eigen::VectorXd apply(const std::vector<MlTerm>& terms) const;
};

// n1 = 0 selects the default (16 for CF and PC).  FractionalLaplacian requires DTI.
MlContext make_context(const TimeModelSpec& spec, const SpaceDiscretization& space, Scheme scheme, int n1 = 0,
                       MlOptions opts = {});

// e^{-lambda t} E_{gamma,1}(-K t^gamma L) g_h; throws stability-violation if the H1 seminorm grows.
Eigen::VectorXd solve_homogeneous(const MlContext& ctx, const SpaceDiscretization& space, double lambda, double t,
                                  const Eigen::VectorXd& g_h, bool check_stability = true);

// Source of V = e^{lambda t} u:  sum_i t^{nu_i - 1} v_i  (v_i already projected).
struct PowerTerm {
  double nu = 1.0;
  Eigen::VectorXd v;
};
Eigen::VectorXd source_power_ml(const MlContext& ctx, double t, const std::vector<PowerTerm>& terms);

// Interval k = [t_k, t_{k+1}]: left[k][l] multiplies (s - t_k)^l, right[k][l] multiplies (s - t_{k+1})^l.
struct PiecewisePoly {
  std::vector<double> breaks;
  std::vector<std::vector<Eigen::VectorXd>> left, right;
};
using VectorFn = std::function<Eigen::VectorXd(double)>;
// quadratic interpolation through both endpoints and the midpoint of every interval
PiecewisePoly piecewise_quadratic(const VectorFn& q, const std::vector<double>& breaks);
Eigen::VectorXd source_piecewise(const MlContext& ctx, double t, const PiecewisePoly& rep);

// Interpolant at M+1 Chebyshev-Gauss points of [0, t] in monomials: q(s) ~ sum_j coef[j] s^j.
struct ChebyshevSource {
  double t = 1.0;
  int degree = 0;
  std::vector<Eigen::VectorXd> coef;
};
std::vector<double> chebyshev_points(double t, int degree);
ChebyshevSource chebyshev_interpolant(const VectorFn& q, double t, int degree);
Eigen::VectorXd source_chebyshev(const MlContext& ctx, const ChebyshevSource& rep);

// L1 stepping for V = e^{lambda t} u; load(t) returns (e^{lambda t} f(t), phi_j).  Laplacian only.
struct L1Result {
  Eigen::VectorXd U;  // u_h(T)
  int steps = 0;
  double wall_ms = 0.0;
};
L1Result l1_baseline(const TimeModelSpec& spec, const SpaceDiscretization& space, const Eigen::VectorXd& g_h,
                     const VectorFn& load, int steps, Exec exec = Exec::Parallel);

// y_i = sum_{j<cols} b[cols-j] H(j, i), H stored time-major (one column per dof)
void l1_history(const Eigen::MatrixXd& H, int cols, const std::vector<double>& b, Eigen::VectorXd& y, Exec exec);

}  // namespace tfde
