#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

#include "tfde/exec.hpp"
#include "tfde/tempered_calculus.hpp"
#include "tfde/toeplitz.hpp"

namespace tfde {

struct UniformMesh {
  Interval interval;
  int J = 0;
  int N = 0;
  double h = 0.0;

  UniformMesh() = default;
  UniformMesh(Interval I, int levels);
  double node(int i) const { return interval.a + i * h; }
};

enum class BasisKind { Linear, Quadratic };

// Quadratic pieces c0 + c1 t + c2 t^2 on consecutive unit cells.
struct MotherFunction {
  int ncells = 1;
  std::array<std::array<double, 3>, 2> cells{};
};

MotherFunction linear_hat();
MotherFunction quadratic_node();    // H1
MotherFunction quadratic_bubble();  // H2

struct BasisFamily {
  BasisKind kind = BasisKind::Linear;

  int dofs(const UniformMesh& mesh) const;
  // mother functions and their index counts, in dof order
  std::vector<MotherFunction> mothers() const;
  std::vector<int> family_sizes(const UniformMesh& mesh) const;
};

// Basis functions touching element el: dof index and value/derivative of the normalized basis.
struct LocalShape {
  int count = 0;
  std::array<int, 3> dof{};
  std::array<std::array<double, 3>, 3> poly{};  // coefficients in t, already divided by sqrt(h)
};
LocalShape local_shape(const UniformMesh& mesh, BasisKind kind, int el);

struct Coefficient {
  RealFn f;
  RealFn df;
  bool constant = true;
  double value = 0.0;

  static Coefficient zero() { return constant_value(0.0); }
  static Coefficient constant_value(double v);
  static Coefficient function(RealFn f, RealFn df);
  double operator()(double x) const { return constant ? value : f(x); }
  double derivative(double x) const;
  bool is_zero() const { return constant && value == 0.0; }
};

// regular(x) + sum smooth_i(x) * dist_i(x)^exponent_i, dist measured from the named endpoint
struct SingularTerm {
  RealFn smooth;
  double exponent = 0.0;
  bool at_right = true;
};

struct RhsDescription {
  RealFn regular;
  std::vector<SingularTerm> singular;
  double operator()(double x, Interval I) const;
};

struct SpaceModelSpec {
  double alpha = 1.5;
  double lambda = 0.0;
  double p = 1.0;
  Coefficient m = Coefficient::zero();
  Coefficient c = Coefficient::zero();
  RhsDescription f;
};

enum class Formulation { Galerkin, PetrovGalerkin, AdvectionDiffusion };

struct AssembledSystem {
  UniformMesh mesh;
  BasisKind kind = BasisKind::Linear;
  Formulation formulation = Formulation::Galerkin;
  double alpha = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  bool translation_invariant = false;
  // u_h(x) = exp(recover_rate * x) * sum U_k phi_k(x)
  double recover_rate = 0.0;

  BlockToeplitzOperator fractional;
  Eigen::SparseMatrix<double> banded;
  Eigen::VectorXd load;
  std::vector<std::string> warnings;

  int dofs() const { return static_cast<int>(load.size()); }
  int fractional_stored_floats() const { return fractional.generating_entry_count(); }

  template <class T>
  Eigen::Matrix<T, Eigen::Dynamic, 1> apply(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const {
    Eigen::Matrix<T, Eigen::Dynamic, 1> y = fractional.apply<T>(x);
    y += banded.cast<T>() * x;
    return y;
  }
  Eigen::MatrixXd dense() const;
  double evaluate(const Eigen::VectorXd& U, double x) const;
};

// Generating entry t(d), d = test index - trial index, of the matrix
// -(left order-(2-alpha) integral of (d/dx + lambda) trial, (d/dx - lambda) test), 0 < alpha <= 2.
double fractional_entry(const MotherFunction& test, const MotherFunction& trial, int d, double alpha,
                        double lambda, double h);

// Left: entries (a D^{alpha/2,lambda} phi_j, x D^{alpha/2,lambda} phi_i).  Right: its transpose.
BlockToeplitzOperator assemble_fractional_toeplitz(const UniformMesh& mesh, BasisKind kind, double alpha,
                                                   double lambda, Side side, Exec exec = Exec::Parallel);

// Sparse matrices from element quadrature: (w phi_j, phi_i) and (w phi_j', phi_i).
Eigen::SparseMatrix<double> weighted_mass(const UniformMesh& mesh, BasisKind kind, const Coefficient& w);
Eigen::SparseMatrix<double> weighted_convection(const UniformMesh& mesh, BasisKind kind, const Coefficient& w);
Eigen::SparseMatrix<double> laplacian_stiffness(const UniformMesh& mesh, BasisKind kind);

AssembledSystem assemble_galerkin(const SpaceModelSpec& spec, const UniformMesh& mesh, BasisKind kind,
                                  Exec exec = Exec::Parallel);
AssembledSystem assemble_petrov_galerkin(const SpaceModelSpec& spec, const UniformMesh& mesh, BasisKind kind,
                                         Exec exec = Exec::Parallel);

// -a D^{alpha1,lambda} u + d a D^{alpha2,lambda} u = f through u = e^{-lambda x} u1.
AssembledSystem assemble_advection_diffusion(double alpha1, double alpha2, double d, double lambda,
                                             const RhsDescription& f, const UniformMesh& mesh, BasisKind kind);

// (e^{weight_rate x} f, phi_j)
Eigen::VectorXd assemble_load(const RhsDescription& f, const UniformMesh& mesh, BasisKind kind,
                              double weight_rate = 0.0);

// Projection coefficients: mass matrix solve against (g, phi_j).
Eigen::VectorXd l2_projection(const RealFn& g, const UniformMesh& mesh, BasisKind kind);

struct ExactSolution {
  RealFn u;
  RealFn du;
};

struct Example1Manufactured {
  ExactSolution exact;
  RhsDescription f;
  Coefficient m;
};

// u = (1-x)^beta - e^{lambda x}(1-x) on (0,1), right-sided model p = 1, m = q lambda^{alpha-1}(1-x), c = 0.
Example1Manufactured manufactured_rhs_example1(double alpha, double lambda, double beta, double q);

struct ErrorNorms {
  double l2 = 0.0;
  double energy = 0.0;
};

// Energy error on a reference mesh refine_factor times finer with the lambda = 0 order-alpha form.
ErrorNorms error_norms(const AssembledSystem& sys, const Eigen::VectorXd& U, const RealFn& exact,
                       int refine_factor = 8);
double l2_error(const UniformMesh& mesh, BasisKind kind, const Eigen::VectorXd& U, const RealFn& exact,
                double recover_rate = 0.0);
double energy_error(const UniformMesh& mesh, double alpha, const RealFn& approx, const RealFn& exact,
                    int refine_factor = 8);

// Sum U_k phi_k(x) for a plain coefficient vector.
double evaluate_fe(const UniformMesh& mesh, BasisKind kind, const Eigen::VectorXd& U, double x);

}  // namespace tfde
