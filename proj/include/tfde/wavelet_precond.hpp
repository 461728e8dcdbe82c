#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "tfde/exec.hpp"
#include "tfde/krylov.hpp"

namespace tfde {

// Schauder hierarchical basis on 2^J - 1 interior nodes.  Multiscale index (j, k) sits at
// offset 2^j - 1 + k; nodal coefficients refer to the 1/sqrt(h)-normalized hat basis.
class FwtPlan {
 public:
  FwtPlan(int levels, double h);

  int levels() const { return J_; }
  int dofs() const { return n_; }
  double h() const { return h_; }
  static int offset(int j) { return (1 << j) - 1; }

  // ops, when given, receives the number of floating point operations performed
  Eigen::VectorXd apply(const Eigen::VectorXd& x, std::int64_t* ops = nullptr) const;
  Eigen::VectorXd transpose_apply(const Eigen::VectorXd& y, std::int64_t* ops = nullptr) const;
  Eigen::VectorXd inverse_apply(const Eigen::VectorXd& u, std::int64_t* ops = nullptr) const;
  Eigen::MatrixXd dense() const;

 private:
  int J_;
  int n_;
  double h_;
};

struct DiagScaling {
  Eigen::VectorXd d;
};

// d_{j,k} = (psi_{j,k}^T A psi_{j,k})^{-1/2}; one entry per level when the operator is
// translation invariant, otherwise every entry.
DiagScaling build_diag(const FwtPlan& plan, const LinearMap<double>& A, bool translation_invariant,
                       Exec exec = Exec::Parallel);

// D W^T A W D x
Eigen::VectorXd preconditioned_apply(const FwtPlan& plan, const DiagScaling& d, const LinearMap<double>& A,
                                     const Eigen::VectorXd& x);

}  // namespace tfde
