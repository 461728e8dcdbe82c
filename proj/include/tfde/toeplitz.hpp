#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "tfde/fft.hpp"

namespace tfde {

// Rectangular Toeplitz matrix T(i, j) = column[i - j] for i >= j, row[j - i] otherwise,
// applied through a zero-padded circulant embedding.
class ToeplitzOperator {
 public:
  ToeplitzOperator() = default;
  ToeplitzOperator(std::vector<double> column, std::vector<double> row);

  int rows() const { return static_cast<int>(column_.size()); }
  int cols() const { return static_cast<int>(row_.size()); }
  int embedding_size() const { return padded_; }
  const std::vector<double>& column() const { return column_; }
  const std::vector<double>& row() const { return row_; }
  int generating_entry_count() const { return rows() + cols() - 1; }

  double entry(int i, int j) const { return i >= j ? column_[i - j] : row_[j - i]; }

  void apply(const double* x, double* y) const;
  void apply(const cplx* x, cplx* y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  ToeplitzOperator transposed() const { return ToeplitzOperator(row_, column_); }
  ToeplitzOperator scaled(double s) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<double> column_;
  std::vector<double> row_;
  int padded_ = 0;
  std::vector<cplx> spectrum_;
  std::optional<FftPlan> plan_;
};

// Block matrix whose blocks are Toeplitz; block (r, c) maps segment c to segment r.
class BlockToeplitzOperator {
 public:
  BlockToeplitzOperator() = default;
  BlockToeplitzOperator(int block_rows, int block_cols, std::vector<ToeplitzOperator> blocks);
  explicit BlockToeplitzOperator(ToeplitzOperator single);

  int block_rows() const { return nbr_; }
  int block_cols() const { return nbc_; }
  const ToeplitzOperator& block(int r, int c) const { return blocks_[r * nbc_ + c]; }
  int rows() const;
  int cols() const;
  int generating_entry_count() const;

  template <class T>
  Eigen::Matrix<T, Eigen::Dynamic, 1> apply(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const;

  BlockToeplitzOperator transposed() const;
  Eigen::MatrixXd dense() const;

 private:
  int nbr_ = 0;
  int nbc_ = 0;
  std::vector<ToeplitzOperator> blocks_;
};

}  // namespace tfde

namespace tfde {

// a*A + b*B on the generating sequences; block shapes must agree.
BlockToeplitzOperator linear_combination(double a, const BlockToeplitzOperator& A, double b,
                                         const BlockToeplitzOperator& B);

}  // namespace tfde
