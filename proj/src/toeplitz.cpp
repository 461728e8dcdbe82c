#include "tfde/toeplitz.hpp"

#include <cmath>

#include "tfde/error.hpp"

namespace tfde {

ToeplitzOperator::ToeplitzOperator(std::vector<double> column, std::vector<double> row)
    : column_(std::move(column)), row_(std::move(row)) {
  if (column_.empty() || row_.empty())
    throw Error(ErrorKind::DimensionMismatch, "Toeplitz operator needs nonempty column and row");
  if (column_[0] != row_[0])
    throw Error(ErrorKind::InvalidInput, "Toeplitz column and row disagree on the diagonal");
  const int need = 2 * std::max(rows(), cols());
  padded_ = 1;
  while (padded_ < need) padded_ *= 2;
  plan_.emplace(padded_);
  spectrum_.assign(padded_, cplx(0.0));
  for (int i = 0; i < rows(); ++i) spectrum_[i] = column_[i];
  for (int j = 1; j < cols(); ++j) spectrum_[padded_ - j] = row_[j];
  plan_->forward(spectrum_.data());
  const double inv = 1.0 / padded_;
  for (auto& s : spectrum_) s *= inv;
}

void ToeplitzOperator::apply(const cplx* x, cplx* y) const {
  std::vector<cplx> buf(padded_, cplx(0.0));
  for (int j = 0; j < cols(); ++j) buf[j] = x[j];
  const FftPlan& plan = *plan_;
  plan.forward(buf.data());
  for (int k = 0; k < padded_; ++k) buf[k] *= spectrum_[k];
  plan.backward(buf.data());
  for (int i = 0; i < rows(); ++i) y[i] = buf[i];
}

void ToeplitzOperator::apply(const double* x, double* y) const {
  std::vector<cplx> buf(padded_, cplx(0.0));
  for (int j = 0; j < cols(); ++j) buf[j] = x[j];
  const FftPlan& plan = *plan_;
  plan.forward(buf.data());
  for (int k = 0; k < padded_; ++k) buf[k] *= spectrum_[k];
  plan.backward(buf.data());
  for (int i = 0; i < rows(); ++i) y[i] = buf[i].real();
}

Eigen::VectorXd ToeplitzOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) throw Error(ErrorKind::DimensionMismatch, "Toeplitz matvec size mismatch");
  Eigen::VectorXd y(rows());
  apply(x.data(), y.data());
  return y;
}

Eigen::VectorXcd ToeplitzOperator::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != cols()) throw Error(ErrorKind::DimensionMismatch, "Toeplitz matvec size mismatch");
  Eigen::VectorXcd y(rows());
  apply(x.data(), y.data());
  return y;
}

ToeplitzOperator ToeplitzOperator::scaled(double s) const {
  std::vector<double> c = column_, r = row_;
  for (auto& v : c) v *= s;
  for (auto& v : r) v *= s;
  return ToeplitzOperator(std::move(c), std::move(r));
}

Eigen::MatrixXd ToeplitzOperator::dense() const {
  Eigen::MatrixXd d(rows(), cols());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j) d(i, j) = entry(i, j);
  return d;
}

BlockToeplitzOperator::BlockToeplitzOperator(int block_rows, int block_cols,
                                             std::vector<ToeplitzOperator> blocks)
    : nbr_(block_rows), nbc_(block_cols), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != nbr_ * nbc_)
    throw Error(ErrorKind::DimensionMismatch, "block count does not match the grid");
  for (int r = 0; r < nbr_; ++r)
    for (int c = 0; c < nbc_; ++c) {
      if (block(r, c).rows() != block(r, 0).rows() || block(r, c).cols() != block(0, c).cols())
        throw Error(ErrorKind::DimensionMismatch, "inconsistent block sizes");
    }
}

BlockToeplitzOperator::BlockToeplitzOperator(ToeplitzOperator single)
    : nbr_(1), nbc_(1), blocks_{std::move(single)} {}

int BlockToeplitzOperator::rows() const {
  int n = 0;
  for (int r = 0; r < nbr_; ++r) n += block(r, 0).rows();
  return n;
}

int BlockToeplitzOperator::cols() const {
  int n = 0;
  for (int c = 0; c < nbc_; ++c) n += block(0, c).cols();
  return n;
}

int BlockToeplitzOperator::generating_entry_count() const {
  int n = 0;
  for (const auto& b : blocks_) n += b.generating_entry_count();
  return n;
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, 1> BlockToeplitzOperator::apply(
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  if (x.size() != cols()) throw Error(ErrorKind::DimensionMismatch, "block matvec size mismatch");
  Vec y = Vec::Zero(rows());
  int roff = 0;
  for (int r = 0; r < nbr_; ++r) {
    int coff = 0;
    const int nr = block(r, 0).rows();
    Vec part(nr);
    for (int c = 0; c < nbc_; ++c) {
      const int nc = block(0, c).cols();
      block(r, c).apply(x.data() + coff, part.data());
      y.segment(roff, nr) += part;
      coff += nc;
    }
    roff += nr;
  }
  return y;
}

template Eigen::VectorXd BlockToeplitzOperator::apply<double>(const Eigen::VectorXd&) const;
template Eigen::VectorXcd BlockToeplitzOperator::apply<cplx>(const Eigen::VectorXcd&) const;

BlockToeplitzOperator BlockToeplitzOperator::transposed() const {
  std::vector<ToeplitzOperator> t;
  t.reserve(blocks_.size());
  for (int c = 0; c < nbc_; ++c)
    for (int r = 0; r < nbr_; ++r) t.push_back(block(r, c).transposed());
  return BlockToeplitzOperator(nbc_, nbr_, std::move(t));
}

Eigen::MatrixXd BlockToeplitzOperator::dense() const {
  Eigen::MatrixXd d(rows(), cols());
  int roff = 0;
  for (int r = 0; r < nbr_; ++r) {
    int coff = 0;
    for (int c = 0; c < nbc_; ++c) {
      d.block(roff, coff, block(r, c).rows(), block(r, c).cols()) = block(r, c).dense();
      coff += block(0, c).cols();
    }
    roff += block(r, 0).rows();
  }
  return d;
}

}  // namespace tfde

namespace tfde {

BlockToeplitzOperator linear_combination(double a, const BlockToeplitzOperator& A, double b,
                                         const BlockToeplitzOperator& B) {
  if (A.block_rows() != B.block_rows() || A.block_cols() != B.block_cols())
    throw Error(ErrorKind::DimensionMismatch, "block grids differ");
  std::vector<ToeplitzOperator> out;
  for (int r = 0; r < A.block_rows(); ++r)
    for (int c = 0; c < A.block_cols(); ++c) {
      const auto& x = A.block(r, c);
      const auto& y = B.block(r, c);
      if (x.rows() != y.rows() || x.cols() != y.cols())
        throw Error(ErrorKind::DimensionMismatch, "block sizes differ");
      std::vector<double> col(x.rows()), row(x.cols());
      for (int i = 0; i < x.rows(); ++i) col[i] = a * x.column()[i] + b * y.column()[i];
      for (int j = 0; j < x.cols(); ++j) row[j] = a * x.row()[j] + b * y.row()[j];
      row[0] = col[0];
      out.emplace_back(std::move(col), std::move(row));
    }
  return BlockToeplitzOperator(A.block_rows(), A.block_cols(), std::move(out));
}

}  // namespace tfde
