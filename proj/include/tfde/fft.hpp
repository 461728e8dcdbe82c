#pragma once

#include <complex>
#include <memory>

namespace tfde {

using cplx = std::complex<double>;

// In-place complex FFT of fixed length; execute is thread-safe.
class FftPlan {
 public:
  explicit FftPlan(int n);
  int size() const { return n_; }
  void forward(cplx* data) const;
  // unnormalized inverse
  void backward(cplx* data) const;

  struct Impl;

 private:
  int n_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace tfde
