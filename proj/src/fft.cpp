#include "tfde/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "tfde/error.hpp"

namespace tfde {

struct FftPlan::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

namespace {

std::mutex plan_mutex;

std::map<int, std::shared_ptr<const FftPlan::Impl>>& registry() {
  static std::map<int, std::shared_ptr<const FftPlan::Impl>> r;
  return r;
}

}  // namespace

FftPlan::FftPlan(int n) : n_(n) {
  if (n < 1) throw Error(ErrorKind::InvalidParameter, "FFT length must be positive");
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = registry().find(n);
  if (it != registry().end()) {
    impl_ = it->second;
    return;
  }
  auto impl = std::make_shared<Impl>();
  std::vector<cplx> buf(n);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  impl->fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl->bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  registry().emplace(n, impl);
  impl_ = impl;
}

void FftPlan::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->fwd, p, p);
}

void FftPlan::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->bwd, p, p);
}

}  // namespace tfde
