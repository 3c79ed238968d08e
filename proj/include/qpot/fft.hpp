#pragma once

// Thin RAII layer over FFTW for the transforms the spectral backend needs.
// Plans are created with FFTW_ESTIMATE so results do not depend on timing.

#include <fftw3.h>

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace qpot::fft {

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <class T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : size(n), data(static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)))) {
    if (data == nullptr) {
      throw std::bad_alloc();
    }
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  std::size_t size;
  T* data;
};

inline void execute_r2r(std::span<double> inout, fftw_r2r_kind kind) {
  const int n = static_cast<int>(inout.size());
  FftwBuffer<double> buf(inout.size());
  Plan plan(fftw_plan_r2r_1d(n, buf.data, buf.data, kind, FFTW_ESTIMATE));
  if (!plan) {
    throw std::runtime_error("fftw: r2r plan creation failed");
  }
  std::copy(inout.begin(), inout.end(), buf.data);
  fftw_execute(plan.get());
  std::copy(buf.data, buf.data + inout.size(), inout.begin());
}

}  // namespace detail

/// Unnormalized DST-I (FFTW RODFT00): Y_k = 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1)).
/// Applying it twice multiplies by 2(n+1).
inline void dst1(std::span<double> data) { detail::execute_r2r(data, FFTW_RODFT00); }

/// Unnormalized DCT-I (FFTW REDFT00) on n >= 2 points.
inline void dct1(std::span<double> data) { detail::execute_r2r(data, FFTW_REDFT00); }

/// In-place complex DFT. forward: sign -1, backward: sign +1, both unnormalized.
inline void dft(std::span<std::complex<double>> data, bool forward) {
  const int n = static_cast<int>(data.size());
  detail::FftwBuffer<fftw_complex> buf(data.size());
  detail::Plan plan(fftw_plan_dft_1d(n, buf.data, buf.data, forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE));
  if (!plan) {
    throw std::runtime_error("fftw: dft plan creation failed");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    buf.data[i][0] = data[i].real();
    buf.data[i][1] = data[i].imag();
  }
  fftw_execute(plan.get());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = {buf.data[i][0], buf.data[i][1]};
  }
}

}  // namespace qpot::fft
