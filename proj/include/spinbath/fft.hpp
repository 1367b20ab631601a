// Thin FFTW wrapper: cached single-row complex transforms.
#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>

#include "spinbath/common.hpp"

namespace spinbath {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fft_planner_mutex() {
  static std::mutex m;
  return m;
}

// Unnormalized forward/backward transforms of length n.  Plans are created
// on 64-byte aligned buffers; rows shorter than four complex values are
// planned unaligned so any row stride works.
class RowFft {
 public:
  explicit RowFft(std::size_t n) : n_(n) {
    cvector a(n), b(n);
    unsigned flags = FFTW_ESTIMATE;
    if ((n * sizeof(cplx)) % 64 != 0) flags |= FFTW_UNALIGNED;
    std::scoped_lock lock(fft_planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()),
                            FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(a.data()),
                            FFTW_BACKWARD, flags);
    if (fwd_ == nullptr || bwd_ == nullptr)
      throw numerical_error("RowFft: plan creation failed");
  }
  ~RowFft() {
    std::scoped_lock lock(fft_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  RowFft(const RowFft&) = delete;
  RowFft& operator=(const RowFft&) = delete;

  std::size_t size() const { return n_; }

  // out = DFT(in), out-of-place; in is preserved.
  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(fwd_,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  // data = IDFT(data), in place, unnormalized (scales by n overall).
  void inverse_inplace(cplx* data) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

 private:
  std::size_t n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// out_row = IDFT(scale .* DFT(in_row)) for each of `rows` contiguous rows.
// `scale` must already carry the 1/n normalization.
inline void apply_spectral_scale_rows(const RowFft& fft, const double* scale,
                                      std::size_t rows, const cplx* in,
                                      cplx* out) {
  const std::size_t n = fft.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const cplx* src = in + r * n;
    cplx* dst = out + r * n;
    fft.forward(src, dst);
    for (std::size_t i = 0; i < n; ++i) dst[i] *= scale[i];
    fft.inverse_inplace(dst);
  }
}

}  // namespace spinbath
