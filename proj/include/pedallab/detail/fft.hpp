#pragma once

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pedallab::detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

/// Spectral derivative d/dt of real samples f(t_k), t_k uniform over one 2*pi period.
/// The Nyquist mode of an even-length signal is dropped.
///
/// FFTW_ESTIMATE plans on fftw_malloc'd buffers: same size and alignment every
/// call, so the result is bit-reproducible.
inline std::vector<double> spectral_derivative(std::span<const double> f) {
  const std::size_t n = f.size();
  const std::size_t m = n / 2 + 1;
  std::unique_ptr<double, FftwFree> real(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
  const int len = static_cast<int>(n);

  fftw_plan fwd = fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE);
  fftw_plan inv = fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE);
  for (std::size_t k = 0; k < n; ++k) real.get()[k] = f[k];
  fftw_execute(fwd);
  for (std::size_t k = 0; k < m; ++k) {
    fftw_complex& c = spec.get()[k];
    if (n % 2 == 0 && k == n / 2) {
      c[0] = c[1] = 0.0;
      continue;
    }
    // multiply by i k
    const double w = static_cast<double>(k);
    const double re = c[0];
    c[0] = -w * c[1];
    c[1] = w * re;
  }
  fftw_execute(inv);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);

  std::vector<double> out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = real.get()[k] * inv_n;
  return out;
}

}  // namespace pedallab::detail
