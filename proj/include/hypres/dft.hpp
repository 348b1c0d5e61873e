#pragma once

// Fourier coefficients of uniformly sampled periodic data through FFTW.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "hypres/error.hpp"

namespace hypres {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// Samples f(k/N), k = 0..N-1. Returns c with c[k] = (1/N) sum_j f_j e^{-2 pi i j k / N};
// mode n lives at index n mod N.
inline std::vector<std::complex<double>> fourier_coefficients(
    const std::vector<std::complex<double>>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw Error(ErrorKind::input, "no samples");
  std::vector<std::complex<double>> in(samples), out(samples.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double inv = 1.0 / n;
  for (auto& c : out) c *= inv;
  return out;
}

inline std::complex<double> mode(const std::vector<std::complex<double>>& coeffs, long n) {
  const long N = static_cast<long>(coeffs.size());
  return coeffs[static_cast<std::size_t>(((n % N) + N) % N)];
}

}  // namespace hypres
