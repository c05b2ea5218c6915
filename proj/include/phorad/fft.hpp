// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>
#include <vector>

#include "phorad/types.hpp"

// Thin FFTW3 wrappers. Plans are created per call with FFTW_ESTIMATE, which
// is deterministic and cheap for the sizes used here. FFTW's planner is not
// thread safe, so plan creation/destruction is serialized; execution is not.

namespace phorad::fft {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

namespace detail {

class plan_guard {
public:
  explicit plan_guard(fftw_plan p) : plan_(p) {}
  ~plan_guard() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  plan_guard(const plan_guard&) = delete;
  plan_guard& operator=(const plan_guard&) = delete;
  fftw_plan get() const { return plan_; }

private:
  fftw_plan plan_;
};

} // namespace detail

// In-place complex DFT; sign FFTW_FORWARD or FFTW_BACKWARD (unscaled).
inline void transform(std::vector<cplx>& x, int sign) {
  if (x.empty())
    return;
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(x.size()), p, p, sign, FFTW_ESTIMATE);
  }
  detail::plan_guard guard(plan);
  fftw_execute(guard.get());
}

inline void forward(std::vector<cplx>& x) { transform(x, FFTW_FORWARD); }

// Backward transform scaled by 1/N so forward->inverse round-trips.
inline void inverse(std::vector<cplx>& x) {
  transform(x, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(x.size());
  for (cplx& v : x)
    v *= s;
}

// Real-to-complex DFT of x zero-padded (or truncated) to nfft samples.
// Returns nfft/2 + 1 one-sided bins.
inline std::vector<cplx> real_forward(const std::vector<double>& x, std::size_t nfft) {
  std::vector<double> in(nfft, 0.0);
  const std::size_t ncopy = x.size() < nfft ? x.size() : nfft;
  for (std::size_t i = 0; i < ncopy; ++i)
    in[i] = x[i];
  std::vector<cplx> out(nfft / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  detail::plan_guard guard(plan);
  fftw_execute(guard.get());
  return out;
}

inline std::vector<cplx> real_forward(const std::vector<double>& x) {
  return real_forward(x, x.size());
}

// Complex-to-real inverse of a one-sided spectrum (nfft/2 + 1 bins), scaled
// by 1/nfft. The input spectrum is consumed (FFTW c2r destroys its input).
inline std::vector<double> real_inverse(std::vector<cplx> spec, std::size_t nfft) {
  std::vector<double> out(nfft);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(nfft),
                                reinterpret_cast<fftw_complex*>(spec.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  detail::plan_guard guard(plan);
  fftw_execute(guard.get());
  const double s = 1.0 / static_cast<double>(nfft);
  for (double& v : out)
    v *= s;
  return out;
}

} // namespace phorad::fft
