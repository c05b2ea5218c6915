// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phorad/types.hpp"

namespace phorad {

enum class Window { rect, hann };

inline std::string window_name(Window w) { return w == Window::rect ? "rect" : "hann"; }

inline Window window_from_name(const std::string& s) {
  if (s == "rect" || s == "rectangular")
    return Window::rect;
  if (s == "hann")
    return Window::hann;
  throw config_error("unknown window '" + s + "' (expected rect|hann)");
}

// Periodic window forms, so tone estimates on integer-bin inputs are exact.
inline std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> win(n, 1.0);
  if (w == Window::hann) {
    for (std::size_t i = 0; i < n; ++i)
      win[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return win;
}

// Equivalent noise bandwidth in bins: N*sum(w^2)/sum(w)^2.
inline double window_enbw_bins(Window w) { return w == Window::rect ? 1.0 : 1.5; }

inline double window_coherent_gain(Window w) { return w == Window::rect ? 1.0 : 0.5; }

// 3-point parabolic refinement around a local maximum of y at index i.
// Returns the fractional-bin offset in [-0.5, 0.5] and the refined value.
struct ParabolicPeak {
  double offset = 0.0;
  double value = 0.0;
};

inline ParabolicPeak parabolic_refine(std::span<const double> y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size())
    return {0.0, y[i]};
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom == 0.0)
    return {0.0, y1};
  double d = 0.5 * (y0 - y2) / denom;
  d = std::clamp(d, -0.5, 0.5);
  return {d, y1 - 0.25 * (y0 - y2) * d};
}

// Moving average with edge correction (partial windows renormalized).
inline std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n == 0 || len <= 1) {
    std::copy(x.begin(), x.end(), out.begin());
    return out;
  }
  const std::size_t half = len / 2;
  // prefix sums
  std::vector<double> ps(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    ps[i + 1] = ps[i] + x[i];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n, i + (len - half));
    out[i] = (ps[hi] - ps[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

// Butterworth magnitude masks for zero-phase frequency-domain filtering.
inline double butterworth_lowpass_mag(double f, double cutoff, int order) {
  const double r = std::abs(f) / cutoff;
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

inline double butterworth_highpass_mag(double f, double cutoff, int order) {
  const double af = std::abs(f);
  if (af == 0.0)
    return 0.0;
  // evaluate in log domain; (cutoff/f)^(2*order) overflows for f << cutoff
  const double lg = 2.0 * order * std::log(cutoff / af);
  if (lg > 600.0)
    return 0.0;
  return 1.0 / std::sqrt(1.0 + std::exp(lg));
}

inline double butterworth_bandpass_mag(double f, double lo, double hi, int order) {
  return butterworth_highpass_mag(f, lo, order) * butterworth_lowpass_mag(f, hi, order);
}

// DTFT of x at a single frequency (Goertzel-style direct sum).
inline cplx dtft_at(std::span<const double> x, double sample_rate, double freq) {
  const double w = -2.0 * pi * freq / sample_rate;
  cplx acc = 0.0;
  // phase recurrence via complex multiply keeps this O(n) without trig calls
  const cplx step(std::cos(w), std::sin(w));
  cplx ph(1.0, 0.0);
  for (double v : x) {
    acc += v * ph;
    ph *= step;
  }
  return acc;
}

// Deterministic Gaussian deviates (Box-Muller over a splitmix/xoshiro-free
// mt19937_64 stream); avoids std::normal_distribution, whose sequence is
// implementation-defined.
class GaussianRng {
public:
  explicit GaussianRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  double uniform() { // in [0, 1)
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

private:
  std::uint64_t next() { // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace phorad
