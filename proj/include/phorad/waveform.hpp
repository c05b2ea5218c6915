// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "phorad/dsp.hpp"
#include "phorad/fft.hpp"
#include "phorad/types.hpp"

namespace phorad {

// v(t) = A*cos(2*pi*(f0*t + k*t^2/2)) sampled over [0, duration).
inline RealSignal synth_lfm(const ChirpSpec& spec, double sample_rate, double amplitude = 1.0) {
  spec.validate();
  if (!(sample_rate > 2.0 * (spec.f0 + spec.bandwidth)))
    throw sampling_error("synth_lfm: sample_rate below Nyquist for the IF chirp top frequency");
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * sample_rate));
  RealSignal sig;
  sig.sample_rate = sample_rate;
  sig.samples.resize(n);
  const double k = spec.chirp_rate();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    sig.samples[i] = amplitude * std::cos(2.0 * pi * (spec.f0 * t + 0.5 * k * t * t));
  }
  return sig;
}

inline double instantaneous_frequency(const ChirpSpec& spec, double t) {
  if (t < 0.0 || t > spec.duration)
    throw std::out_of_range("instantaneous_frequency: t outside [0, duration]");
  return spec.f0 + spec.chirp_rate() * t;
}

// One-sided periodogram normalized so the linear bins sum to the mean square
// of the input (Parseval). A unit-amplitude bin-centered tone reads -3.01 dB.
struct PowerSpectrum {
  std::vector<double> freq;  // Hz
  std::vector<double> power; // linear
  double bin_width = 0.0;

  std::vector<double> power_db() const {
    std::vector<double> out(power.size());
    for (std::size_t i = 0; i < power.size(); ++i)
      out[i] = db_power(power[i] + 1e-300);
    return out;
  }
};

inline PowerSpectrum power_spectrum(const RealSignal& sig) {
  if (sig.samples.empty())
    throw std::invalid_argument("power_spectrum: empty signal");
  const std::size_t n = sig.samples.size();
  std::vector<cplx> spec = fft::real_forward(sig.samples);
  PowerSpectrum ps;
  ps.bin_width = sig.sample_rate / static_cast<double>(n);
  ps.freq.resize(spec.size());
  ps.power.resize(spec.size());
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    ps.freq[i] = static_cast<double>(i) * ps.bin_width;
    const bool interior = i > 0 && !(n % 2 == 0 && i == spec.size() - 1);
    ps.power[i] = (interior ? 2.0 : 1.0) * std::norm(spec[i]) * norm;
  }
  return ps;
}

struct Spectrogram {
  std::vector<double> magnitude; // row-major [time][freq], linear amplitude
  std::vector<double> time_axis; // s, window centers
  std::vector<double> freq_axis; // Hz
  std::size_t window_length = 0;
  std::size_t hop = 0;

  std::size_t n_times() const { return time_axis.size(); }
  std::size_t n_freqs() const { return freq_axis.size(); }
  double at(std::size_t ti, std::size_t fi) const { return magnitude[ti * n_freqs() + fi]; }
};

inline Spectrogram stft(const RealSignal& sig, std::size_t window_length, std::size_t hop,
                        Window window = Window::hann) {
  if (window_length > sig.samples.size())
    throw std::invalid_argument("stft: window longer than signal");
  if (hop == 0)
    throw std::invalid_argument("stft: hop must be > 0");
  const std::size_t n_cols = (sig.samples.size() - window_length) / hop + 1;
  const std::size_t n_bins = window_length / 2 + 1;
  const std::vector<double> win = make_window(window, window_length);
  double wsum = 0.0;
  for (double w : win)
    wsum += w;

  Spectrogram sg;
  sg.window_length = window_length;
  sg.hop = hop;
  sg.freq_axis.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i)
    sg.freq_axis[i] = static_cast<double>(i) * sig.sample_rate / static_cast<double>(window_length);
  sg.time_axis.resize(n_cols);
  sg.magnitude.resize(n_cols * n_bins);

  std::vector<double> frame(window_length);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const std::size_t start = c * hop;
    sg.time_axis[c] = (static_cast<double>(start) + 0.5 * static_cast<double>(window_length)) /
                      sig.sample_rate;
    for (std::size_t i = 0; i < window_length; ++i)
      frame[i] = sig.samples[start + i] * win[i];
    std::vector<cplx> spec = fft::real_forward(frame);
    // scale so a full-scale tone reads ~its amplitude
    const double scale = 2.0 / wsum;
    for (std::size_t i = 0; i < n_bins; ++i)
      sg.magnitude[c * n_bins + i] = scale * std::abs(spec[i]);
  }
  return sg;
}

// Per-column peak frequency, parabolic-refined on the dB magnitude.
inline std::vector<double> spectrogram_ridge(const Spectrogram& sg) {
  std::vector<double> ridge(sg.n_times());
  std::vector<double> coldb(sg.n_freqs());
  for (std::size_t c = 0; c < sg.n_times(); ++c) {
    std::size_t imax = 0;
    for (std::size_t i = 0; i < sg.n_freqs(); ++i) {
      coldb[i] = db_amplitude(sg.at(c, i) + 1e-300);
      if (coldb[i] > coldb[imax])
        imax = i;
    }
    const ParabolicPeak p = parabolic_refine(coldb, imax);
    const double df = sg.freq_axis[1] - sg.freq_axis[0];
    ridge[c] = sg.freq_axis[imax] + p.offset * df;
  }
  return ridge;
}

// Least-squares slope of the ridge over the interior fraction of columns.
inline double ridge_slope(const Spectrogram& sg, double interior_fraction = 0.9) {
  const std::vector<double> ridge = spectrogram_ridge(sg);
  const std::size_t n = ridge.size();
  const auto skip = static_cast<std::size_t>(std::floor(0.5 * (1.0 - interior_fraction) *
                                                        static_cast<double>(n)));
  const std::size_t lo = skip, hi = n - skip;
  if (hi - lo < 2)
    throw std::invalid_argument("ridge_slope: not enough columns");
  double st = 0.0, sf = 0.0, stt = 0.0, stf = 0.0;
  const auto m = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    st += sg.time_axis[i];
    sf += ridge[i];
    stt += sg.time_axis[i] * sg.time_axis[i];
    stf += sg.time_axis[i] * ridge[i];
  }
  return (m * stf - st * sf) / (m * stt - st * st);
}

namespace detail {

inline std::pair<std::size_t, std::size_t> band_indices(const PowerSpectrum& ps, double f_lo,
                                                        double f_hi) {
  if (!(f_lo < f_hi) || f_hi < ps.freq.front() || f_lo > ps.freq.back())
    throw std::invalid_argument("band outside the spectrum span");
  const auto lo = static_cast<std::size_t>(
      std::lower_bound(ps.freq.begin(), ps.freq.end(), f_lo) - ps.freq.begin());
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(ps.freq.begin(), ps.freq.end(), f_hi) - ps.freq.begin());
  if (hi <= lo)
    throw std::invalid_argument("empty band");
  return {lo, hi};
}

} // namespace detail

// Half peak-to-peak ripple (dB) of the smoothed in-band power.
inline double measure_flatness(const PowerSpectrum& ps, double f_lo, double f_hi,
                               std::size_t smooth_bins = 100) {
  const auto [lo, hi] = detail::band_indices(ps, f_lo, f_hi);
  const std::vector<double> sm = moving_average(ps.power, smooth_bins);
  double mx = -1e300, mn = 1e300;
  for (std::size_t i = lo; i < hi; ++i) {
    const double v = db_power(sm[i] + 1e-300);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  return 0.5 * (mx - mn);
}

// In-band mean power (dB) minus the strongest smoothed out-of-band bin.
// Out-of-band starts guard_fraction of the band width beyond each edge so the
// finite-pulse turn-on/off skirt is not counted as a spur.
inline double measure_spur_rejection(const PowerSpectrum& ps, double f_lo, double f_hi,
                                     double guard_fraction = 0.02,
                                     std::size_t smooth_bins = 100) {
  const auto [lo, hi] = detail::band_indices(ps, f_lo, f_hi);
  const std::vector<double> sm = moving_average(ps.power, smooth_bins);
  double mean = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    mean += sm[i];
  mean /= static_cast<double>(hi - lo);
  const double guard = guard_fraction * (f_hi - f_lo);
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < sm.size(); ++i) {
    if (ps.freq[i] >= f_lo - guard && ps.freq[i] <= f_hi + guard)
      continue;
    worst = any ? std::max(worst, sm[i]) : sm[i];
    any = true;
  }
  if (!any)
    throw std::invalid_argument("measure_spur_rejection: no out-of-band bins");
  return db_power(mean + 1e-300) - db_power(worst + 1e-300);
}

struct BandEdges {
  double low = 0.0;  // Hz
  double high = 0.0; // Hz
  double width() const { return high - low; }
};

// Edges where the smoothed spectrum falls drop_db below its plateau.
inline BandEdges find_band_edges(const PowerSpectrum& ps, double drop_db = 6.0,
                                 std::size_t smooth_bins = 100) {
  const std::vector<double> sm = moving_average(ps.power, smooth_bins);
  double peak = 0.0;
  for (double v : sm)
    peak = std::max(peak, v);
  if (peak <= 0.0)
    throw peak_error("find_band_edges: empty spectrum");
  const double thr = peak * from_db_power(-drop_db);
  std::size_t lo = 0, hi = sm.size() - 1;
  while (lo < sm.size() && sm[lo] < thr)
    ++lo;
  while (hi > lo && sm[hi] < thr)
    --hi;
  return {ps.freq[lo], ps.freq[hi]};
}

} // namespace phorad
