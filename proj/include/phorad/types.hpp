// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace phorad {

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0; // m/s, exact
inline constexpr double pi = 3.141592653589793238462643383279502884;

// Requested sampling grid cannot represent the signal (Nyquist violations,
// aliased de-chirp tones, non-integer decimation ratios).
class sampling_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration rejected before any computation runs.
class config_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No qualifying spectral peak in a profile.
class peak_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric solve has no solution in the feasible parameter region.
class solve_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_power(double linear) { return 10.0 * std::log10(linear); }
inline double db_amplitude(double linear) { return 20.0 * std::log10(linear); }
inline double from_db_power(double db) { return std::pow(10.0, db / 10.0); }
inline double from_db_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// Intermediate-frequency LFM chirp: f(t) = f0 + k*t over t in [0, duration).
// The chirp rate k is derived, never stored independently.
struct ChirpSpec {
  double f0 = 6e9;          // Hz, start frequency
  double bandwidth = 3e9;   // Hz
  double duration = 100e-6; // s

  double chirp_rate() const { return bandwidth / duration; }

  void validate() const {
    if (!(duration > 0.0))
      throw config_error("ChirpSpec: duration must be > 0");
    if (bandwidth < 0.0)
      throw config_error("ChirpSpec: bandwidth must be >= 0");
    if (f0 < 0.0)
      throw config_error("ChirpSpec: f0 must be >= 0");
  }
};

// Uniformly sampled real-valued signal (drive voltages, photocurrents).
struct RealSignal {
  std::vector<double> samples;
  double sample_rate = 0.0; // Hz
  double t0 = 0.0;          // s, start-time offset

  std::size_t size() const { return samples.size(); }
  double duration() const { return samples.size() / sample_rate; }

  double energy() const {
    double e = 0.0;
    for (double v : samples)
      e += v * v;
    return e;
  }

  double mean_square() const { return samples.empty() ? 0.0 : energy() / samples.size(); }
};

// Complex baseband envelope of the optical field relative to the laser
// carrier. |samples[n]|^2 is instantaneous optical power in watts; the
// envelope spectrum at offset f represents absolute optical frequency
// carrier_freq + f.
struct OpticalEnvelope {
  std::vector<cplx> samples;
  double sample_rate = 0.0;  // Hz, envelope bandwidth window
  double carrier_freq = 0.0; // Hz, absolute optical frequency f_c

  std::size_t size() const { return samples.size(); }
  double duration() const { return samples.size() / sample_rate; }
  double power(std::size_t n) const { return std::norm(samples[n]); }

  double energy() const {
    double e = 0.0;
    for (const cplx& v : samples)
      e += std::norm(v);
    return e;
  }
};

} // namespace phorad
