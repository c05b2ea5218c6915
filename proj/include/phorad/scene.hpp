// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phorad/fft.hpp"
#include "phorad/types.hpp"

namespace phorad {

// Point scatterer in the turntable frame at theta = 0; x points along the
// radar line of sight (range), y across it.
struct Scatterer {
  double x = 0.0;         // m
  double y = 0.0;         // m
  double amplitude = 1.0; // dimensionless reflectivity

  double radius() const { return std::hypot(x, y); }
};

struct TurntableScene {
  std::vector<Scatterer> scatterers;
  double rotation_rate = 2.0 * pi; // rad/s (360 deg/s)
  double standoff = 1.0;           // m, antenna to turntable center
  double initial_angle = 0.0;      // rad
  bool exact_geometry = false;     // two-way Euclidean distance instead of plane wave
  bool path_loss = false;          // weight reflectivity by (standoff/R)^4

  double max_radius() const {
    double r = 0.0;
    for (const Scatterer& s : scatterers)
      r = std::max(r, s.radius());
    return r;
  }

  void validate() const {
    for (const Scatterer& s : scatterers)
      if (s.amplitude < 0.0)
        throw config_error("Scatterer: amplitude must be >= 0");
    if (!(standoff > max_radius()))
      throw config_error("TurntableScene: standoff must exceed the largest scatterer radius");
  }
};

struct CrosstalkSpec {
  double relative_amplitude_db = -std::numeric_limits<double>::infinity(); // <= 0
  double extra_delay = 0.0; // s, relative to the main path

  bool enabled() const { return std::isfinite(relative_amplitude_db); }

  void validate() const {
    if (relative_amplitude_db > 0.0)
      throw config_error("CrosstalkSpec: relative_amplitude must be <= 0 dB");
  }
};

// Two-way delay of one scatterer at absolute time t, far-field plane-wave
// geometry: tau = 2*(R0 + x*cos(theta) - y*sin(theta))/c, theta = theta0 + w*t.
inline double scatterer_delay(const Scatterer& s, const TurntableScene& scene, double t) {
  const double theta = scene.initial_angle + scene.rotation_rate * t;
  const double xr = s.x * std::cos(theta) - s.y * std::sin(theta);
  if (scene.exact_geometry) {
    const double yr = s.x * std::sin(theta) + s.y * std::cos(theta);
    return 2.0 * std::hypot(scene.standoff + xr, yr) / speed_of_light;
  }
  return 2.0 * (scene.standoff + xr) / speed_of_light;
}

struct Delay {
  double tau = 0.0;       // s
  double amplitude = 1.0; // linear
};

// Stop-and-go: delays frozen at the pulse start time.
inline std::vector<Delay> scene_delays(const TurntableScene& scene, double pulse_start) {
  std::vector<Delay> out;
  out.reserve(scene.scatterers.size());
  for (const Scatterer& s : scene.scatterers) {
    const double tau = scatterer_delay(s, scene, pulse_start);
    double amp = s.amplitude;
    if (scene.path_loss) {
      const double r = 0.5 * tau * speed_of_light;
      amp *= std::pow(scene.standoff / r, 4);
    }
    out.push_back({tau, amp});
  }
  return out;
}

// Sub-sample delays of one transmit pulse, applied as linear phase ramps on
// a zero-padded spectrum (exact for band-limited content; the pad absorbs
// the shifted tail so the circular shift never wraps into the pulse).
// Precomputing the pulse spectrum lets one pulse serve many pulses/scenes.
class EchoSynth {
public:
  explicit EchoSynth(const RealSignal& tx, double max_delay = 8e-6)
      : n_(tx.samples.size()), sample_rate_(tx.sample_rate) {
    const auto pad = static_cast<std::size_t>(std::ceil(max_delay * tx.sample_rate)) + 2;
    nfft_ = fft::next_pow2(n_ + pad);
    spectrum_ = fft::real_forward(tx.samples, nfft_);
    max_delay_ = max_delay;
  }

  RealSignal echo(const std::vector<Delay>& delays) const {
    std::vector<cplx> acc(spectrum_.size(), cplx(0.0, 0.0));
    for (const Delay& d : delays) {
      if (d.tau < 0.0 || d.tau > max_delay_)
        throw std::invalid_argument("EchoSynth: delay outside the padded range");
      accumulate_ramp(acc, d);
    }
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] *= spectrum_[i];
    std::vector<double> full = fft::real_inverse(std::move(acc), nfft_);
    RealSignal out;
    out.sample_rate = sample_rate_;
    out.samples.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n_));
    return out;
  }

  std::size_t size() const { return n_; }

private:
  void accumulate_ramp(std::vector<cplx>& acc, const Delay& d) const {
    const double df = sample_rate_ / static_cast<double>(nfft_);
    const double w = -2.0 * pi * df * d.tau;
    const cplx step(std::cos(w), std::sin(w));
    cplx ph(d.amplitude, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if ((i & 0xffffu) == 0) // resync the recurrence against drift
        ph = d.amplitude * std::exp(cplx(0.0, w * static_cast<double>(i)));
      acc[i] += ph;
      ph *= step;
    }
  }

  std::size_t n_ = 0;
  std::size_t nfft_ = 0;
  double sample_rate_ = 0.0;
  double max_delay_ = 0.0;
  std::vector<cplx> spectrum_;
};

// Superposition of delayed, scaled copies of one transmit pulse.
inline RealSignal synthesize_echo(const RealSignal& tx, const TurntableScene& scene,
                                  double pulse_start) {
  scene.validate();
  if (scene.scatterers.empty()) {
    RealSignal out;
    out.sample_rate = tx.sample_rate;
    out.samples.assign(tx.samples.size(), 0.0);
    return out;
  }
  return EchoSynth(tx).echo(scene_delays(scene, pulse_start));
}

// Single fractional delay of a whole signal (same mechanism as EchoSynth).
inline RealSignal fractional_delay(const RealSignal& sig, double tau) {
  return EchoSynth(sig).echo({{tau, 1.0}});
}

// echo + 10^(dB/20) * tx delayed by (main_delay + extra_delay): RF leakage
// from the transmit probe into the receive modulator.
inline RealSignal inject_crosstalk(const RealSignal& echo, const RealSignal& tx,
                                   const CrosstalkSpec& spec, double main_delay) {
  spec.validate();
  if (echo.samples.size() != tx.samples.size() || echo.sample_rate != tx.sample_rate)
    throw std::invalid_argument("inject_crosstalk: echo/tx geometry mismatch");
  if (!spec.enabled())
    return echo;
  const double g = from_db_amplitude(spec.relative_amplitude_db);
  RealSignal leak = fractional_delay(tx, main_delay + spec.extra_delay);
  RealSignal out = echo;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += g * leak.samples[i];
  return out;
}

// Scatterer list from CSV rows "x_m,y_m,amplitude" (header row optional).
inline std::vector<Scatterer> load_scatterers_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open scene csv: " + path);
  std::vector<Scatterer> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Scatterer s;
    if (!(ss >> s.x >> s.y >> s.amplitude)) {
      // tolerate a single header row
      if (out.empty())
        continue;
      throw config_error("malformed scene csv row: " + line);
    }
    out.push_back(s);
  }
  return out;
}

} // namespace phorad
