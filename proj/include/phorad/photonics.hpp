// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phorad/dsp.hpp"
#include "phorad/fft.hpp"
#include "phorad/types.hpp"

namespace phorad {

// Push-pull Mach-Zehnder modulator. bias_phase = pi is the transmission
// null; arm_imbalance is a residual static phase error on one arm, which
// leaks carrier and even-order sidebands through the null.
struct MzmSpec {
  double v_pi = 3.0;            // V, half-wave voltage
  double bias_phase = pi;       // rad
  double arm_imbalance = 0.0;   // rad
  double insertion_loss = 0.0;  // dB

  double field_loss() const { return from_db_amplitude(-insertion_loss); }

  void validate() const {
    if (!(v_pi > 0.0))
      throw config_error("MzmSpec: v_pi must be > 0");
    if (insertion_loss < 0.0)
      throw config_error("MzmSpec: insertion_loss must be >= 0");
  }
};

// All-pass micro-ring resonator, characterized by self-coupling t and
// round-trip field transmission a. |H| has a notch at each resonance.
struct MrrSpec {
  double fsr = 70.86e9;          // Hz
  double self_coupling = 0.97;   // t
  double round_trip_amplitude = 0.94; // a
  double resonance_offset = 0.0; // Hz, nearest resonance relative to carrier

  void validate() const {
    if (!(fsr > 0.0))
      throw config_error("MrrSpec: fsr must be > 0");
    if (!(self_coupling > 0.0 && self_coupling < 1.0))
      throw config_error("MrrSpec: self_coupling must be in (0,1)");
    if (!(round_trip_amplitude > 0.0 && round_trip_amplitude <= 1.0))
      throw config_error("MrrSpec: round_trip_amplitude must be in (0,1]");
  }
};

struct PdSpec {
  double responsivity = 0.8; // A/W
  double bandwidth = 30e9;   // Hz, post-detection low-pass cutoff

  void validate() const {
    if (!(responsivity > 0.0))
      throw config_error("PdSpec: responsivity must be > 0");
    if (!(bandwidth > 0.0))
      throw config_error("PdSpec: bandwidth must be > 0");
  }
};

inline double carrier_freq_from_wavelength(double wavelength_m) {
  return speed_of_light / wavelength_m;
}

// FSR in Hz from an FSR quoted in wavelength terms: c*dlambda/lambda^2.
inline double fsr_from_wavelength(double wavelength_m, double fsr_wavelength_m) {
  return speed_of_light * fsr_wavelength_m / (wavelength_m * wavelength_m);
}

inline OpticalEnvelope cw_source(double power_w, double carrier_freq, double duration,
                                 double sample_rate) {
  if (power_w < 0.0)
    throw config_error("cw_source: power must be >= 0");
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  OpticalEnvelope env;
  env.sample_rate = sample_rate;
  env.carrier_freq = carrier_freq;
  env.samples.assign(n, cplx(std::sqrt(power_w), 0.0));
  return env;
}

// E_out = L * E_in * e^{i*delta/2} * cos(theta(t) + (phi_b - delta)/2),
// theta(t) = pi*v(t)/(2*v_pi). At the null (phi_b = pi, delta = 0) this is
// -L*E_in*sin(theta): odd-order sidebands only, carrier fully suppressed.
inline OpticalEnvelope mzm_modulate(const OpticalEnvelope& field, const RealSignal& drive,
                                    const MzmSpec& spec) {
  spec.validate();
  if (field.samples.size() != drive.samples.size())
    throw std::invalid_argument("mzm_modulate: field/drive length mismatch");
  if (field.sample_rate != drive.sample_rate)
    throw std::invalid_argument("mzm_modulate: field/drive sample_rate mismatch");
  const double scale = pi / (2.0 * spec.v_pi);
  const double bias = 0.5 * (spec.bias_phase - spec.arm_imbalance);
  const cplx gain = spec.field_loss() *
                    std::exp(cplx(0.0, 0.5 * spec.arm_imbalance));
  OpticalEnvelope out;
  out.sample_rate = field.sample_rate;
  out.carrier_freq = field.carrier_freq;
  out.samples.resize(field.samples.size());
  for (std::size_t i = 0; i < field.samples.size(); ++i)
    out.samples[i] = field.samples[i] * gain * std::cos(scale * drive.samples[i] + bias);
  return out;
}

namespace detail {

inline double bessel_jn(int n, double x) {
  const int an = n < 0 ? -n : n;
  double j = std::cyl_bessel_j(static_cast<double>(an), x);
  if (n < 0 && (an % 2) != 0)
    j = -j;
  return j;
}

} // namespace detail

// Closed-form sideband coefficient of a sinusoidally driven MZM with
// modulation index m (theta(t) = m*cos(omega*t)): Jacobi-Anger expansion of
// e^{i*delta/2} * cos(m*cos(omega*t) + psi), psi = (phi_b - delta)/2.
// Returns the complex field amplitude of sideband n per unit input field
// (insertion loss excluded). Serves as the independent oracle for
// mzm_modulate's FFT-measured sidebands.
inline cplx mzm_sideband_oracle(double m, int n, double bias_phase, double arm_imbalance) {
  if (n > 50 || n < -50)
    throw std::invalid_argument("mzm_sideband_oracle: |n| <= 50");
  const double psi = 0.5 * (bias_phase - arm_imbalance);
  const cplx in = std::pow(cplx(0.0, 1.0), n);
  const cplx imn = std::pow(cplx(0.0, -1.0), n);
  const cplx phase = std::exp(cplx(0.0, 0.5 * arm_imbalance));
  return phase * 0.5 * detail::bessel_jn(n, m) *
         (in * std::exp(cplx(0.0, psi)) + imn * std::exp(cplx(0.0, -psi)));
}

// Ring transfer at a detuning from the carrier:
// H(phi) = (t - a*e^{i*phi}) / (1 - t*a*e^{i*phi}),
// phi = 2*pi*(detuning - resonance_offset)/fsr.
inline cplx mrr_transfer(const MrrSpec& spec, double detuning) {
  const double t = spec.self_coupling;
  const double a = spec.round_trip_amplitude;
  const double phi = 2.0 * pi * (detuning - spec.resonance_offset) / spec.fsr;
  const cplx z = std::exp(cplx(0.0, phi));
  return (t - a * z) / (1.0 - t * a * z);
}

inline double mrr_min_transmission(const MrrSpec& s) {
  return std::abs(s.self_coupling - s.round_trip_amplitude) /
         (1.0 - s.self_coupling * s.round_trip_amplitude);
}

inline double mrr_max_transmission(const MrrSpec& s) {
  return (s.self_coupling + s.round_trip_amplitude) /
         (1.0 + s.self_coupling * s.round_trip_amplitude);
}

// Unbounded at critical coupling (a == t).
inline double mrr_extinction_db(const MrrSpec& s) {
  const double hmin = mrr_min_transmission(s);
  if (hmin == 0.0)
    return std::numeric_limits<double>::infinity();
  return db_amplitude(mrr_max_transmission(s) / hmin);
}

// Full width of the notch at half depth in power: |H|^2 = (Hmin^2+Hmax^2)/2.
inline double mrr_fwhm(const MrrSpec& s) {
  const double hmin2 = mrr_min_transmission(s) * mrr_min_transmission(s);
  const double hmax2 = mrr_max_transmission(s) * mrr_max_transmission(s);
  const double target = 0.5 * (hmin2 + hmax2);
  // |H(phi)|^2 is monotone in cos(phi); bisect on phi in (0, pi)
  const double t = s.self_coupling, a = s.round_trip_amplitude;
  auto h2 = [&](double phi) {
    const double c = std::cos(phi);
    return (t * t + a * a - 2.0 * t * a * c) / (1.0 + t * t * a * a - 2.0 * t * a * c);
  };
  double lo = 0.0, hi = pi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h2(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 2.0 * (0.5 * (lo + hi)) * s.fsr / (2.0 * pi);
}

// Back-solve (t, a) from the measurable quantities the device reports:
// extinction ratio and notch width. The magnitude response is symmetric in
// t <-> a, so the under-coupled representative (t >= a) is returned.
inline MrrSpec mrr_solve(double fsr, double er_db, double fwhm, double resonance_offset = 0.0) {
  if (!(fsr > 0.0))
    throw solve_error("mrr_solve: fsr must be > 0");
  if (!(er_db > 0.0) || !std::isfinite(er_db))
    throw solve_error("mrr_solve: extinction ratio must be finite and > 0");
  if (!(fwhm > 0.0 && fwhm < 0.5 * fsr))
    throw solve_error("mrr_solve: fwhm must be in (0, fsr/2)");

  const double g2 = from_db_power(er_db); // (Hmax/Hmin)^2
  // With S = t^2 + a^2 and u = t*a, the ER constraint is linear in S:
  auto s_of_u = [&](double u) {
    const double num = g2 * (1.0 + u) * (1.0 + u) + (1.0 - u) * (1.0 - u);
    const double den = g2 * (1.0 + u) * (1.0 + u) - (1.0 - u) * (1.0 - u);
    return 2.0 * u * num / den;
  };
  const double cos_h = std::cos(pi * fwhm / fsr);
  auto width_mismatch = [&](double u) {
    const double s = s_of_u(u);
    const double hmin2 = (s - 2.0 * u) / ((1.0 - u) * (1.0 - u));
    const double hmax2 = (s + 2.0 * u) / ((1.0 + u) * (1.0 + u));
    const double half = 0.5 * (hmin2 + hmax2);
    const double h2 = (s - 2.0 * u * cos_h) / (1.0 + u * u - 2.0 * u * cos_h);
    return h2 - half; // > 0 when the notch is narrower than requested
  };

  // bracket the root in u = t*a
  double lo = 1e-9, hi = 1.0 - 1e-12;
  double flo = width_mismatch(lo);
  double fhi = width_mismatch(hi);
  if (flo * fhi > 0.0)
    throw solve_error("mrr_solve: no (t, a) in (0,1) matches the requested ER/FWHM");
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = width_mismatch(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double u = 0.5 * (lo + hi);
  const double s = s_of_u(u);
  const double sum = std::sqrt(s + 2.0 * u);
  const double dif = std::sqrt(std::max(0.0, s - 2.0 * u));
  MrrSpec spec;
  spec.fsr = fsr;
  spec.resonance_offset = resonance_offset;
  spec.self_coupling = 0.5 * (sum + dif);
  spec.round_trip_amplitude = 0.5 * (sum - dif);
  if (!(spec.self_coupling > 0.0 && spec.self_coupling < 1.0) ||
      !(spec.round_trip_amplitude > 0.0 && spec.round_trip_amplitude <= 1.0))
    throw solve_error("mrr_solve: solution leaves the feasible (t, a) region");
  return spec;
}

// Frequency-domain multiply of the envelope spectrum by H(detuning).
inline OpticalEnvelope mrr_filter(const OpticalEnvelope& field, const MrrSpec& spec) {
  spec.validate();
  if (field.samples.empty())
    throw std::invalid_argument("mrr_filter: empty field");
  OpticalEnvelope out = field;
  fft::forward(out.samples);
  const std::size_t n = out.samples.size();
  const double df = field.sample_rate / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    // bins above n/2 are negative detunings
    const double f = (i <= n / 2) ? static_cast<double>(i) * df
                                  : (static_cast<double>(i) - static_cast<double>(n)) * df;
    out.samples[i] *= mrr_transfer(spec, f);
  }
  fft::inverse(out.samples);
  return out;
}

// Ideal lossless coupler: power_ratio into the first output.
inline std::pair<OpticalEnvelope, OpticalEnvelope> split(const OpticalEnvelope& field,
                                                         double power_ratio) {
  if (!(power_ratio > 0.0 && power_ratio < 1.0))
    throw std::invalid_argument("split: power_ratio must be in (0,1)");
  OpticalEnvelope a = field, b = field;
  const double ga = std::sqrt(power_ratio);
  const double gb = std::sqrt(1.0 - power_ratio);
  for (cplx& v : a.samples)
    v *= ga;
  for (cplx& v : b.samples)
    v *= gb;
  return {std::move(a), std::move(b)};
}

// i(t) = R*|E(t)|^2, low-passed by a 4th-order Butterworth magnitude mask at
// pd.bandwidth (zero phase). Square-law detection doubles the chirp: a
// two-line field at +-f beats to a tone at 2f.
inline RealSignal photodetect(const OpticalEnvelope& field, const PdSpec& pd) {
  pd.validate();
  RealSignal out;
  out.sample_rate = field.sample_rate;
  out.samples.resize(field.samples.size());
  for (std::size_t i = 0; i < field.samples.size(); ++i)
    out.samples[i] = pd.responsivity * std::norm(field.samples[i]);
  if (out.samples.empty())
    return out;
  const std::size_t n = out.samples.size();
  std::vector<cplx> spec = fft::real_forward(out.samples);
  const double df = out.sample_rate / static_cast<double>(n);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] *= butterworth_lowpass_mag(static_cast<double>(i) * df, pd.bandwidth, 4);
  out.samples = fft::real_inverse(std::move(spec), n);
  return out;
}

// Zero-phase electrical band-pass (Butterworth magnitude masks on both
// edges); bin 0 is nulled by the high-pass, i.e. the output is AC coupled.
inline RealSignal bandpass_filter(const RealSignal& sig, double f_lo, double f_hi, int order) {
  if (!(f_lo > 0.0 && f_lo < f_hi))
    throw std::invalid_argument("bandpass_filter: need 0 < f_lo < f_hi");
  RealSignal out;
  out.sample_rate = sig.sample_rate;
  out.t0 = sig.t0;
  const std::size_t n = sig.samples.size();
  std::vector<cplx> spec = fft::real_forward(sig.samples);
  const double df = sig.sample_rate / static_cast<double>(n);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] *= butterworth_bandpass_mag(static_cast<double>(i) * df, f_lo, f_hi, order);
  out.samples = fft::real_inverse(std::move(spec), n);
  return out;
}

// 10*log10(P_sideband / P_carrier) from the envelope spectrum: positive
// means the carrier sits below the (upper) modulation sideband band.
inline double carrier_suppression_db(const OpticalEnvelope& env, double sideband_lo,
                                     double sideband_hi, double carrier_halfwidth) {
  std::vector<cplx> spec = env.samples;
  fft::forward(spec);
  const std::size_t n = spec.size();
  const double df = env.sample_rate / static_cast<double>(n);
  double p_car = 0.0, p_side = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (i <= n / 2) ? static_cast<double>(i) * df
                                  : (static_cast<double>(i) - static_cast<double>(n)) * df;
    const double p = std::norm(spec[i]);
    if (std::abs(f) <= carrier_halfwidth)
      p_car += p;
    else if (f >= sideband_lo && f <= sideband_hi)
      p_side += p;
  }
  return db_power(p_side + 1e-300) - db_power(p_car + 1e-300);
}

// Optional, seeded additive complex Gaussian noise hook (off by default —
// the reference signal path is noiseless).
inline void add_gaussian_noise(OpticalEnvelope& env, double sigma_field, std::uint64_t seed) {
  if (sigma_field <= 0.0)
    return;
  GaussianRng rng(seed);
  for (cplx& v : env.samples)
    v += cplx(sigma_field * rng(), sigma_field * rng());
}

} // namespace phorad
