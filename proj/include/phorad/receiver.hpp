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
#include "phorad/photonics.hpp"
#include "phorad/scene.hpp"
#include "phorad/types.hpp"
#include "phorad/waveform.hpp"

namespace phorad {

// De-chirped record: each delay tau in the echo appears as a tone at 2*k*tau.
struct DechirpOutput {
  std::vector<double> samples;
  double sample_rate = 0.0;   // Hz, post-decimation
  double chirp_rate_rf = 0.0; // Hz/s, 2k of the transmitted (doubled) signal
  double pulse_duration = 0.0; // s

  void validate() const {
    if (!(sample_rate * pulse_duration >= 16.0))
      throw config_error("DechirpOutput: record too short to resolve 1/T");
  }
};

// Direct synthesis of the de-chirp products: for each delay,
// amp * cos(2*pi*(2k*tau)*t + phi(tau)) over the overlap window [tau, T),
// with residual video phase phi(tau) = 2*pi*(2*f0*tau - k*tau^2) as produced
// by mixing the doubled chirp against its delayed replica.
inline DechirpOutput dechirp_behavioral(const ChirpSpec& spec, const std::vector<Delay>& delays,
                                        double duration, double out_rate) {
  spec.validate();
  const double k = spec.chirp_rate();
  for (const Delay& d : delays)
    if (!(2.0 * k * d.tau < 0.5 * out_rate))
      throw sampling_error("dechirp_behavioral: de-chirp tone at or above Nyquist");
  DechirpOutput out;
  out.sample_rate = out_rate;
  out.chirp_rate_rf = 2.0 * k;
  out.pulse_duration = duration;
  const auto n = static_cast<std::size_t>(std::llround(duration * out_rate));
  out.samples.assign(n, 0.0);
  for (const Delay& d : delays) {
    const double fb = 2.0 * k * d.tau;
    const double phi = 2.0 * pi * (2.0 * spec.f0 * d.tau - k * d.tau * d.tau);
    const auto start = static_cast<std::size_t>(std::ceil(d.tau * out_rate));
    for (std::size_t i = start; i < n; ++i) {
      const double t = static_cast<double>(i) / out_rate;
      out.samples[i] += d.amplitude * std::cos(2.0 * pi * fb * t + phi);
    }
  }
  out.validate();
  return out;
}

// Physical de-chirp: the echo drives MZM2 (quadrature bias by default), the
// modulated two-line reference is square-law detected on PD2, the
// drive-independent photocurrent is removed (the capture is AC coupled; a
// zero-delay echo still leaves its DC beat term), and the result is
// band-limited and resampled to out_rate. Decimation is a brick-wall
// spectral truncation at 0.45*out_rate: alias-free and exactly reproducible.
inline DechirpOutput dechirp_physical(const OpticalEnvelope& reference,
                                      const RealSignal& echo_rf, const MzmSpec& mzm2,
                                      const PdSpec& pd2, double out_rate,
                                      double chirp_rate_rf) {
  if (reference.samples.size() != echo_rf.samples.size() ||
      reference.sample_rate != echo_rf.sample_rate)
    throw std::invalid_argument("dechirp_physical: reference/echo geometry mismatch");
  const double fs = reference.sample_rate;
  const double ratio = fs / out_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw sampling_error("dechirp_physical: sample_rate must be an integer multiple of out_rate");
  const std::size_t n = echo_rf.samples.size();
  const auto dec = static_cast<std::size_t>(std::llround(ratio));
  const std::size_t n_out = n / dec;

  const OpticalEnvelope modulated = mzm_modulate(reference, echo_rf, mzm2);
  // photocurrent minus the zero-drive baseline
  const double base_gain = mzm2.field_loss() * std::cos(0.5 * (mzm2.bias_phase - mzm2.arm_imbalance));
  const double base = base_gain * base_gain;
  std::vector<double> current(n);
  for (std::size_t i = 0; i < n; ++i)
    current[i] = pd2.responsivity *
                 (std::norm(modulated.samples[i]) - base * std::norm(reference.samples[i]));

  std::vector<cplx> spec = fft::real_forward(current);
  std::vector<cplx> kept(n_out / 2 + 1);
  const double df = fs / static_cast<double>(n);
  const double cutoff = 0.45 * out_rate;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double f = static_cast<double>(i) * df;
    kept[i] = (f > cutoff) ? cplx(0.0, 0.0)
                           : spec[i] * butterworth_lowpass_mag(f, pd2.bandwidth, 4);
  }
  DechirpOutput out;
  out.sample_rate = out_rate;
  out.chirp_rate_rf = chirp_rate_rf;
  out.pulse_duration = static_cast<double>(n) / fs;
  out.samples = fft::real_inverse(std::move(kept), n_out);
  const double rescale = static_cast<double>(n_out) / static_cast<double>(n);
  for (double& v : out.samples)
    v *= rescale;
  out.validate();
  return out;
}

// Windowed, zero-padded one-sided spectrum of the record; shared by the
// range profile and the ISAR profile matrix (which needs the phase).
inline std::vector<cplx> complex_range_spectrum(const DechirpOutput& d, Window window,
                                                std::size_t nfft = 0) {
  const std::size_t n = d.samples.size();
  if (n == 0)
    throw std::invalid_argument("complex_range_spectrum: empty record");
  if (nfft == 0)
    nfft = 8 * fft::next_pow2(n);
  const std::vector<double> win = make_window(window, n);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i)
    buf[i] = d.samples[i] * win[i];
  return fft::real_forward(buf, nfft);
}

// Range profile: de-chirp spectrum with the frequency axis scaled to meters
// by range_scale = c*T/(2B) = c/(2*chirp_rate_rf). Magnitudes are stored in
// dB relative to the profile peak.
struct RangeProfile {
  std::vector<double> freq_axis;    // Hz
  std::vector<double> magnitude_db; // dB re peak
  double range_scale = 0.0;         // m/Hz
  Window window = Window::rect;
  double record_duration = 0.0;     // s, for the resolution floor

  double range_at(double freq) const { return freq * range_scale; }
};

inline RangeProfile range_profile(const DechirpOutput& d, Window window = Window::rect,
                                  std::size_t nfft = 0) {
  const std::vector<cplx> spec = complex_range_spectrum(d, window, nfft);
  RangeProfile p;
  p.window = window;
  p.range_scale = speed_of_light / (2.0 * d.chirp_rate_rf);
  p.record_duration = static_cast<double>(d.samples.size()) / d.sample_rate;
  const std::size_t nb = spec.size();
  const double df = d.sample_rate / static_cast<double>(2 * (nb - 1));
  p.freq_axis.resize(nb);
  p.magnitude_db.resize(nb);
  double peak = 0.0;
  for (const cplx& v : spec)
    peak = std::max(peak, std::abs(v));
  if (peak <= 0.0)
    peak = 1.0;
  for (std::size_t i = 0; i < nb; ++i) {
    p.freq_axis[i] = static_cast<double>(i) * df;
    p.magnitude_db[i] = db_amplitude(std::abs(spec[i]) / peak + 1e-300);
  }
  return p;
}

inline double resolution_from_width(double width_3db, double range_scale) {
  if (width_3db < 0.0)
    throw std::invalid_argument("resolution_from_width: width must be >= 0");
  return width_3db * range_scale;
}

struct PeakReport {
  double peak_freq = 0.0;  // Hz, interpolated
  double range = 0.0;      // m
  double width_3db = 0.0;  // Hz
  double resolution = 0.0; // m
  double slsr = 0.0;       // dB
};

namespace detail {

// interpolated -3 dB crossing walking from the peak in one direction
inline double half_power_crossing(const RangeProfile& p, std::size_t ip, double peak_db,
                                  int dir) {
  const double target = peak_db - 3.0;
  std::size_t i = ip;
  while (true) {
    const std::size_t next = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + dir);
    if (next >= p.magnitude_db.size())
      return p.freq_axis[i];
    if (p.magnitude_db[next] <= target) {
      const double f1 = p.freq_axis[i], f2 = p.freq_axis[next];
      const double d1 = p.magnitude_db[i], d2 = p.magnitude_db[next];
      return f1 + (target - d1) * (f2 - f1) / (d2 - d1);
    }
    i = next;
  }
}

// main-lobe extent: walk downhill until the profile rises again
inline std::pair<std::size_t, std::size_t> main_lobe(const RangeProfile& p, std::size_t ip) {
  std::size_t lo = ip, hi = ip;
  while (hi + 1 < p.magnitude_db.size() && p.magnitude_db[hi + 1] <= p.magnitude_db[hi])
    ++hi;
  while (lo > 0 && p.magnitude_db[lo - 1] <= p.magnitude_db[lo])
    --lo;
  return {lo, hi};
}

} // namespace detail

// Peak frequency by parabolic interpolation on the dB magnitude; width by
// linear interpolation of the -3 dB crossings; SLSR against the highest
// local maximum outside the main lobe. The resolution is the
// equivalent-noise-bandwidth floor of the record (1/T_rec for a rectangular
// window): the interpolated -3 dB width of a single tone understates what a
// finite record can actually separate.
inline PeakReport estimate_peak(const RangeProfile& p) {
  if (p.magnitude_db.empty())
    throw peak_error("estimate_peak: empty profile");
  const std::size_t ip = static_cast<std::size_t>(
      std::max_element(p.magnitude_db.begin(), p.magnitude_db.end()) - p.magnitude_db.begin());
  std::vector<double> sorted = p.magnitude_db;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double floor_db = sorted[sorted.size() / 2];
  if (p.magnitude_db[ip] - floor_db < 10.0)
    throw peak_error("estimate_peak: no peak at least 10 dB above the noise floor");

  const ParabolicPeak pk = parabolic_refine(p.magnitude_db, ip);
  const double df = p.freq_axis[1] - p.freq_axis[0];
  PeakReport r;
  r.peak_freq = p.freq_axis[ip] + pk.offset * df;
  r.range = r.peak_freq * p.range_scale;
  r.width_3db = detail::half_power_crossing(p, ip, pk.value, +1) -
                detail::half_power_crossing(p, ip, pk.value, -1);
  r.resolution = resolution_from_width(window_enbw_bins(p.window) / p.record_duration,
                                       p.range_scale);
  const auto [lo, hi] = detail::main_lobe(p, ip);
  double best = -1e300;
  for (std::size_t i = 0; i < p.magnitude_db.size(); ++i) {
    if (i >= lo && i <= hi)
      continue;
    const bool up = i == 0 || p.magnitude_db[i] >= p.magnitude_db[i - 1];
    const bool down = i + 1 == p.magnitude_db.size() || p.magnitude_db[i] >= p.magnitude_db[i + 1];
    if (up && down)
      best = std::max(best, p.magnitude_db[i]);
  }
  r.slsr = pk.value - best;
  return r;
}

// Main-peak level minus the strongest bin outside +-exclusion of the peak.
inline double measure_slsr(const RangeProfile& p, double exclusion) {
  if (exclusion < 0.0)
    throw std::invalid_argument("measure_slsr: exclusion must be >= 0");
  const std::size_t ip = static_cast<std::size_t>(
      std::max_element(p.magnitude_db.begin(), p.magnitude_db.end()) - p.magnitude_db.begin());
  const ParabolicPeak pk = parabolic_refine(p.magnitude_db, ip);
  const double df = p.freq_axis[1] - p.freq_axis[0];
  const double fpk = p.freq_axis[ip] + pk.offset * df;
  double best = -1e300;
  bool any = false;
  for (std::size_t i = 0; i < p.magnitude_db.size(); ++i) {
    if (std::abs(p.freq_axis[i] - fpk) <= exclusion)
      continue;
    best = std::max(best, p.magnitude_db[i]);
    any = true;
  }
  if (!any)
    throw std::invalid_argument("measure_slsr: exclusion covers the whole profile");
  return pk.value - best;
}

struct SidelobeEstimate {
  double main_freq = 0.0; // Hz
  double offset = 0.0;    // Hz, sidelobe minus main (signed)
  double level_db = 0.0;  // dB re main (negative)
};

namespace detail {

struct ToneEstimate {
  double freq = 0.0, amp = 0.0, phase = 0.0;
};

// Strongest tone in [f_lo, f_hi], optionally ignoring +-exclude_halfwidth
// around exclude_center. Frequency from a parabolic fit on the padded dB
// spectrum, amplitude/phase from a single-frequency DTFT at that estimate.
inline ToneEstimate fit_tone(const std::vector<double>& x, double fs, double f_lo, double f_hi,
                             double exclude_center = -1.0, double exclude_halfwidth = 0.0) {
  const std::size_t nfft = 8 * fft::next_pow2(x.size());
  std::vector<cplx> spec = fft::real_forward(x, nfft);
  const double df = fs / static_cast<double>(nfft);
  std::size_t ipk = 0;
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < spec.size(); ++i) {
    const double f = static_cast<double>(i) * df;
    if (f < f_lo || f > f_hi)
      continue;
    if (exclude_center >= 0.0 && std::abs(f - exclude_center) < exclude_halfwidth)
      continue;
    const double m = std::abs(spec[i]);
    if (m > best) {
      best = m;
      ipk = i;
    }
  }
  if (best < 0.0)
    throw peak_error("fit_tone: empty search band");
  std::vector<double> mdb(3);
  for (int j = -1; j <= 1; ++j)
    mdb[static_cast<std::size_t>(j + 1)] =
        db_amplitude(std::abs(spec[ipk + static_cast<std::size_t>(j)]) + 1e-300);
  const ParabolicPeak pp = parabolic_refine(mdb, 1);
  ToneEstimate est;
  est.freq = (static_cast<double>(ipk) + pp.offset) * df;
  const cplx z = dtft_at(x, fs, est.freq);
  est.amp = 2.0 * std::abs(z) / static_cast<double>(x.size());
  est.phase = std::arg(z);
  return est;
}

inline std::vector<double> subtract_tone(const std::vector<double>& x, double fs,
                                         const ToneEstimate& t) {
  std::vector<double> r(x.size());
  const double w = 2.0 * pi * t.freq / fs;
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = x[i] - t.amp * std::cos(w * static_cast<double>(i) + t.phase);
  return r;
}

} // namespace detail

// Two-tone sidelobe measurement for closely spaced components: one CLEAN
// iteration (estimate the dominant tone, subtract its synthesized waveform,
// read the residual peak), then a relaxation pass re-estimating each tone
// against the other's residual. Removes the bias the main peak's window
// skirt puts on a sidelobe ~1.5 bins away.
inline SidelobeEstimate measure_sidelobe_clean(const DechirpOutput& d, double search_lo,
                                               double search_hi) {
  const std::vector<double>& x = d.samples;
  const double fs = d.sample_rate;
  detail::ToneEstimate main = detail::fit_tone(x, fs, 0.0, 0.5 * fs);
  detail::ToneEstimate side{};
  for (int pass = 0; pass < 2; ++pass) {
    const std::vector<double> res = detail::subtract_tone(x, fs, main);
    side = detail::fit_tone(res, fs, std::max(0.0, main.freq - search_hi),
                            main.freq + search_hi, main.freq, search_lo);
    // relax: refine the main estimate with the sidelobe removed
    const std::vector<double> res2 = detail::subtract_tone(x, fs, side);
    main = detail::fit_tone(res2, fs, 0.0, 0.5 * fs);
  }
  SidelobeEstimate out;
  out.main_freq = main.freq;
  out.offset = side.freq - main.freq;
  out.level_db = db_amplitude(side.amp / main.amp);
  return out;
}

} // namespace phorad
