// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phorad/dsp.hpp"
#include "phorad/fft.hpp"
#include "phorad/parallel.hpp"
#include "phorad/receiver.hpp"
#include "phorad/scene.hpp"
#include "phorad/types.hpp"

namespace phorad {

// One complex range spectrum per pulse; azimuth processing needs the phase,
// so magnitudes are never stored here.
struct ProfileMatrix {
  std::vector<cplx> rows; // row-major [pulse][bin]
  std::size_t n_pulses = 0;
  std::size_t n_bins = 0;
  double pri = 0.0;            // s
  double range_scale = 0.0;    // m/Hz
  double freq_bin_width = 0.0; // Hz
  Window range_window = Window::rect;
  double record_duration = 0.0; // s

  const cplx* row(std::size_t p) const { return rows.data() + p * n_bins; }
  cplx* row(std::size_t p) { return rows.data() + p * n_bins; }
};

// Produces the de-chirped record for one pulse given its frozen delays
// (physical or behavioral path; wired up by the caller).
using PulseBackend = std::function<DechirpOutput(const std::vector<Delay>&)>;

// Pulse p is taken with the turntable at theta(p*pri); rows are computed
// independently in parallel.
inline ProfileMatrix collect_profiles(const TurntableScene& scene, const PulseBackend& backend,
                                      std::size_t n_pulses, double pri, Window range_window,
                                      std::size_t nfft_range) {
  scene.validate();
  if (n_pulses < 2)
    throw std::invalid_argument("collect_profiles: need at least 2 pulses");
  const double aspect_deg = static_cast<double>(n_pulses) * pri * scene.rotation_rate * 180.0 / pi;
  if (aspect_deg > 15.0)
    std::fprintf(stderr,
                 "phorad: warning: %.1f deg aspect change over the dwell exceeds the "
                 "small-angle budget (15 deg); expect point-response smearing\n",
                 aspect_deg);

  ProfileMatrix m;
  m.n_pulses = n_pulses;
  m.n_bins = nfft_range / 2 + 1;
  m.pri = pri;
  m.range_window = range_window;
  m.rows.resize(m.n_pulses * m.n_bins);

  // probe one pulse for the axis metadata
  {
    const DechirpOutput d0 = backend(scene_delays(scene, 0.0));
    m.range_scale = speed_of_light / (2.0 * d0.chirp_rate_rf);
    m.freq_bin_width = d0.sample_rate / static_cast<double>(nfft_range);
    m.record_duration = static_cast<double>(d0.samples.size()) / d0.sample_rate;
  }

  parallel_for(n_pulses, [&](std::size_t p) {
    const double t = static_cast<double>(p) * pri;
    const DechirpOutput d = backend(scene_delays(scene, t));
    const std::vector<cplx> spec = complex_range_spectrum(d, range_window, nfft_range);
    std::copy(spec.begin(), spec.end(), m.row(p));
  });
  return m;
}

struct IsarImage {
  std::vector<double> magnitude_db;    // row-major [range][crossrange], dB re peak
  std::vector<double> range_axis;      // m, relative to the range reference
  std::vector<double> crossrange_axis; // m, ascending, symmetric about 0
  double center_wavelength = 0.0;      // m
  double rotation_rate = 0.0;          // rad/s

  std::size_t n_range() const { return range_axis.size(); }
  std::size_t n_cross() const { return crossrange_axis.size(); }
  double at(std::size_t r, std::size_t c) const { return magnitude_db[r * n_cross() + c]; }
};

// Azimuth FFT per range bin; Doppler mapped to cross-range via
// x = -lambda*f_d/(2*omega) (a scatterer at +y recedes, giving negative
// Doppler under tau = 2*(R0 + x cos - y sin)/c). The image is cropped to
// range_span x cross_span around (range_reference, 0).
inline IsarImage form_image(const ProfileMatrix& m, double lambda_center, double omega,
                            Window azimuth_window, double range_reference, double range_span,
                            double cross_span, std::size_t nfft_azimuth = 0) {
  if (m.n_pulses < 2)
    throw std::invalid_argument("form_image: need at least 2 pulses");
  if (!(omega > 0.0))
    throw std::invalid_argument("form_image: rotation rate must be > 0");
  if (nfft_azimuth == 0)
    nfft_azimuth = 4 * fft::next_pow2(m.n_pulses);

  // kept range bins
  std::vector<std::size_t> rbins;
  std::vector<double> raxis;
  for (std::size_t i = 0; i < m.n_bins; ++i) {
    const double r = static_cast<double>(i) * m.freq_bin_width * m.range_scale - range_reference;
    if (std::abs(r) <= 0.5 * range_span) {
      rbins.push_back(i);
      raxis.push_back(r);
    }
  }
  if (rbins.empty())
    throw std::invalid_argument("form_image: crop window contains no range bins");

  // kept cross-range columns: doppler bin j (fft-shifted) -> fd -> -lambda*fd/(2w)
  const double prf = 1.0 / m.pri;
  const double dfd = prf / static_cast<double>(nfft_azimuth);
  const auto half = static_cast<std::ptrdiff_t>(nfft_azimuth / 2);
  std::vector<std::ptrdiff_t> dop_idx; // doppler index (signed), ascending cross-range
  std::vector<double> caxis;
  for (std::ptrdiff_t j = half - 1; j >= -half; --j) { // descending fd = ascending cross-range
    const double fd = static_cast<double>(j) * dfd;
    const double cr = -lambda_center * fd / (2.0 * omega);
    if (std::abs(cr) <= 0.5 * cross_span) {
      dop_idx.push_back(j);
      caxis.push_back(cr);
    }
  }

  IsarImage img;
  img.center_wavelength = lambda_center;
  img.rotation_rate = omega;
  img.range_axis = std::move(raxis);
  img.crossrange_axis = std::move(caxis);
  img.magnitude_db.assign(img.n_range() * img.n_cross(), 0.0);

  const std::vector<double> waz = make_window(azimuth_window, m.n_pulses);
  std::vector<double> linear(img.n_range() * img.n_cross(), 0.0);
  parallel_for(img.n_range(), [&](std::size_t r) {
    std::vector<cplx> col(nfft_azimuth, cplx(0.0, 0.0));
    for (std::size_t p = 0; p < m.n_pulses; ++p)
      col[p] = m.row(p)[rbins[r]] * waz[p];
    fft::forward(col);
    for (std::size_t c = 0; c < img.n_cross(); ++c) {
      const std::ptrdiff_t j = dop_idx[c];
      const std::size_t idx = static_cast<std::size_t>(
          j >= 0 ? j : j + static_cast<std::ptrdiff_t>(nfft_azimuth));
      linear[r * img.n_cross() + c] = std::abs(col[idx]);
    }
  });

  double peak = 0.0;
  for (double v : linear)
    peak = std::max(peak, v);
  if (peak <= 0.0)
    peak = 1.0;
  for (std::size_t i = 0; i < linear.size(); ++i)
    img.magnitude_db[i] = db_amplitude(linear[i] / peak + 1e-300);
  return img;
}

struct TargetDetection {
  double range = 0.0;        // m
  double crossrange = 0.0;   // m
  double amplitude_db = 0.0; // dB re image peak
};

// Local maxima above (peak - threshold), refined by separable 2-D parabolic
// interpolation, strongest first. An empty list is a valid result.
inline std::vector<TargetDetection> extract_targets(const IsarImage& img, double threshold_db) {
  if (threshold_db <= 0.0)
    throw std::invalid_argument("extract_targets: threshold must be > 0 dB");
  std::vector<TargetDetection> dets;
  const std::size_t nr = img.n_range(), nc = img.n_cross();
  if (nr < 3 || nc < 3)
    return dets;
  for (std::size_t r = 1; r + 1 < nr; ++r) {
    for (std::size_t c = 1; c + 1 < nc; ++c) {
      const double v = img.at(r, c);
      if (v < -threshold_db)
        continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0)
            continue;
          const std::size_t rn = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r) + dr);
          const std::size_t cn = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + dc);
          const double nb = img.at(rn, cn);
          if (nb > v || (nb == v && (dr < 0 || (dr == 0 && dc < 0)))) {
            is_max = false; // ties resolve to the first scan-order cell
            break;
          }
        }
      if (!is_max)
        continue;
      const double rr[3] = {img.at(r - 1, c), v, img.at(r + 1, c)};
      const double cc[3] = {img.at(r, c - 1), v, img.at(r, c + 1)};
      const ParabolicPeak pr = parabolic_refine(rr, 1);
      const ParabolicPeak pc = parabolic_refine(cc, 1);
      TargetDetection d;
      d.range = img.range_axis[r] + pr.offset * (img.range_axis[1] - img.range_axis[0]);
      d.crossrange =
          img.crossrange_axis[c] + pc.offset * (img.crossrange_axis[1] - img.crossrange_axis[0]);
      d.amplitude_db = v;
      dets.push_back(d);
    }
  }
  std::sort(dets.begin(), dets.end(),
            [](const TargetDetection& a, const TargetDetection& b) {
              return a.amplitude_db > b.amplitude_db;
            });
  return dets;
}

} // namespace phorad
