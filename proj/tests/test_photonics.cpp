// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "phorad/fft.hpp"
#include "phorad/photonics.hpp"
#include "phorad/waveform.hpp"

using namespace phorad;

namespace {

// bin-aligned sinusoidal drive for exact sideband readout
struct SidebandRig {
  std::size_t n = 8192;
  double fs = 81.92e6;
  double f_drive = 1e6; // bin 100
  double power = 1e-3;

  // complex envelope spectrum bins, scaled to field amplitude per line
  std::vector<cplx> lines(const MzmSpec& mzm, double m_index) const {
    OpticalEnvelope cw = cw_source(power, 193.1e12, n / fs, fs);
    RealSignal drive;
    drive.sample_rate = fs;
    drive.samples.resize(n);
    const double amp = 2.0 * m_index * mzm.v_pi / pi;
    for (std::size_t i = 0; i < n; ++i)
      drive.samples[i] = amp * std::cos(2.0 * pi * f_drive * static_cast<double>(i) / fs);
    OpticalEnvelope out = mzm_modulate(cw, drive, mzm);
    fft::forward(out.samples);
    for (cplx& v : out.samples)
      v /= static_cast<double>(n);
    return out.samples;
  }

  // spectrum bin of sideband order k (can be negative)
  static cplx order(const std::vector<cplx>& spec, int k, std::size_t bin1) {
    const auto n = spec.size();
    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(bin1);
    return spec[static_cast<std::size_t>((idx % static_cast<std::ptrdiff_t>(n) +
                                          static_cast<std::ptrdiff_t>(n)) %
                                         static_cast<std::ptrdiff_t>(n))];
  }
};

} // namespace

TEST_CASE("cw source") {
  const OpticalEnvelope env = cw_source(1e-3, 193.06e12, 1e-6, 1e9);
  REQUIRE(env.samples.size() == 1000);
  for (std::size_t i = 0; i < env.samples.size(); ++i)
    CHECK(env.power(i) == Catch::Approx(1e-3).epsilon(1e-12));
  const OpticalEnvelope dark = cw_source(0.0, 193.06e12, 1e-6, 1e9);
  CHECK(dark.energy() == 0.0);
  // 1552.9 nm -> about 193.06 THz
  CHECK(carrier_freq_from_wavelength(1552.9e-9) ==
        Catch::Approx(speed_of_light / 1552.9e-9).epsilon(1e-15));
  CHECK(carrier_freq_from_wavelength(1552.9e-9) == Catch::Approx(1.9306e14).epsilon(1e-4));
}

TEST_CASE("mzm at the null blocks the carrier; imbalance leaks it") {
  const double p_in = 2e-3;
  OpticalEnvelope cw = cw_source(p_in, 193.1e12, 1e-6, 1e9);
  RealSignal zero;
  zero.sample_rate = 1e9;
  zero.samples.assign(cw.samples.size(), 0.0);

  MzmSpec null_bias;
  null_bias.bias_phase = pi;
  null_bias.insertion_loss = 3.0;
  OpticalEnvelope dark = mzm_modulate(cw, zero, null_bias);
  for (const cplx& v : dark.samples)
    CHECK(std::abs(v) < 1e-15);

  MzmSpec leaky = null_bias;
  leaky.arm_imbalance = 0.2;
  OpticalEnvelope leak = mzm_modulate(cw, zero, leaky);
  const double expected =
      std::pow(std::sin(0.1), 2) * leaky.field_loss() * leaky.field_loss() * p_in;
  CHECK(leak.power(0) == Catch::Approx(expected).epsilon(1e-12));

  RealSignal short_drive = zero;
  short_drive.samples.pop_back();
  CHECK_THROWS_AS(mzm_modulate(cw, short_drive, null_bias), std::invalid_argument);
}

TEST_CASE("sideband oracle limits") {
  // small-signal +-1st order at the null: J1(m) ~ m/2
  const double m = 1e-4;
  CHECK(std::abs(mzm_sideband_oracle(m, 1, pi, 0.0)) == Catch::Approx(m / 2).epsilon(1e-6));
  CHECK(std::abs(mzm_sideband_oracle(m, -1, pi, 0.0)) == Catch::Approx(m / 2).epsilon(1e-6));
  // carrier and even orders vanish at the exact null
  CHECK(std::abs(mzm_sideband_oracle(0.5, 0, pi, 0.0)) < 1e-16);
  CHECK(std::abs(mzm_sideband_oracle(0.5, 2, pi, 0.0)) < 1e-16);
  CHECK_THROWS_AS(mzm_sideband_oracle(0.5, 51, pi, 0.0), std::invalid_argument);
}

TEST_CASE("measured sidebands match the Bessel oracle to 1e-9") {
  SidebandRig rig;
  const std::size_t bin1 = 100;
  // J3/J1 amplitude ratio at m = 0.5, null bias
  {
    MzmSpec mzm;
    mzm.bias_phase = pi;
    const std::vector<cplx> spec = rig.lines(mzm, 0.5);
    const double ratio =
        std::abs(SidebandRig::order(spec, 3, bin1)) / std::abs(SidebandRig::order(spec, 1, bin1));
    const double expected = std::abs(std::cyl_bessel_j(3.0, 0.5) / std::cyl_bessel_j(1.0, 0.5));
    CHECK(ratio == Catch::Approx(expected).epsilon(1e-9));
  }
  // complex agreement for |n| <= 5 across bias points, imbalance, drive depth
  const double field = std::sqrt(rig.power);
  for (const double m : {0.3, 1.0, 2.0}) {
    for (const double bias : {pi, pi / 2}) {
      for (const double delta : {0.0, 0.2}) {
        MzmSpec mzm;
        mzm.bias_phase = bias;
        mzm.arm_imbalance = delta;
        mzm.insertion_loss = 3.0;
        const std::vector<cplx> spec = rig.lines(mzm, m);
        for (int k = -5; k <= 5; ++k) {
          const cplx measured = SidebandRig::order(spec, k, bin1);
          const cplx expected =
              field * mzm.field_loss() * mzm_sideband_oracle(m, k, bias, delta);
          if (std::abs(expected) < 1e-12) {
            CHECK(std::abs(measured) < 1e-10);
          } else {
            CHECK(std::abs(measured - expected) / std::abs(expected) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("even orders stay below -200 dB at the exact null") {
  SidebandRig rig;
  const std::size_t bin1 = 100;
  for (const double m : {0.5, 1.0, 2.0}) {
    MzmSpec mzm;
    mzm.bias_phase = pi;
    const std::vector<cplx> spec = rig.lines(mzm, m);
    const double ref = std::abs(SidebandRig::order(spec, 1, bin1));
    for (const int k : {0, 2, -2, 4, -4})
      CHECK(db_amplitude(std::abs(SidebandRig::order(spec, k, bin1)) / ref + 1e-300) < -200.0);
  }
}

TEST_CASE("mrr transfer extrema and periodicity") {
  MrrSpec s;
  s.fsr = 70.86e9;
  s.self_coupling = 0.97;
  s.round_trip_amplitude = 0.94;
  const double hmin = std::abs(mrr_transfer(s, 0.0));
  const double hmax = std::abs(mrr_transfer(s, 0.5 * s.fsr));
  CHECK(hmin == Catch::Approx((0.97 - 0.94) / (1.0 - 0.97 * 0.94)).epsilon(1e-12));
  CHECK(hmax == Catch::Approx((0.97 + 0.94) / (1.0 + 0.97 * 0.94)).epsilon(1e-12));
  for (const double f : {1.234e9, -17.7e9, 33.3e9})
    CHECK(std::abs(mrr_transfer(s, f)) ==
          Catch::Approx(std::abs(mrr_transfer(s, f + s.fsr))).margin(1e-12));
  // critical coupling: zero transmission at resonance, unbounded ER
  MrrSpec crit = s;
  crit.round_trip_amplitude = crit.self_coupling;
  CHECK(std::abs(mrr_transfer(crit, 0.0)) == 0.0);
  CHECK(std::isinf(mrr_extinction_db(crit)));
}

TEST_CASE("mrr_solve reproduces ER and FWHM, re-measured from the sweep") {
  const MrrSpec s = mrr_solve(70.9e9, 9.0, 2e9);
  // independent re-measure: fine magnitude sweep over one FSR
  double mn = 1e300, mx = 0.0;
  for (int i = 0; i < 200001; ++i) {
    const double f = -0.5 * s.fsr + s.fsr * static_cast<double>(i) / 200000.0;
    const double h = std::abs(mrr_transfer(s, f));
    mn = std::min(mn, h);
    mx = std::max(mx, h);
  }
  const double er_meas = db_amplitude(mx / mn);
  CHECK(er_meas == Catch::Approx(9.0).margin(0.009));
  // half-depth width from bisection on the closed form
  CHECK(mrr_fwhm(s) == Catch::Approx(2e9).epsilon(1e-3));
  CHECK(s.self_coupling > s.round_trip_amplitude); // under-coupled representative
  CHECK(s.self_coupling < 1.0);

  CHECK_THROWS_AS(mrr_solve(70.9e9, -1.0, 2e9), solve_error);
  CHECK_THROWS_AS(mrr_solve(70.9e9, std::numeric_limits<double>::infinity(), 2e9), solve_error);
  CHECK_THROWS_AS(mrr_solve(70.9e9, 9.0, 36e9), solve_error); // fwhm >= fsr/2
}

TEST_CASE("fsr from the wavelength spacing") {
  const double fsr = fsr_from_wavelength(1552.9e-9, 0.57e-9);
  CHECK(fsr == Catch::Approx(speed_of_light * 0.57e-9 / (1552.9e-9 * 1552.9e-9)).epsilon(1e-15));
  CHECK(std::abs(fsr - 70.9e9) / 70.9e9 < 1e-3);
}

TEST_CASE("mrr_filter: near-unity ring preserves energy") {
  MrrSpec s;
  s.fsr = 70.86e9;
  s.self_coupling = 1e-12; // all-pass limit: |H| == 1
  s.round_trip_amplitude = 1.0;
  OpticalEnvelope env = cw_source(1e-3, 193.1e12, 2e-6, 4e9);
  GaussianRng rng(7);
  for (cplx& v : env.samples)
    v *= cplx(1.0 + 0.1 * rng(), 0.1 * rng());
  const OpticalEnvelope out = mrr_filter(env, s);
  CHECK(out.energy() == Catch::Approx(env.energy()).epsilon(1e-9));
}

TEST_CASE("mrr_filter notches the carrier, spares the sidebands") {
  const MrrSpec s = mrr_solve(70.86e9, 9.0, 2e9);
  // three-line field: carrier + sidebands at +-7.5 GHz (bin-aligned)
  const std::size_t n = 8192;
  const double fs = 61.44e9; // bin = 7.5 MHz; 7.5 GHz = bin 1000
  OpticalEnvelope env;
  env.sample_rate = fs;
  env.carrier_freq = 193.1e12;
  env.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    env.samples[i] = 0.5 + 0.4 * std::cos(2.0 * pi * 7.5e9 * t) * cplx(0.0, 2.0);
  }
  const OpticalEnvelope out = mrr_filter(env, s);
  std::vector<cplx> before = env.samples, after = out.samples;
  fft::forward(before);
  fft::forward(after);
  const double drop_carrier = db_amplitude(std::abs(after[0]) / std::abs(before[0]));
  const double expected_drop = db_amplitude(std::abs(mrr_transfer(s, 0.0)));
  CHECK(drop_carrier == Catch::Approx(expected_drop).margin(0.05));
  const double drop_side = db_amplitude(std::abs(after[1000]) / std::abs(before[1000]));
  CHECK(std::abs(drop_side) < 0.5);
  // ER-deep notch: carrier falls at least as far as the extinction ratio
  CHECK(-drop_carrier >= mrr_extinction_db(s) - 0.01);
}

TEST_CASE("passive devices never create energy") {
  GaussianRng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    MrrSpec s;
    s.fsr = 50e9;
    s.self_coupling = 0.05 + 0.9 * rng.uniform();
    s.round_trip_amplitude = 0.05 + 0.95 * rng.uniform();
    s.resonance_offset = 5e9 * rng.uniform();
    OpticalEnvelope env;
    env.sample_rate = 8e9;
    env.carrier_freq = 193.1e12;
    env.samples.resize(4096);
    for (cplx& v : env.samples)
      v = cplx(rng(), rng());
    CHECK(mrr_filter(env, s).energy() <= env.energy() * (1.0 + 1e-12));
    auto [a, b] = split(env, 0.3);
    CHECK(a.energy() + b.energy() == Catch::Approx(env.energy()).epsilon(1e-12));
  }
}

TEST_CASE("split is an ideal lossless coupler") {
  const OpticalEnvelope env = cw_source(4e-3, 193.1e12, 1e-6, 1e9);
  auto [a, b] = split(env, 0.5);
  CHECK(a.power(0) == Catch::Approx(2e-3).epsilon(1e-12));
  CHECK(b.power(0) == Catch::Approx(2e-3).epsilon(1e-12));
  CHECK_THROWS_AS(split(env, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(split(env, 0.0), std::invalid_argument);
}

TEST_CASE("photodetector squares the field: two lines beat at 2f") {
  const std::size_t n = 8192;
  const double fs = 81.92e6;
  const double f = 1e6; // bin 100
  const double a1 = 0.03, a2 = 0.017;
  OpticalEnvelope env;
  env.sample_rate = fs;
  env.carrier_freq = 193.1e12;
  env.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    env.samples[i] = a1 * std::exp(cplx(0.0, 2.0 * pi * f * t)) +
                     a2 * std::exp(cplx(0.0, -2.0 * pi * f * t));
  }
  PdSpec pd;
  pd.responsivity = 0.8;
  pd.bandwidth = 30e9;
  const RealSignal current = photodetect(env, pd);
  const std::vector<cplx> spec = fft::real_forward(current.samples);
  const double tone = 2.0 * std::abs(spec[200]) / static_cast<double>(n);
  CHECK(tone == Catch::Approx(2.0 * pd.responsivity * a1 * a2).epsilon(1e-9));

  // a single line is pure DC
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    env.samples[i] = a1 * std::exp(cplx(0.0, 2.0 * pi * f * t));
  }
  const RealSignal dc = photodetect(env, pd);
  const std::vector<cplx> spec2 = fft::real_forward(dc.samples);
  for (std::size_t i = 1; i < spec2.size(); ++i)
    CHECK(db_amplitude(std::abs(spec2[i]) / std::abs(spec2[0]) + 1e-300) < -200.0);
}

TEST_CASE("square-law detection doubles a DSB chirp") {
  // scaled chain: 0.6-0.9 GHz chirp at 8 GSa/s -> detected band 1.2-1.8 GHz
  const ChirpSpec chirp{0.6e9, 0.3e9, 20e-6};
  const double fs = 8e9;
  const RealSignal drive = synth_lfm(chirp, fs, 2.0 * 0.25 * 3.0 / pi);
  const OpticalEnvelope cw = cw_source(1e-3, 193.1e12, chirp.duration, fs);
  MzmSpec mzm;
  mzm.bias_phase = pi;
  const OpticalEnvelope mod = mzm_modulate(cw, drive, mzm);
  PdSpec pd;
  pd.bandwidth = 3e9;
  const RealSignal detected = photodetect(mod, pd);
  RealSignal ac = detected;
  double mean = 0.0;
  for (double v : ac.samples)
    mean += v;
  mean /= static_cast<double>(ac.samples.size());
  for (double& v : ac.samples)
    v -= mean;
  const PowerSpectrum ps = power_spectrum(ac);
  const BandEdges edges = find_band_edges(ps);
  CHECK(edges.low == Catch::Approx(1.2e9).epsilon(0.02));
  CHECK(edges.high == Catch::Approx(1.8e9).epsilon(0.02));
  const Spectrogram sg = stft(ac, 1024, 4096);
  CHECK(ridge_slope(sg) == Catch::Approx(2.0 * chirp.chirp_rate()).epsilon(0.01));
}

TEST_CASE("carrier suppression metric and the noise hook") {
  const std::size_t n = 4096;
  const double fs = 40.96e9;
  OpticalEnvelope env;
  env.sample_rate = fs;
  env.carrier_freq = 193.1e12;
  env.samples.resize(n);
  // carrier at 2x the power of each 7 GHz sideband: suppression = +3 dB
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    env.samples[i] = std::sqrt(2.0) * 0.1 + 0.1 * std::exp(cplx(0.0, 2.0 * pi * 7e9 * t)) +
                     0.1 * std::exp(cplx(0.0, -2.0 * pi * 7e9 * t));
  }
  CHECK(carrier_suppression_db(env, 5e9, 10e9, 0.5e9) == Catch::Approx(-3.0103).margin(0.01));

  OpticalEnvelope noisy = env;
  add_gaussian_noise(noisy, 1e-3, 123);
  OpticalEnvelope noisy2 = env;
  add_gaussian_noise(noisy2, 1e-3, 123);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(noisy.samples[i] == noisy2.samples[i]); // seeded: bit-identical
}
