// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phorad/dsp.hpp"
#include "phorad/waveform.hpp"

using namespace phorad;

namespace {
const ChirpSpec kPaperChirp{6e9, 3e9, 100e-6}; // 6-9 GHz over 100 us
constexpr double kFs = 80e9;
} // namespace

TEST_CASE("instantaneous frequency is the linear ramp") {
  CHECK(instantaneous_frequency(kPaperChirp, 0.0) == 6e9);
  CHECK(instantaneous_frequency(kPaperChirp, 100e-6) == 9e9);
  CHECK(instantaneous_frequency(kPaperChirp, 50e-6) == Catch::Approx(7.5e9).epsilon(1e-12));
  // f(T) - f(0) equals the bandwidth exactly, not within rounding
  CHECK(instantaneous_frequency(kPaperChirp, kPaperChirp.duration) -
            instantaneous_frequency(kPaperChirp, 0.0) ==
        kPaperChirp.bandwidth);
  CHECK_THROWS_AS(instantaneous_frequency(kPaperChirp, -1e-9), std::out_of_range);
  CHECK_THROWS_AS(instantaneous_frequency(kPaperChirp, 101e-6), std::out_of_range);
}

TEST_CASE("synth_lfm rejects sub-Nyquist sampling") {
  CHECK_THROWS_AS(synth_lfm(kPaperChirp, 17e9), sampling_error);
}

TEST_CASE("synth_lfm sweeps 6 to 9 GHz") {
  const RealSignal sig = synth_lfm(kPaperChirp, kFs);
  REQUIRE(sig.samples.size() == 8000000);
  const Spectrogram sg = stft(sig, 2048, 65536);
  const std::vector<double> ridge = spectrogram_ridge(sg);
  const double bin = sg.freq_axis[1] - sg.freq_axis[0];
  const double k = kPaperChirp.chirp_rate();
  // instantaneous frequency matches f0 + k*t at both ends and in the middle
  for (std::size_t c : {std::size_t{1}, ridge.size() / 2, ridge.size() - 2}) {
    const double expected = 6e9 + k * sg.time_axis[c];
    CHECK(std::abs(ridge[c] - expected) < bin);
  }
  // interior ridge is linear: slope within 1%, residual under one bin
  const double slope = ridge_slope(sg);
  CHECK(slope == Catch::Approx(k).epsilon(0.01));
  const auto skip = ridge.size() / 20;
  for (std::size_t c = skip; c + skip < ridge.size(); ++c)
    CHECK(std::abs(ridge[c] - (6e9 + k * sg.time_axis[c])) < bin);
}

TEST_CASE("degenerate chirp is a pure tone") {
  // bandwidth 0 with f0 on a bin center
  const ChirpSpec cw{10e6, 0.0, 100e-6};
  const RealSignal sig = synth_lfm(cw, 80e6);
  const PowerSpectrum ps = power_spectrum(sig);
  std::size_t ipk = 0;
  for (std::size_t i = 0; i < ps.power.size(); ++i)
    if (ps.power[i] > ps.power[ipk])
      ipk = i;
  CHECK(ps.freq[ipk] == Catch::Approx(10e6).epsilon(1e-12));
  // single-bin line: -3.01 dB re full scale, everything else numerical noise
  CHECK(db_power(ps.power[ipk]) == Catch::Approx(-3.0103).margin(1e-3));
  for (std::size_t i = 0; i < ps.power.size(); ++i) {
    if (i == ipk)
      continue;
    CHECK(db_power(ps.power[i] + 1e-300) < -200.0);
  }
}

TEST_CASE("power_spectrum satisfies Parseval") {
  for (std::size_t n : {std::size_t{4096}, std::size_t{4097}}) {
    RealSignal sig;
    sig.sample_rate = 1e6;
    sig.samples.resize(n);
    GaussianRng rng(42);
    for (double& v : sig.samples)
      v = rng();
    const PowerSpectrum ps = power_spectrum(sig);
    double sum = 0.0;
    for (double p : ps.power)
      sum += p;
    CHECK(sum == Catch::Approx(sig.mean_square()).epsilon(1e-9));
  }
  RealSignal empty;
  empty.sample_rate = 1e6;
  CHECK_THROWS_AS(power_spectrum(empty), std::invalid_argument);
}

TEST_CASE("stft ridge of a CW tone is constant") {
  const ChirpSpec cw{5e6, 0.0, 200e-6};
  const RealSignal sig = synth_lfm(cw, 40e6);
  const Spectrogram sg = stft(sig, 512, 256);
  const std::vector<double> ridge = spectrogram_ridge(sg);
  for (double r : ridge)
    CHECK(r == Catch::Approx(5e6).margin(sg.freq_axis[1]));
  CHECK_THROWS_AS(stft(sig, sig.samples.size() + 1, 256), std::invalid_argument);
}

TEST_CASE("doubled-band chirp spectrum: flat, confined, spur-free") {
  // stand-in for the transmitted signal: a clean 12-18 GHz chirp
  const ChirpSpec doubled{12e9, 6e9, 100e-6};
  const RealSignal sig = synth_lfm(doubled, kFs);
  const PowerSpectrum ps = power_spectrum(sig);

  const BandEdges edges = find_band_edges(ps);
  CHECK(edges.low == Catch::Approx(12e9).epsilon(0.01));
  CHECK(edges.high == Catch::Approx(18e9).epsilon(0.01));
  CHECK(edges.width() == Catch::Approx(6e9).epsilon(0.01));

  const double inset = 0.01 * edges.width();
  CHECK(measure_flatness(ps, edges.low + inset, edges.high - inset) <= 1.0);
  CHECK(measure_spur_rejection(ps, edges.low, edges.high) >= 25.0);

  const Spectrogram sg = stft(sig, 2048, 65536);
  CHECK(ridge_slope(sg) == Catch::Approx(6e13).epsilon(0.01));
}

TEST_CASE("flatness and spur metrics on a pure tone") {
  const ChirpSpec cw{10e6, 0.0, 100e-6};
  const RealSignal sig = synth_lfm(cw, 80e6);
  const PowerSpectrum ps = power_spectrum(sig);
  // band = the tone: everything else is numerical noise, >100 dB down
  CHECK(measure_spur_rejection(ps, 9.95e6, 10.05e6, 0.001, 1) > 100.0);
  CHECK_THROWS_AS(measure_flatness(ps, 41e6, 42e6), std::invalid_argument);
  CHECK_THROWS_AS(measure_spur_rejection(ps, -2e6, -1e6), std::invalid_argument);
}
