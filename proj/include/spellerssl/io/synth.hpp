#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spellerssl/decode/grid.hpp"
#include "spellerssl/io/epoch_set.hpp"

namespace spellerssl::io {

// Synthetic speller session: a Gaussian bump on target flashes, white plus
// 1/f noise everywhere. Amplitudes are in microvolts.
struct SynthConfig {
  std::size_t characters = 36;
  std::size_t channels = 8;
  std::size_t repetitions = 15;
  double sample_rate_hz = 240.0;
  std::size_t epoch_length = 160;
  double p300_amplitude = 5.0;
  double p300_latency_s = 0.3;
  double p300_width_s = 0.05;
  double noise_sigma = 10.0;
  double pink_noise_fraction = 0.5;  // share of the noise variance that is 1/f
  // Per-channel template gains; empty selects default_gains(channels).
  std::vector<double> channel_gains;
  // Text to spell; empty draws characters uniformly from the grid.
  std::string text;
  std::string grid = "ABCDEF/GHIJKL/MNOPQR/STUVWX/YZ1234/56789_";
  std::uint64_t seed = 0;

  // ConfigError when the bump does not fit in the epoch or a field is invalid.
  void validate() const;
  std::vector<double> gains() const;
  // Template power over noise variance, averaged over channels and samples.
  double expected_snr() const;
};

// Arbitrary fixed gains cycling through an 8-channel pattern: midline and
// parietal sites positive, the last two (occipital) negative.
std::vector<double> default_gains(std::size_t channels);

// [C][L] template of a target flash.
std::vector<float> p300_template(const SynthConfig& config);

EpochSet synth_generate(const SynthConfig& config);

// Unit-variance 1/f noise of the given length from `white` (overwritten).
void shape_pink(std::vector<double>& white);

}  // namespace spellerssl::io
