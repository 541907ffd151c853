#pragma once

#include <cstddef>
#include <vector>

#include "spellerssl/core/tensor.hpp"

namespace spellerssl::signal {

struct StimulusOnset {
  std::size_t sample = 0;
  int code = 0;  // 1..12
};

// Channel-major continuous EEG: samples[c * length() + t].
struct ContinuousRecording {
  std::size_t channels = 0;
  double sample_rate_hz = 0.0;
  std::vector<float> samples;
  std::vector<StimulusOnset> onsets;

  std::size_t length() const { return channels == 0 ? 0 : samples.size() / channels; }
  // Throws DataIntegrityError on ragged samples, unordered onsets or codes
  // outside 1..12.
  void validate() const;
};

// Zero-phase 4th-order Butterworth band-pass per channel.
ContinuousRecording bandpass(const ContinuousRecording& x, double low_hz = 0.1,
                             double high_hz = 60.0);

// Rational polyphase resampling per channel; onsets are rescaled and rounded.
ContinuousRecording resample(const ContinuousRecording& x, double target_hz = 240.0);

// Window [onset, onset + length) as a [C, length] tensor.
core::Tensor extract_epoch(const ContinuousRecording& x, std::size_t onset,
                           std::size_t length = 160);

}  // namespace spellerssl::signal
