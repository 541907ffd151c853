#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spellerssl::signal {

struct Ratio {
  std::size_t up = 1;
  std::size_t down = 1;
};

// Reduced up/down pair for target/source. Throws ConfigError when no pair
// with denominator <= max_factor reproduces the ratio.
Ratio rational_ratio(double source_hz, double target_hz, std::size_t max_factor = 1000);

// Polyphase rational resampler: upsample by `up`, Kaiser-windowed sinc
// low-pass (beta 5, cutoff at the lower of the two Nyquist rates), downsample
// by `down`. Each polyphase branch is normalised to unit DC gain, and the
// input is extended by odd reflection at both edges. Output length is
// round(x.size() * up / down).
class PolyphaseResampler {
 public:
  PolyphaseResampler(std::size_t up, std::size_t down);

  std::size_t up() const { return up_; }
  std::size_t down() const { return down_; }
  std::size_t output_length(std::size_t input_length) const;
  const std::vector<double>& taps() const { return taps_; }

  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::size_t up_;
  std::size_t down_;
  std::size_t half_;
  std::vector<double> taps_;
  std::vector<double> branch_gain_;
};

}  // namespace spellerssl::signal
