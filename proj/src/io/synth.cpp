#include "spellerssl/io/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/fft.hpp"
#include "spellerssl/core/random.hpp"

namespace spellerssl::io {

namespace {
constexpr std::array<double, 8> kGainPattern{0.6, 1.0, 1.0, 0.8, 0.8, 0.5, -0.4, -0.4};
constexpr std::uint64_t kLayoutStream = 0x6c61796f;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
}  // namespace

std::vector<double> default_gains(std::size_t channels) {
  std::vector<double> g(channels);
  for (std::size_t c = 0; c < channels; ++c) g[c] = kGainPattern[c % kGainPattern.size()];
  return g;
}

void SynthConfig::validate() const {
  if (characters == 0 && text.empty()) throw ConfigError("synth: need at least one character");
  if (channels == 0 || repetitions == 0 || epoch_length == 0) {
    throw ConfigError("synth: channels, repetitions and epoch length must be >= 1");
  }
  if (!(sample_rate_hz > 0.0)) throw ConfigError("synth: sample rate must be positive");
  if (!(p300_width_s > 0.0)) throw ConfigError("synth: p300 width must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise sigma must be >= 0");
  if (!(pink_noise_fraction >= 0.0 && pink_noise_fraction <= 1.0)) {
    throw ConfigError("synth: pink noise fraction must lie in [0, 1]");
  }
  const double duration = static_cast<double>(epoch_length) / sample_rate_hz;
  if (p300_latency_s < 0.0 || p300_latency_s + 3.0 * p300_width_s > duration) {
    throw ConfigError("synth: latency " + std::to_string(p300_latency_s) + " s + 3 x width " +
                      std::to_string(p300_width_s) + " s exceeds the " +
                      std::to_string(duration) + " s epoch");
  }
  if (!channel_gains.empty() && channel_gains.size() != channels) {
    throw ConfigError("synth: " + std::to_string(channel_gains.size()) + " gains for " +
                      std::to_string(channels) + " channels");
  }
  const decode::SpellerGrid g(grid);
  for (const char c : text) {
    if (!g.contains(c)) throw ConfigError(std::string("synth: '") + c + "' is not on the grid");
  }
}

std::vector<double> SynthConfig::gains() const {
  return channel_gains.empty() ? default_gains(channels) : channel_gains;
}

std::vector<float> p300_template(const SynthConfig& config) {
  config.validate();
  const auto g = config.gains();
  std::vector<float> out(config.channels * config.epoch_length);
  for (std::size_t t = 0; t < config.epoch_length; ++t) {
    const double u = (static_cast<double>(t) / config.sample_rate_hz - config.p300_latency_s) /
                     config.p300_width_s;
    const double bump = config.p300_amplitude * std::exp(-0.5 * u * u);
    for (std::size_t c = 0; c < config.channels; ++c)
      out[c * config.epoch_length + t] = static_cast<float>(g[c] * bump);
  }
  return out;
}

double SynthConfig::expected_snr() const {
  const auto tpl = p300_template(*this);
  double power = 0.0;
  for (const float v : tpl) power += static_cast<double>(v) * v;
  power /= static_cast<double>(tpl.size());
  return power / (noise_sigma * noise_sigma);
}

void shape_pink(std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  std::vector<core::Complex> spec(n);
  for (std::size_t i = 0; i < n; ++i) spec[i] = x[i];
  const auto& plan = core::fft_plan(n);
  plan.forward(spec, spec);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    // Symmetric scaling keeps the inverse real.
    spec[k] /= std::sqrt(static_cast<double>(std::min(k, n - k)));
  }
  plan.inverse(spec, spec);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += spec[i].real();
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (spec[i].real() - mean) * (spec[i].real() - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) x[i] = sd > 0.0 ? (spec[i].real() - mean) / sd : 0.0;
}

EpochSet synth_generate(const SynthConfig& config) {
  config.validate();
  const decode::SpellerGrid grid(config.grid);
  const std::size_t n_chars = config.text.empty() ? config.characters : config.text.size();
  const std::size_t c_count = config.channels, len = config.epoch_length;
  const auto tpl = p300_template(config);

  EpochSet set;
  set.channels = c_count;
  set.samples = len;
  set.sample_rate_hz = config.sample_rate_hz;
  set.repetitions = static_cast<std::uint32_t>(config.repetitions);
  set.speller = true;
  const std::size_t per_char = config.repetitions * 12;
  set.trials.resize(n_chars * per_char);
  set.data.resize(set.trials.size() * c_count * len);

  // Layout (targets and flash orders) comes from one stream; each trial's
  // noise from its own, so trials can be generated in any order.
  core::Rng layout(core::mix_seed(config.seed, kLayoutStream));
  for (std::size_t ch = 0; ch < n_chars; ++ch) {
    const char symbol =
        config.text.empty()
            ? grid.symbol(static_cast<std::uint8_t>(7 + layout.below(6)),
                          static_cast<std::uint8_t>(1 + layout.below(6)))
            : config.text[ch];
    const auto target = grid.codes_for(symbol);
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      std::array<std::uint8_t, 12> order{};
      std::iota(order.begin(), order.end(), std::uint8_t{1});
      layout.shuffle(std::span<std::uint8_t>(order));
      for (std::size_t j = 0; j < 12; ++j) {
        const bool hit = order[j] == target.row || order[j] == target.col;
        set.trials[ch * per_char + r * 12 + j] = {
            static_cast<std::uint8_t>(hit), order[j], target.row, target.col,
            static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(ch)};
      }
    }
  }

  const double white_sd = config.noise_sigma * std::sqrt(1.0 - config.pink_noise_fraction);
  const double pink_sd = config.noise_sigma * std::sqrt(config.pink_noise_fraction);
  const auto total = static_cast<std::ptrdiff_t>(set.trials.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    core::Rng rng(core::mix_seed(core::mix_seed(config.seed, kNoiseStream), idx));
    float* out = set.data.data() + idx * c_count * len;
    const bool hit = set.trials[idx].label == 1;
    std::vector<double> white(len), pink(len);
    for (std::size_t c = 0; c < c_count; ++c) {
      for (auto& v : white) v = rng.normal();
      for (auto& v : pink) v = rng.normal();
      shape_pink(pink);
      for (std::size_t t = 0; t < len; ++t) {
        const double signal = hit ? tpl[c * len + t] : 0.0;
        out[c * len + t] =
            static_cast<float>(signal + white_sd * white[t] + pink_sd * pink[t]);
      }
    }
  }
  return set;
}

}  // namespace spellerssl::io
