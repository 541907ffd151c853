#include "spellerssl/signal/recording.hpp"

#include <cmath>
#include <string>

#include "spellerssl/core/error.hpp"
#include "spellerssl/signal/filter.hpp"
#include "spellerssl/signal/resample.hpp"

namespace spellerssl::signal {

void ContinuousRecording::validate() const {
  if (channels == 0) throw DataIntegrityError("recording: no channels");
  if (samples.size() % channels != 0) {
    throw DataIntegrityError("recording: " + std::to_string(samples.size()) +
                             " samples do not split into " + std::to_string(channels) +
                             " channels");
  }
  if (!(sample_rate_hz > 0.0)) throw DataIntegrityError("recording: sample rate must be > 0");
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    if (onsets[i].code < 1 || onsets[i].code > 12) {
      throw DataIntegrityError("recording: onset " + std::to_string(i) + " has code " +
                               std::to_string(onsets[i].code));
    }
    if (i > 0 && onsets[i].sample <= onsets[i - 1].sample) {
      throw DataIntegrityError("recording: onset " + std::to_string(i) +
                               " is not after its predecessor");
    }
  }
}

ContinuousRecording bandpass(const ContinuousRecording& x, double low_hz, double high_hz) {
  x.validate();
  const SosFilter sos = butterworth_bandpass(4, low_hz, high_hz, x.sample_rate_hz);
  ContinuousRecording out = x;
  const std::size_t len = x.length();
  std::vector<double> buf(len);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t t = 0; t < len; ++t) buf[t] = x.samples[c * len + t];
    sos_filtfilt(sos, buf);
    for (std::size_t t = 0; t < len; ++t) out.samples[c * len + t] = static_cast<float>(buf[t]);
  }
  return out;
}

ContinuousRecording resample(const ContinuousRecording& x, double target_hz) {
  x.validate();
  const Ratio r = rational_ratio(x.sample_rate_hz, target_hz);
  const PolyphaseResampler resampler(r.up, r.down);
  const std::size_t len = x.length();
  const std::size_t out_len = resampler.output_length(len);
  ContinuousRecording out;
  out.channels = x.channels;
  out.sample_rate_hz = target_hz;
  out.samples.resize(x.channels * out_len);
  std::vector<double> buf(len);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t t = 0; t < len; ++t) buf[t] = x.samples[c * len + t];
    const auto y = resampler.apply(buf);
    for (std::size_t t = 0; t < out_len; ++t) out.samples[c * out_len + t] = static_cast<float>(y[t]);
  }
  for (const auto& onset : x.onsets) {
    const std::size_t s = (onset.sample * r.up + r.down / 2) / r.down;
    if (!out.onsets.empty() && s <= out.onsets.back().sample) {
      throw ConfigError("resample: onsets collapse at the target rate");
    }
    out.onsets.push_back({s, onset.code});
  }
  return out;
}

core::Tensor extract_epoch(const ContinuousRecording& x, std::size_t onset, std::size_t length) {
  const std::size_t len = x.length();
  if (length == 0 || onset > len || length > len - onset) {
    throw RangeError("extract_epoch: window [" + std::to_string(onset) + ", " +
                     std::to_string(onset + length) + ") outside recording of length " +
                     std::to_string(len));
  }
  std::vector<float> out(x.channels * length);
  for (std::size_t c = 0; c < x.channels; ++c) {
    std::copy_n(x.samples.begin() + static_cast<std::ptrdiff_t>(c * len + onset), length,
                out.begin() + static_cast<std::ptrdiff_t>(c * length));
  }
  return core::Tensor({x.channels, length}, std::move(out));
}

}  // namespace spellerssl::signal
