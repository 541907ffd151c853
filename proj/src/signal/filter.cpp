#include "spellerssl/signal/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::signal {

using Cx = std::complex<double>;

SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate_hz) {
  if (order < 1) throw ConfigError("butterworth_bandpass: order must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("butterworth_bandpass: sample rate must be > 0");
  if (!(low_hz > 0.0 && low_hz < high_hz)) {
    throw ConfigError("butterworth_bandpass: need 0 < low < high, got " + std::to_string(low_hz) +
                      " and " + std::to_string(high_hz) + " Hz");
  }
  if (high_hz >= 0.5 * sample_rate_hz) {
    throw ConfigError("butterworth_bandpass: high edge " + std::to_string(high_hz) +
                      " Hz is at or above Nyquist (" + std::to_string(0.5 * sample_rate_hz) +
                      " Hz)");
  }
  const double fs2 = 2.0 * sample_rate_hz;
  const double w1 = fs2 * std::tan(std::numbers::pi * low_hz / sample_rate_hz);
  const double w2 = fs2 * std::tan(std::numbers::pi * high_hz / sample_rate_hz);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  // Low-pass prototype poles in the upper half plane map to the band-pass
  // poles with positive imaginary part; the conjugates complete each section.
  SosFilter sos;
  std::vector<Cx> poles;
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const Cx p = std::polar(1.0, theta);
    const Cx half = p * bw / 2.0;
    const Cx root = std::sqrt(half * half - w0sq);
    for (const Cx s : {half + root, half - root}) {
      const Cx z = (fs2 + s) / (fs2 - s);
      if (z.imag() > 0.0) poles.push_back(z);
    }
  }
  if (poles.size() != static_cast<std::size_t>(order)) {
    throw ConfigError("butterworth_bandpass: band too narrow to separate pole pairs");
  }
  for (const Cx& z : poles) {
    Biquad q;
    q.b0 = 1.0;
    q.b1 = 0.0;
    q.b2 = -1.0;
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    sos.push_back(q);
  }
  const double centre_hz =
      sample_rate_hz / std::numbers::pi * std::atan(std::sqrt(w0sq) / fs2);
  const double gain = 1.0 / std::abs(frequency_response(sos, centre_hz, sample_rate_hz));
  const double per_section = std::pow(gain, 1.0 / order);
  for (auto& q : sos) {
    q.b0 *= per_section;
    q.b1 *= per_section;
    q.b2 *= per_section;
  }
  return sos;
}

std::complex<double> frequency_response(const SosFilter& sos, double freq_hz,
                                        double sample_rate_hz) {
  const Cx zi = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
  Cx h = 1.0;
  for (const auto& q : sos) {
    h *= (q.b0 + q.b1 * zi + q.b2 * zi * zi) / (1.0 + q.a1 * zi + q.a2 * zi * zi);
  }
  return h;
}

void sos_filter(const SosFilter& sos, std::span<double> x, std::span<double> state) {
  if (state.size() != 2 * sos.size()) {
    throw DimensionError("sos_filter: state needs 2 values per section");
  }
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    double z1 = state[2 * s];
    double z2 = state[2 * s + 1];
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
    state[2 * s] = z1;
    state[2 * s + 1] = z2;
  }
}

std::vector<double> sos_steady_state(const SosFilter& sos) {
  std::vector<double> zi(2 * sos.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    const double dc = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double z2 = q.b2 - q.a2 * dc;
    const double z1 = q.b1 - q.a1 * dc + z2;
    zi[2 * s] = scale * z1;
    zi[2 * s + 1] = scale * z2;
    scale *= dc;
  }
  return zi;
}

void sos_filtfilt(const SosFilter& sos, std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 0) return;
  const std::size_t pad = std::min<std::size_t>(3 * (2 * sos.size() + 1), n - 1);
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  const auto zi = sos_steady_state(sos);
  std::vector<double> state(zi.size());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * ext.front();
  sos_filter(sos, ext, state);
  std::reverse(ext.begin(), ext.end());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * ext.front();
  sos_filter(sos, ext, state);
  std::reverse(ext.begin(), ext.end());
  std::copy_n(ext.begin() + static_cast<std::ptrdiff_t>(pad), n, x.begin());
}

}  // namespace spellerssl::signal
