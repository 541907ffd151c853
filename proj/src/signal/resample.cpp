#include "spellerssl/signal/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::signal {

Ratio rational_ratio(double source_hz, double target_hz, std::size_t max_factor) {
  if (!(source_hz > 0.0 && target_hz > 0.0) || !std::isfinite(source_hz) ||
      !std::isfinite(target_hz)) {
    throw ConfigError("resample: sample rates must be positive and finite");
  }
  const double ratio = target_hz / source_hz;
  for (std::size_t down = 1; down <= max_factor; ++down) {
    const double up_exact = ratio * static_cast<double>(down);
    const double up = std::round(up_exact);
    if (up < 1.0 || up > static_cast<double>(max_factor)) continue;
    if (std::abs(up - up_exact) <= 1e-9 * up_exact) {
      const auto u = static_cast<std::size_t>(up);
      const std::size_t g = std::gcd(u, down);
      return {u / g, down / g};
    }
  }
  throw ConfigError("resample: ratio " + std::to_string(target_hz) + "/" +
                    std::to_string(source_hz) + " has no rational form with factors <= " +
                    std::to_string(max_factor));
}

namespace {

// Zeroth-order modified Bessel function of the first kind (power series).
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

PolyphaseResampler::PolyphaseResampler(std::size_t up, std::size_t down) : up_(up), down_(down) {
  if (up == 0 || down == 0) throw ConfigError("resample: up and down must be >= 1");
  const std::size_t g = std::gcd(up, down);
  up_ /= g;
  down_ /= g;
  const std::size_t m = std::max(up_, down_);
  half_ = 10 * m;
  const double beta = 5.0;
  const double norm = bessel_i0(beta);
  taps_.resize(2 * half_ + 1);
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const double n = static_cast<double>(i) - static_cast<double>(half_);
    const double t = n / static_cast<double>(m);
    const double sinc = n == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double r = n / static_cast<double>(half_);
    const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    taps_[i] = sinc * window;
  }
  branch_gain_.assign(up_, 0.0);
  for (std::size_t i = 0; i < taps_.size(); ++i) branch_gain_[i % up_] += taps_[i];
  for (auto& g_b : branch_gain_) g_b = 1.0 / g_b;
}

std::size_t PolyphaseResampler::output_length(std::size_t input_length) const {
  return (input_length * up_ + down_ / 2) / down_;
}

std::vector<double> PolyphaseResampler::apply(std::span<const double> x) const {
  const std::size_t n = x.size();
  std::vector<double> y(output_length(n));
  if (n == 0) return y;
  const auto sample = [&](std::ptrdiff_t i) {
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    if (i < 0) {
      const std::ptrdiff_t j = std::min(-i, last);
      return 2.0 * x[0] - x[static_cast<std::size_t>(j)];
    }
    if (i > last) {
      const std::ptrdiff_t j = std::max<std::ptrdiff_t>(2 * last - i, 0);
      return 2.0 * x[n - 1] - x[static_cast<std::size_t>(j)];
    }
    return x[static_cast<std::size_t>(i)];
  };
  const auto up = static_cast<std::ptrdiff_t>(up_);
  const auto half = static_cast<std::ptrdiff_t>(half_);
  for (std::size_t m = 0; m < y.size(); ++m) {
    // Upsampled position j = m*down; input n contributes tap j - n*up + half.
    const auto j = static_cast<std::ptrdiff_t>(m * down_);
    const std::ptrdiff_t first_tap = (j + half) % up;
    const std::ptrdiff_t n_hi = (j + half - first_tap) / up;
    double acc = 0.0;
    std::ptrdiff_t idx = n_hi;
    for (std::ptrdiff_t tap = first_tap; tap < static_cast<std::ptrdiff_t>(taps_.size());
         tap += up, --idx) {
      acc += taps_[static_cast<std::size_t>(tap)] * sample(idx);
    }
    y[m] = acc * branch_gain_[static_cast<std::size_t>(first_tap)];
  }
  return y;
}

}  // namespace spellerssl::signal
