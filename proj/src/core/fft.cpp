#include "spellerssl/core/fft.hpp"

#include <map>
#include <memory>
#include <numbers>

#include "spellerssl/core/error.hpp"

namespace spellerssl::core {

namespace {

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> factors;
  while (n % 4 == 0) {
    factors.push_back(4);
    n /= 4;
  }
  for (std::size_t p : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
    while (n % p == 0 && n > 1) {
      factors.push_back(p);
      n /= p;
    }
  }
  for (std::size_t p = 7; p * p <= n; p += 2) {
    while (n % p == 0) {
      factors.push_back(p);
      n /= p;
    }
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

}  // namespace

FftPlan::FftPlan(std::size_t length) : length_(length) {
  if (length == 0) throw DimensionError("fft length must be >= 1");
  factors_ = length == 1 ? std::vector<std::size_t>{1} : factorize(length);
  twiddles_.resize(length);
  for (std::size_t j = 0; j < length; ++j) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(length);
    twiddles_[j] = Complex(std::cos(angle), std::sin(angle));
  }
}

void FftPlan::transform(const Complex* in, std::size_t in_stride, Complex* out,
                        std::size_t fstride, std::size_t factor_index, std::size_t n,
                        std::vector<Complex>& scratch) const {
  const std::size_t p = factors_[factor_index];
  const std::size_t m = n / p;
  if (m == 1) {
    for (std::size_t q = 0; q < p; ++q) out[q] = in[q * fstride * in_stride];
  } else {
    for (std::size_t q = 0; q < p; ++q) {
      transform(in + q * fstride * in_stride, in_stride, out + q * m, fstride * p,
                factor_index + 1, m, scratch);
    }
  }
  if (p == 1) return;

  // out[q*m + u] holds the length-m DFT of the q-th decimated subsequence;
  // combine them with twiddles W_N^{fstride * q * k}.
  scratch.resize(p);
  const std::size_t total = length_;
  if (p == 2) {
    for (std::size_t u = 0; u < m; ++u) {
      const Complex a = out[u];
      const Complex b = out[u + m] * twiddles_[fstride * u];
      out[u] = a + b;
      out[u + m] = a - b;
    }
    return;
  }
  if (p == 4) {
    for (std::size_t u = 0; u < m; ++u) {
      const Complex a0 = out[u];
      const Complex a1 = out[u + m] * twiddles_[fstride * u];
      const Complex a2 = out[u + 2 * m] * twiddles_[2 * fstride * u];
      const Complex a3 = out[u + 3 * m] * twiddles_[3 * fstride * u];
      const Complex s02 = a0 + a2;
      const Complex d02 = a0 - a2;
      const Complex s13 = a1 + a3;
      const Complex d13 = a1 - a3;
      const Complex rot(d13.imag(), -d13.real());  // -i * d13
      out[u] = s02 + s13;
      out[u + m] = d02 + rot;
      out[u + 2 * m] = s02 - s13;
      out[u + 3 * m] = d02 - rot;
    }
    return;
  }
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
    for (std::size_t q1 = 0; q1 < p; ++q1) {
      const std::size_t k = u + q1 * m;
      Complex sum = scratch[0];
      std::size_t tw = 0;
      for (std::size_t q = 1; q < p; ++q) {
        tw += fstride * k;
        tw %= total;
        sum += scratch[q] * twiddles_[tw];
      }
      out[k] = sum;
    }
  }
}

void FftPlan::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != length_ || out.size() != length_) {
    throw DimensionError("fft plan of length " + std::to_string(length_) +
                         " applied to buffers of length " + std::to_string(in.size()) +
                         "/" + std::to_string(out.size()));
  }
  if (length_ == 1) {
    out[0] = in[0];
    return;
  }
  std::vector<Complex> scratch;
  if (in.data() == out.data()) {
    std::vector<Complex> copy(in.begin(), in.end());
    transform(copy.data(), 1, out.data(), 1, 0, length_, scratch);
  } else {
    transform(in.data(), 1, out.data(), 1, 0, length_, scratch);
  }
}

void FftPlan::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  std::vector<Complex> conj_in(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) conj_in[i] = std::conj(in[i]);
  forward(conj_in, out);
  const double scale = 1.0 / static_cast<double>(length_);
  for (auto& v : out) v = std::conj(v) * scale;
}

const FftPlan& fft_plan(std::size_t length) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[length];
  if (!slot) slot = std::make_unique<FftPlan>(length);
  return *slot;
}

std::vector<Complex> fft(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  fft_plan(in.size()).forward(in, out);
  return out;
}

std::vector<Complex> ifft(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  fft_plan(in.size()).inverse(in, out);
  return out;
}

}  // namespace spellerssl::core
