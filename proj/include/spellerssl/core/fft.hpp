#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spellerssl::core {

using Complex = std::complex<double>;

// Mixed-radix decimation-in-time DFT, X[k] = sum_n x[n] exp(-2 pi i k n / L).
// Lengths factor into radices 4, 2, 3, 5 first; any remaining prime factor p
// runs through a generic O(p^2) butterfly, so a prime length is the plain
// quadratic DFT. Computation is always in double precision.
class FftPlan {
 public:
  explicit FftPlan(std::size_t length);

  std::size_t length() const { return length_; }
  const std::vector<std::size_t>& factors() const { return factors_; }

  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  // Inverse including the 1/L normalisation.
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  void transform(const Complex* in, std::size_t in_stride, Complex* out,
                 std::size_t fstride, std::size_t factor_index, std::size_t n,
                 std::vector<Complex>& scratch) const;

  std::size_t length_;
  std::vector<std::size_t> factors_;
  std::vector<Complex> twiddles_;
};

// Per-thread cache of plans keyed by length.
const FftPlan& fft_plan(std::size_t length);

std::vector<Complex> fft(std::span<const Complex> in);
std::vector<Complex> ifft(std::span<const Complex> in);

}  // namespace spellerssl::core
