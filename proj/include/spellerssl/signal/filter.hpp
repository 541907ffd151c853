#pragma once

#include <complex>
#include <span>
#include <vector>

namespace spellerssl::signal {

// One biquad, a0 normalised to 1:
// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

using SosFilter = std::vector<Biquad>;

// Digital Butterworth band-pass of the given prototype order (2*order poles,
// `order` sections) via the bilinear transform with prewarped edges. Gain is
// 1 at the geometric centre. Throws ConfigError for invalid band edges.
SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate_hz);

std::complex<double> frequency_response(const SosFilter& sos, double freq_hz,
                                        double sample_rate_hz);

// Direct-form II transposed cascade. `state` holds two values per section and
// is updated in place.
void sos_filter(const SosFilter& sos, std::span<double> x, std::span<double> state);

// Initial state giving the steady-state response to a unit step.
std::vector<double> sos_steady_state(const SosFilter& sos);

// Forward-backward filtering with odd-extension padding and steady-state
// initial conditions. The padding length is 3 * (2 * sections + 1), capped at
// x.size() - 1.
void sos_filtfilt(const SosFilter& sos, std::span<double> x);

}  // namespace spellerssl::signal
