#pragma once

#include <cstddef>
#include <span>

namespace spellerssl::core::kernels {

// Batched 1D convolution geometry, layouts x[N][Cin][Lin], w[Cout][Cin/g][K],
// y[N][Cout][Lout]. Cross-correlation convention (no kernel flip).
struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t in_length = 1;
  std::size_t out_length = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t dilation = 1;
  std::size_t groups = 1;

  std::size_t in_per_group() const { return in_channels / groups; }
  std::size_t out_per_group() const { return out_channels / groups; }
  std::size_t input_size() const { return batch * in_channels * in_length; }
  std::size_t output_size() const { return batch * out_channels * out_length; }
  std::size_t weight_size() const { return out_channels * in_per_group() * kernel; }

  // Fills out_length from the others; throws DimensionError when the
  // configuration is invalid or yields an empty output.
  static ConvGeometry make(std::size_t batch, std::size_t in_channels,
                           std::size_t out_channels, std::size_t in_length,
                           std::size_t kernel, std::size_t stride, std::size_t padding,
                           std::size_t dilation, std::size_t groups);
};

enum class Backend { kReference, kParallel };

// Process-wide backend used by the differentiable ops. Defaults to kParallel.
Backend active_backend() noexcept;
void set_active_backend(Backend backend) noexcept;

const char* backend_name(Backend backend) noexcept;

// Straightforward nested loops. Kept as the oracle for the parallel path.
namespace reference {

template <typename T>
void conv1d_forward(const ConvGeometry& g, std::span<const T> x, std::span<const T> w,
                    std::span<const T> bias, std::span<T> y);

// dx += conv1d_forward^T(dy)
template <typename T>
void conv1d_backward_input(const ConvGeometry& g, std::span<const T> dy,
                           std::span<const T> w, std::span<T> dx);

// dw += dL/dw, dbias += dL/dbias (dbias may be empty).
template <typename T>
void conv1d_backward_weight(const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> x, std::span<T> dw, std::span<T> dbias);

}  // namespace reference

// im2col + GEMM for dense convolutions, direct OpenMP loops for grouped ones.
namespace parallel {

template <typename T>
void conv1d_forward(const ConvGeometry& g, std::span<const T> x, std::span<const T> w,
                    std::span<const T> bias, std::span<T> y);

template <typename T>
void conv1d_backward_input(const ConvGeometry& g, std::span<const T> dy,
                           std::span<const T> w, std::span<T> dx);

template <typename T>
void conv1d_backward_weight(const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> x, std::span<T> dw, std::span<T> dbias);

}  // namespace parallel

template <typename T>
void conv1d_forward(Backend backend, const ConvGeometry& g, std::span<const T> x,
                    std::span<const T> w, std::span<const T> bias, std::span<T> y) {
  if (backend == Backend::kReference) {
    reference::conv1d_forward<T>(g, x, w, bias, y);
  } else {
    parallel::conv1d_forward<T>(g, x, w, bias, y);
  }
}

template <typename T>
void conv1d_backward_input(Backend backend, const ConvGeometry& g, std::span<const T> dy,
                           std::span<const T> w, std::span<T> dx) {
  if (backend == Backend::kReference) {
    reference::conv1d_backward_input<T>(g, dy, w, dx);
  } else {
    parallel::conv1d_backward_input<T>(g, dy, w, dx);
  }
}

template <typename T>
void conv1d_backward_weight(Backend backend, const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> x, std::span<T> dw, std::span<T> dbias) {
  if (backend == Backend::kReference) {
    reference::conv1d_backward_weight<T>(g, dy, x, dw, dbias);
  } else {
    parallel::conv1d_backward_weight<T>(g, dy, x, dw, dbias);
  }
}

}  // namespace spellerssl::core::kernels
