#include <atomic>
#include <string>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/kernels.hpp"

namespace spellerssl::core::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::kParallel};
}  // namespace

Backend active_backend() noexcept { return g_backend.load(std::memory_order_relaxed); }

void set_active_backend(Backend backend) noexcept {
  g_backend.store(backend, std::memory_order_relaxed);
}

const char* backend_name(Backend backend) noexcept {
  return backend == Backend::kReference ? "reference" : "parallel";
}

ConvGeometry ConvGeometry::make(std::size_t batch, std::size_t in_channels,
                                std::size_t out_channels, std::size_t in_length,
                                std::size_t kernel, std::size_t stride, std::size_t padding,
                                std::size_t dilation, std::size_t groups) {
  if (groups == 0 || stride == 0 || dilation == 0 || kernel == 0) {
    throw DimensionError("conv1d: kernel, stride, dilation and groups must be >= 1");
  }
  if (in_channels % groups != 0) {
    throw DimensionError("conv1d: in_channels " + std::to_string(in_channels) +
                         " not divisible by groups " + std::to_string(groups));
  }
  if (out_channels % groups != 0) {
    throw DimensionError("conv1d: out_channels " + std::to_string(out_channels) +
                         " not divisible by groups " + std::to_string(groups));
  }
  const std::size_t span = dilation * (kernel - 1) + 1;
  if (in_length + 2 * padding < span) {
    throw DimensionError("conv1d: length axis " + std::to_string(in_length) +
                         " (padding " + std::to_string(padding) +
                         ") shorter than dilated kernel extent " + std::to_string(span));
  }
  ConvGeometry g;
  g.batch = batch;
  g.in_channels = in_channels;
  g.out_channels = out_channels;
  g.in_length = in_length;
  g.kernel = kernel;
  g.stride = stride;
  g.padding = padding;
  g.dilation = dilation;
  g.groups = groups;
  g.out_length = (in_length + 2 * padding - span) / stride + 1;
  return g;
}

namespace reference {

template <typename T>
void conv1d_forward(const ConvGeometry& g, std::span<const T> x, std::span<const T> w,
                    std::span<const T> bias, std::span<T> y) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      const std::size_t group = co / cout_g;
      for (std::size_t t = 0; t < g.out_length; ++t) {
        T acc = bias.empty() ? T{0} : bias[co];
        for (std::size_t cl = 0; cl < cin_g; ++cl) {
          const std::size_t ci = group * cin_g + cl;
          for (std::size_t k = 0; k < g.kernel; ++k) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * g.stride + k * g.dilation) -
                                       static_cast<std::ptrdiff_t>(g.padding);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_length)) continue;
            acc += w[(co * cin_g + cl) * g.kernel + k] *
                   x[(n * g.in_channels + ci) * g.in_length + static_cast<std::size_t>(pos)];
          }
        }
        y[(n * g.out_channels + co) * g.out_length + t] = acc;
      }
    }
  }
}

template <typename T>
void conv1d_backward_input(const ConvGeometry& g, std::span<const T> dy,
                           std::span<const T> w, std::span<T> dx) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      const std::size_t group = co / cout_g;
      for (std::size_t t = 0; t < g.out_length; ++t) {
        const T grad = dy[(n * g.out_channels + co) * g.out_length + t];
        for (std::size_t cl = 0; cl < cin_g; ++cl) {
          const std::size_t ci = group * cin_g + cl;
          for (std::size_t k = 0; k < g.kernel; ++k) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * g.stride + k * g.dilation) -
                                       static_cast<std::ptrdiff_t>(g.padding);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_length)) continue;
            dx[(n * g.in_channels + ci) * g.in_length + static_cast<std::size_t>(pos)] +=
                w[(co * cin_g + cl) * g.kernel + k] * grad;
          }
        }
      }
    }
  }
}

template <typename T>
void conv1d_backward_weight(const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> x, std::span<T> dw, std::span<T> dbias) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      const std::size_t group = co / cout_g;
      for (std::size_t t = 0; t < g.out_length; ++t) {
        const T grad = dy[(n * g.out_channels + co) * g.out_length + t];
        if (!dbias.empty()) dbias[co] += grad;
        for (std::size_t cl = 0; cl < cin_g; ++cl) {
          const std::size_t ci = group * cin_g + cl;
          for (std::size_t k = 0; k < g.kernel; ++k) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * g.stride + k * g.dilation) -
                                       static_cast<std::ptrdiff_t>(g.padding);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_length)) continue;
            dw[(co * cin_g + cl) * g.kernel + k] +=
                grad * x[(n * g.in_channels + ci) * g.in_length + static_cast<std::size_t>(pos)];
          }
        }
      }
    }
  }
}

#define SPELLERSSL_INSTANTIATE(T)                                                         \
  template void conv1d_forward<T>(const ConvGeometry&, std::span<const T>,                \
                                  std::span<const T>, std::span<const T>, std::span<T>);  \
  template void conv1d_backward_input<T>(const ConvGeometry&, std::span<const T>,         \
                                         std::span<const T>, std::span<T>);               \
  template void conv1d_backward_weight<T>(const ConvGeometry&, std::span<const T>,        \
                                          std::span<const T>, std::span<T>, std::span<T>);

SPELLERSSL_INSTANTIATE(float)
SPELLERSSL_INSTANTIATE(double)
#undef SPELLERSSL_INSTANTIATE

}  // namespace reference
}  // namespace spellerssl::core::kernels
