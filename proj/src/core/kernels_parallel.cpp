#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "spellerssl/core/kernels.hpp"

namespace spellerssl::core::kernels::parallel {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
std::vector<T>& workspace(int slot) {
  thread_local std::vector<T> buffers[3];
  return buffers[slot];
}

// Range of output positions t whose tap k lands inside [0, in_length).
inline void valid_range(const ConvGeometry& g, std::size_t k, std::size_t& lo, std::size_t& hi) {
  const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                              static_cast<std::int64_t>(g.padding);
  const auto s = static_cast<std::int64_t>(g.stride);
  const auto lin = static_cast<std::int64_t>(g.in_length);
  const auto lout = static_cast<std::int64_t>(g.out_length);
  std::int64_t first = offset >= 0 ? 0 : (-offset + s - 1) / s;
  std::int64_t last = (lin - 1 - offset) >= 0 ? (lin - 1 - offset) / s + 1 : 0;
  first = std::clamp<std::int64_t>(first, 0, lout);
  last = std::clamp<std::int64_t>(last, first, lout);
  lo = static_cast<std::size_t>(first);
  hi = static_cast<std::size_t>(last);
}

// col[(ci*K + k)][n*Lout + t] = x[n][ci][t*s + k*d - p], zero outside.
template <typename T>
void im2col(const ConvGeometry& g, std::span<const T> x, std::vector<T>& col) {
  const std::size_t cols = g.batch * g.out_length;
  col.assign(g.in_channels * g.kernel * cols, T{0});
  const auto rows = static_cast<std::int64_t>(g.in_channels * g.kernel);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < rows; ++row) {
    const std::size_t ci = static_cast<std::size_t>(row) / g.kernel;
    const std::size_t k = static_cast<std::size_t>(row) % g.kernel;
    std::size_t lo = 0, hi = 0;
    valid_range(g, k, lo, hi);
    const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                                static_cast<std::int64_t>(g.padding);
    T* dst_row = col.data() + static_cast<std::size_t>(row) * cols;
    for (std::size_t n = 0; n < g.batch; ++n) {
      const T* src = x.data() + (n * g.in_channels + ci) * g.in_length;
      T* dst = dst_row + n * g.out_length;
      if (g.stride == 1) {
        const T* from = src + (static_cast<std::int64_t>(lo) + offset);
        std::copy(from, from + (hi - lo), dst + lo);
      } else {
        for (std::size_t t = lo; t < hi; ++t) {
          dst[t] = src[static_cast<std::int64_t>(t * g.stride) + offset];
        }
      }
    }
  }
}

// dx[n][ci][t*s + k*d - p] += dcol[(ci*K + k)][n*Lout + t]
template <typename T>
void col2im(const ConvGeometry& g, const std::vector<T>& dcol, std::span<T> dx) {
  const std::size_t cols = g.batch * g.out_length;
  const auto units = static_cast<std::int64_t>(g.batch * g.in_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t unit = 0; unit < units; ++unit) {
    const std::size_t n = static_cast<std::size_t>(unit) / g.in_channels;
    const std::size_t ci = static_cast<std::size_t>(unit) % g.in_channels;
    T* dst = dx.data() + (n * g.in_channels + ci) * g.in_length;
    for (std::size_t k = 0; k < g.kernel; ++k) {
      std::size_t lo = 0, hi = 0;
      valid_range(g, k, lo, hi);
      const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                                  static_cast<std::int64_t>(g.padding);
      const T* src = dcol.data() + (ci * g.kernel + k) * cols + n * g.out_length;
      for (std::size_t t = lo; t < hi; ++t) {
        dst[static_cast<std::int64_t>(t * g.stride) + offset] += src[t];
      }
    }
  }
}

// [N][Cout][Lout] <-> [Cout][N*Lout]
template <typename T>
void gather_rows(const ConvGeometry& g, std::span<const T> dy, std::vector<T>& mat) {
  const std::size_t cols = g.batch * g.out_length;
  mat.resize(g.out_channels * cols);
  const auto units = static_cast<std::int64_t>(g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t co = 0; co < units; ++co) {
    for (std::size_t n = 0; n < g.batch; ++n) {
      const T* src = dy.data() + (n * g.out_channels + static_cast<std::size_t>(co)) * g.out_length;
      std::copy(src, src + g.out_length,
                mat.data() + static_cast<std::size_t>(co) * cols + n * g.out_length);
    }
  }
}

template <typename T>
void grouped_forward(const ConvGeometry& g, std::span<const T> x, std::span<const T> w,
                     std::span<const T> bias, std::span<T> y) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  const auto units = static_cast<std::int64_t>(g.batch * g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t unit = 0; unit < units; ++unit) {
    const std::size_t n = static_cast<std::size_t>(unit) / g.out_channels;
    const std::size_t co = static_cast<std::size_t>(unit) % g.out_channels;
    const std::size_t group = co / cout_g;
    T* out = y.data() + (n * g.out_channels + co) * g.out_length;
    std::fill(out, out + g.out_length, bias.empty() ? T{0} : bias[co]);
    for (std::size_t cl = 0; cl < cin_g; ++cl) {
      const T* src = x.data() + (n * g.in_channels + group * cin_g + cl) * g.in_length;
      for (std::size_t k = 0; k < g.kernel; ++k) {
        const T wv = w[(co * cin_g + cl) * g.kernel + k];
        std::size_t lo = 0, hi = 0;
        valid_range(g, k, lo, hi);
        const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                                    static_cast<std::int64_t>(g.padding);
        for (std::size_t t = lo; t < hi; ++t) {
          out[t] += wv * src[static_cast<std::int64_t>(t * g.stride) + offset];
        }
      }
    }
  }
}

template <typename T>
void grouped_backward_input(const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> w, std::span<T> dx) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  const auto units = static_cast<std::int64_t>(g.batch * g.in_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t unit = 0; unit < units; ++unit) {
    const std::size_t n = static_cast<std::size_t>(unit) / g.in_channels;
    const std::size_t ci = static_cast<std::size_t>(unit) % g.in_channels;
    const std::size_t group = ci / cin_g;
    const std::size_t cl = ci % cin_g;
    T* dst = dx.data() + (n * g.in_channels + ci) * g.in_length;
    for (std::size_t ol = 0; ol < cout_g; ++ol) {
      const std::size_t co = group * cout_g + ol;
      const T* grad = dy.data() + (n * g.out_channels + co) * g.out_length;
      for (std::size_t k = 0; k < g.kernel; ++k) {
        const T wv = w[(co * cin_g + cl) * g.kernel + k];
        std::size_t lo = 0, hi = 0;
        valid_range(g, k, lo, hi);
        const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                                    static_cast<std::int64_t>(g.padding);
        for (std::size_t t = lo; t < hi; ++t) {
          dst[static_cast<std::int64_t>(t * g.stride) + offset] += wv * grad[t];
        }
      }
    }
  }
}

template <typename T>
void grouped_backward_weight(const ConvGeometry& g, std::span<const T> dy,
                             std::span<const T> x, std::span<T> dw, std::span<T> dbias) {
  const std::size_t cin_g = g.in_per_group();
  const std::size_t cout_g = g.out_per_group();
  const auto units = static_cast<std::int64_t>(g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t unit = 0; unit < units; ++unit) {
    const auto co = static_cast<std::size_t>(unit);
    const std::size_t group = co / cout_g;
    for (std::size_t n = 0; n < g.batch; ++n) {
      const T* grad = dy.data() + (n * g.out_channels + co) * g.out_length;
      if (!dbias.empty()) {
        T acc{0};
        for (std::size_t t = 0; t < g.out_length; ++t) acc += grad[t];
        dbias[co] += acc;
      }
      for (std::size_t cl = 0; cl < cin_g; ++cl) {
        const T* src = x.data() + (n * g.in_channels + group * cin_g + cl) * g.in_length;
        for (std::size_t k = 0; k < g.kernel; ++k) {
          std::size_t lo = 0, hi = 0;
          valid_range(g, k, lo, hi);
          const std::int64_t offset = static_cast<std::int64_t>(k * g.dilation) -
                                      static_cast<std::int64_t>(g.padding);
          T acc{0};
          for (std::size_t t = lo; t < hi; ++t) {
            acc += grad[t] * src[static_cast<std::int64_t>(t * g.stride) + offset];
          }
          dw[(co * cin_g + cl) * g.kernel + k] += acc;
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void conv1d_forward(const ConvGeometry& g, std::span<const T> x, std::span<const T> w,
                    std::span<const T> bias, std::span<T> y) {
  if (g.groups != 1) {
    grouped_forward<T>(g, x, w, bias, y);
    return;
  }
  auto& col = workspace<T>(0);
  auto& out = workspace<T>(1);
  im2col<T>(g, x, col);
  const std::size_t cols = g.batch * g.out_length;
  const std::size_t inner = g.in_channels * g.kernel;
  out.resize(g.out_channels * cols);
  Eigen::Map<const RowMatrix<T>> wm(w.data(), static_cast<Eigen::Index>(g.out_channels),
                                    static_cast<Eigen::Index>(inner));
  Eigen::Map<const RowMatrix<T>> cm(col.data(), static_cast<Eigen::Index>(inner),
                                    static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix<T>> om(out.data(), static_cast<Eigen::Index>(g.out_channels),
                              static_cast<Eigen::Index>(cols));
  om.noalias() = wm * cm;
  const auto units = static_cast<std::int64_t>(g.batch * g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t unit = 0; unit < units; ++unit) {
    const std::size_t n = static_cast<std::size_t>(unit) / g.out_channels;
    const std::size_t co = static_cast<std::size_t>(unit) % g.out_channels;
    const T b = bias.empty() ? T{0} : bias[co];
    const T* src = out.data() + co * cols + n * g.out_length;
    T* dst = y.data() + (n * g.out_channels + co) * g.out_length;
#pragma omp simd
    for (std::size_t t = 0; t < g.out_length; ++t) dst[t] = src[t] + b;
  }
}

template <typename T>
void conv1d_backward_input(const ConvGeometry& g, std::span<const T> dy,
                           std::span<const T> w, std::span<T> dx) {
  if (g.groups != 1) {
    grouped_backward_input<T>(g, dy, w, dx);
    return;
  }
  auto& grad_rows = workspace<T>(1);
  auto& dcol = workspace<T>(2);
  gather_rows<T>(g, dy, grad_rows);
  const std::size_t cols = g.batch * g.out_length;
  const std::size_t inner = g.in_channels * g.kernel;
  dcol.resize(inner * cols);
  Eigen::Map<const RowMatrix<T>> wm(w.data(), static_cast<Eigen::Index>(g.out_channels),
                                    static_cast<Eigen::Index>(inner));
  Eigen::Map<const RowMatrix<T>> gm(grad_rows.data(), static_cast<Eigen::Index>(g.out_channels),
                                    static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix<T>> dm(dcol.data(), static_cast<Eigen::Index>(inner),
                              static_cast<Eigen::Index>(cols));
  dm.noalias() = wm.transpose() * gm;
  col2im<T>(g, dcol, dx);
}

template <typename T>
void conv1d_backward_weight(const ConvGeometry& g, std::span<const T> dy,
                            std::span<const T> x, std::span<T> dw, std::span<T> dbias) {
  if (g.groups != 1) {
    grouped_backward_weight<T>(g, dy, x, dw, dbias);
    return;
  }
  auto& col = workspace<T>(0);
  auto& grad_rows = workspace<T>(1);
  im2col<T>(g, x, col);
  gather_rows<T>(g, dy, grad_rows);
  const std::size_t cols = g.batch * g.out_length;
  const std::size_t inner = g.in_channels * g.kernel;
  Eigen::Map<const RowMatrix<T>> cm(col.data(), static_cast<Eigen::Index>(inner),
                                    static_cast<Eigen::Index>(cols));
  Eigen::Map<const RowMatrix<T>> gm(grad_rows.data(), static_cast<Eigen::Index>(g.out_channels),
                                    static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix<T>> dwm(dw.data(), static_cast<Eigen::Index>(g.out_channels),
                               static_cast<Eigen::Index>(inner));
  dwm.noalias() += gm * cm.transpose();
  if (!dbias.empty()) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      const T* row = grad_rows.data() + co * cols;
      T acc{0};
      for (std::size_t c = 0; c < cols; ++c) acc += row[c];
      dbias[co] += acc;
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

}  // namespace spellerssl::core::kernels::parallel
