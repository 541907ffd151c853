#include "spellerssl/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/fft.hpp"
#include "spellerssl/core/kernels.hpp"

namespace spellerssl::core {

namespace {

template <typename T>
void require_same_shape(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
}

template <typename T>
void require_rank(const BasicTensor<T>& x, std::size_t lo, std::size_t hi, const char* op,
                  const char* what) {
  if (x.dim() < lo || x.dim() > hi) {
    throw DimensionError(std::string(op) + ": " + what + " has shape " + shape_str(x.shape()) +
                         ", expected rank " + std::to_string(lo) +
                         (lo == hi ? "" : "-" + std::to_string(hi)));
  }
}

// Views [C, L] as [1, C, L] for the batched kernels.
struct Batched {
  std::size_t batch;
  std::size_t channels;
  std::size_t length;
  bool unbatched;
};

template <typename T>
Batched batched_view(const BasicTensor<T>& x, const char* op) {
  require_rank(x, 2, 3, op, "input");
  if (x.dim() == 2) return {1, x.size(0), x.size(1), true};
  return {x.size(0), x.size(1), x.size(2), false};
}

Shape batched_shape(const Batched& b, std::size_t channels, std::size_t length) {
  if (b.unbatched) return {channels, length};
  return {b.batch, channels, length};
}

}  // namespace

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.numel());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  auto an = a.node();
  auto bn = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b},
                                     [an, bn](const std::vector<T>& g) {
                                       if (auto s = grad_sink(an); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i];
                                       if (auto s = grad_sink(bn); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i];
                                     });
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.numel());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  auto an = a.node();
  auto bn = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b},
                                     [an, bn](const std::vector<T>& g) {
                                       if (auto s = grad_sink(an); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i];
                                       if (auto s = grad_sink(bn); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i) s[i] -= g[i];
                                     });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> out(a.numel());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  auto an = a.node();
  auto bn = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b},
                                     [an, bn](const std::vector<T>& g) {
                                       if (auto s = grad_sink(an); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i)
                                           s[i] += g[i] * bn->data[i];
                                       if (auto s = grad_sink(bn); !s.empty())
                                         for (std::size_t i = 0; i < g.size(); ++i)
                                           s[i] += g[i] * an->data[i];
                                     });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  std::vector<T> out(a.values().begin(), a.values().end());
  for (auto& v : out) v *= factor;
  auto an = a.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a},
                                     [an, factor](const std::vector<T>& g) {
                                       auto s = grad_sink(an);
                                       for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * factor;
                                     });
}

template <typename T>
BasicTensor<T> square(const BasicTensor<T>& a) {
  std::vector<T> out(a.numel());
  auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * av[i];
  auto an = a.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a},
                                     [an](const std::vector<T>& g) {
                                       auto s = grad_sink(an);
                                       for (std::size_t i = 0; i < s.size(); ++i)
                                         s[i] += T{2} * an->data[i] * g[i];
                                     });
}

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& a) {
  T acc{0};
  for (T v : a.values()) acc += v;
  auto an = a.node();
  return BasicTensor<T>::make_result(Shape{1}, {acc}, {a}, [an](const std::vector<T>& g) {
    auto s = grad_sink(an);
    for (auto& v : s) v += g[0];
  });
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& a) {
  const std::size_t n = a.numel();
  if (n == 0) throw DimensionError("mean of an empty tensor");
  T acc{0};
  for (T v : a.values()) acc += v;
  auto an = a.node();
  const T inv = T{1} / static_cast<T>(n);
  return BasicTensor<T>::make_result(Shape{1}, {acc * inv}, {a},
                                     [an, inv](const std::vector<T>& g) {
                                       auto s = grad_sink(an);
                                       for (auto& v : s) v += g[0] * inv;
                                     });
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                         shape_str(shape));
  }
  std::vector<T> out(a.values().begin(), a.values().end());
  auto an = a.node();
  return BasicTensor<T>::make_result(std::move(shape), std::move(out), {a},
                                     [an](const std::vector<T>& g) {
                                       auto s = grad_sink(an);
                                       for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i];
                                     });
}

template <typename T>
BasicTensor<T> conv1d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, const Conv1dOptions& options) {
  const Batched in = batched_view(x, "conv1d");
  require_rank(weight, 3, 3, "conv1d", "weight");
  const std::size_t out_channels = weight.size(0);
  if (weight.size(1) * options.groups != in.channels) {
    throw DimensionError("conv1d: channel axis of input " + shape_str(x.shape()) +
                         " does not match weight " + shape_str(weight.shape()) + " with groups " +
                         std::to_string(options.groups));
  }
  if (bias.defined() && (bias.dim() != 1 || bias.size(0) != out_channels)) {
    throw DimensionError("conv1d: bias " + shape_str(bias.shape()) +
                         " does not match output channels " + std::to_string(out_channels));
  }
  const auto geom = kernels::ConvGeometry::make(in.batch, in.channels, out_channels, in.length,
                                                weight.size(2), options.stride, options.padding,
                                                options.dilation, options.groups);
  std::vector<T> out(geom.output_size());
  const auto backend = kernels::active_backend();
  kernels::conv1d_forward<T>(backend, geom, x.values(), weight.values(),
                             bias.defined() ? bias.values() : std::span<const T>{}, out);

  auto xn = x.node();
  auto wn = weight.node();
  auto bn = bias.defined() ? bias.node() : nullptr;
  return BasicTensor<T>::make_result(
      batched_shape(in, out_channels, geom.out_length), std::move(out), {x, weight, bias},
      [xn, wn, bn, geom, backend](const std::vector<T>& g) {
        if (auto dx = grad_sink(xn); !dx.empty()) {
          kernels::conv1d_backward_input<T>(backend, geom, g, wn->data, dx);
        }
        auto dw = grad_sink(wn);
        auto db = grad_sink(bn);
        if (!dw.empty()) {
          kernels::conv1d_backward_weight<T>(backend, geom, g, xn->data, dw, db);
        } else if (!db.empty()) {
          for (std::size_t n = 0; n < geom.batch; ++n)
            for (std::size_t co = 0; co < geom.out_channels; ++co)
              for (std::size_t t = 0; t < geom.out_length; ++t)
                db[co] += g[(n * geom.out_channels + co) * geom.out_length + t];
        }
      });
}

template <typename T>
BasicTensor<T> conv_transpose1d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                                const BasicTensor<T>& bias,
                                const ConvTranspose1dOptions& options) {
  const Batched in = batched_view(x, "conv_transpose1d");
  require_rank(weight, 3, 3, "conv_transpose1d", "weight");
  if (weight.size(0) != in.channels) {
    throw DimensionError("conv_transpose1d: channel axis of input " + shape_str(x.shape()) +
                         " does not match weight " + shape_str(weight.shape()));
  }
  const std::size_t out_channels = weight.size(1);
  const std::size_t kernel = weight.size(2);
  if (bias.defined() && (bias.dim() != 1 || bias.size(0) != out_channels)) {
    throw DimensionError("conv_transpose1d: bias " + shape_str(bias.shape()) +
                         " does not match output channels " + std::to_string(out_channels));
  }
  const std::size_t s = options.stride;
  const std::ptrdiff_t out_len_signed =
      static_cast<std::ptrdiff_t>((in.length - 1) * s + kernel + options.output_padding) -
      static_cast<std::ptrdiff_t>(2 * options.padding);
  if (s == 0 || out_len_signed != static_cast<std::ptrdiff_t>(s * in.length)) {
    throw ConfigError("conv_transpose1d: kernel " + std::to_string(kernel) + ", stride " +
                      std::to_string(s) + ", padding " + std::to_string(options.padding) +
                      ", output_padding " + std::to_string(options.output_padding) +
                      " gives output length " + std::to_string(out_len_signed) +
                      ", expected exactly stride*L = " + std::to_string(s * in.length));
  }
  const std::size_t out_length = s * in.length;
  // The adjoint convolution maps [N, Cout, out_length] -> [N, Cin, L].
  const auto geom = kernels::ConvGeometry::make(in.batch, out_channels, in.channels, out_length,
                                                kernel, s, options.padding, 1, 1);
  if (geom.out_length != in.length) {
    throw ConfigError("conv_transpose1d: inconsistent geometry for output_padding " +
                      std::to_string(options.output_padding));
  }
  const auto backend = kernels::active_backend();
  std::vector<T> out(in.batch * out_channels * out_length, T{0});
  kernels::conv1d_backward_input<T>(backend, geom, x.values(), weight.values(), out);
  if (bias.defined()) {
    auto bv = bias.values();
    for (std::size_t n = 0; n < in.batch; ++n)
      for (std::size_t c = 0; c < out_channels; ++c) {
        T* row = out.data() + (n * out_channels + c) * out_length;
        for (std::size_t t = 0; t < out_length; ++t) row[t] += bv[c];
      }
  }

  auto xn = x.node();
  auto wn = weight.node();
  auto bn = bias.defined() ? bias.node() : nullptr;
  return BasicTensor<T>::make_result(
      batched_shape(in, out_channels, out_length), std::move(out), {x, weight, bias},
      [xn, wn, bn, geom, backend, out_channels, out_length](const std::vector<T>& g) {
        if (auto dx = grad_sink(xn); !dx.empty()) {
          std::vector<T> tmp(dx.size());
          kernels::conv1d_forward<T>(backend, geom, g, wn->data, {}, tmp);
          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += tmp[i];
        }
        if (auto dw = grad_sink(wn); !dw.empty()) {
          kernels::conv1d_backward_weight<T>(backend, geom, xn->data, g, dw, {});
        }
        if (auto db = grad_sink(bn); !db.empty()) {
          for (std::size_t n = 0; n < geom.batch; ++n)
            for (std::size_t c = 0; c < out_channels; ++c)
              for (std::size_t t = 0; t < out_length; ++t)
                db[c] += g[(n * out_channels + c) * out_length + t];
        }
      });
}

template <typename T>
BasicTensor<T> maxpool1d(const BasicTensor<T>& x, std::size_t kernel, std::size_t stride) {
  const Batched in = batched_view(x, "maxpool1d");
  if (kernel == 0 || stride == 0) throw DimensionError("maxpool1d: kernel and stride must be >= 1");
  if (in.length < kernel) {
    throw DimensionError("maxpool1d: length axis " + std::to_string(in.length) +
                         " shorter than kernel " + std::to_string(kernel));
  }
  const std::size_t out_length = (in.length - kernel) / stride + 1;
  const std::size_t rows = in.batch * in.channels;
  std::vector<T> out(rows * out_length);
  std::vector<std::size_t> argmax(out.size());
  auto xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = xv.data() + r * in.length;
    for (std::size_t t = 0; t < out_length; ++t) {
      std::size_t best = t * stride;
      for (std::size_t k = 1; k < kernel; ++k) {
        if (src[t * stride + k] > src[best]) best = t * stride + k;
      }
      out[r * out_length + t] = src[best];
      argmax[r * out_length + t] = r * in.length + best;
    }
  }
  auto xn = x.node();
  return BasicTensor<T>::make_result(batched_shape(in, in.channels, out_length), std::move(out),
                                     {x}, [xn, argmax = std::move(argmax)](const std::vector<T>& g) {
                                       auto s = grad_sink(xn);
                                       for (std::size_t i = 0; i < g.size(); ++i) s[argmax[i]] += g[i];
                                     });
}

template <typename T>
BasicTensor<T> batchnorm1d(const BasicTensor<T>& x, const BasicTensor<T>& gamma,
                           const BasicTensor<T>& beta, BasicTensor<T>& running_mean,
                           BasicTensor<T>& running_var, const BatchNormOptions& options) {
  require_rank(x, 3, 3, "batchnorm1d", "input");
  const std::size_t batch = x.size(0);
  const std::size_t channels = x.size(1);
  const std::size_t length = x.size(2);
  for (const BasicTensor<T>* p : {&gamma, &beta, static_cast<const BasicTensor<T>*>(&running_mean),
                                  static_cast<const BasicTensor<T>*>(&running_var)}) {
    if (p->numel() != channels) {
      throw DimensionError("batchnorm1d: channel axis " + std::to_string(channels) +
                           " does not match parameter of shape " + shape_str(p->shape()));
    }
  }
  const std::size_t count = batch * length;
  const bool train = options.mode == NormMode::kTrain;
  if (train && count < 2) {
    throw DimensionError("batchnorm1d: degenerate batch, N*L = " + std::to_string(count) +
                         " < 2 in train mode");
  }
  auto xv = x.values();
  auto gv = gamma.values();
  auto bv = beta.values();
  std::vector<T> mu(channels), inv_std(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    if (train) {
      double acc = 0.0;
      for (std::size_t n = 0; n < batch; ++n) {
        const T* row = xv.data() + (n * channels + c) * length;
        for (std::size_t t = 0; t < length; ++t) acc += row[t];
      }
      const double m = acc / static_cast<double>(count);
      double var = 0.0;
      for (std::size_t n = 0; n < batch; ++n) {
        const T* row = xv.data() + (n * channels + c) * length;
        for (std::size_t t = 0; t < length; ++t) {
          const double d = row[t] - m;
          var += d * d;
        }
      }
      var /= static_cast<double>(count);
      mu[c] = static_cast<T>(m);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + options.eps));
      const double unbiased = var * static_cast<double>(count) / static_cast<double>(count - 1);
      auto rm = running_mean.values();
      auto rv = running_var.values();
      rm[c] = static_cast<T>((1.0 - options.momentum) * rm[c] + options.momentum * m);
      rv[c] = static_cast<T>((1.0 - options.momentum) * rv[c] + options.momentum * unbiased);
    } else {
      mu[c] = running_mean.values()[c];
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var.values()[c]) +
                                                  options.eps));
    }
  }
  std::vector<T> xhat(x.numel());
  std::vector<T> out(x.numel());
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t base = (n * channels + c) * length;
      for (std::size_t t = 0; t < length; ++t) {
        const T h = (xv[base + t] - mu[c]) * inv_std[c];
        xhat[base + t] = h;
        out[base + t] = gv[c] * h + bv[c];
      }
    }
  }

  auto xn = x.node();
  auto gn = gamma.node();
  auto bn = beta.node();
  return BasicTensor<T>::make_result(
      x.shape(), std::move(out), {x, gamma, beta},
      [xn, gn, bn, xhat = std::move(xhat), inv_std = std::move(inv_std), batch, channels, length,
       train](const std::vector<T>& g) {
        auto dgamma = grad_sink(gn);
        auto dbeta = grad_sink(bn);
        auto dx = grad_sink(xn);
        const T count = static_cast<T>(batch * length);
        for (std::size_t c = 0; c < channels; ++c) {
          T sum_g{0}, sum_gh{0};
          for (std::size_t n = 0; n < batch; ++n) {
            const std::size_t base = (n * channels + c) * length;
            for (std::size_t t = 0; t < length; ++t) {
              sum_g += g[base + t];
              sum_gh += g[base + t] * xhat[base + t];
            }
          }
          if (!dgamma.empty()) dgamma[c] += sum_gh;
          if (!dbeta.empty()) dbeta[c] += sum_g;
          if (dx.empty()) continue;
          const T scale_c = gn->data[c] * inv_std[c];
          for (std::size_t n = 0; n < batch; ++n) {
            const std::size_t base = (n * channels + c) * length;
            for (std::size_t t = 0; t < length; ++t) {
              if (train) {
                dx[base + t] += scale_c / count *
                                (count * g[base + t] - sum_g - xhat[base + t] * sum_gh);
              } else {
                dx[base + t] += scale_c * g[base + t];
              }
            }
          }
        }
      });
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  std::vector<T> out(x.values().begin(), x.values().end());
  for (auto& v : out) v = v > T{0} ? v : T{0};
  auto xn = x.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x},
                                     [xn](const std::vector<T>& g) {
                                       auto s = grad_sink(xn);
                                       for (std::size_t i = 0; i < s.size(); ++i)
                                         if (xn->data[i] > T{0}) s[i] += g[i];
                                     });
}

template <typename T>
BasicTensor<T> gelu(const BasicTensor<T>& x) {
  constexpr T kC = static_cast<T>(0.79788456080286535588);  // sqrt(2/pi)
  constexpr T kA = static_cast<T>(0.044715);
  std::vector<T> out(x.numel());
  auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T v = xv[i];
    out[i] = T{0.5} * v * (T{1} + std::tanh(kC * (v + kA * v * v * v)));
  }
  auto xn = x.node();
  return BasicTensor<T>::make_result(
      x.shape(), std::move(out), {x}, [xn](const std::vector<T>& g) {
        auto s = grad_sink(xn);
        for (std::size_t i = 0; i < s.size(); ++i) {
          const T v = xn->data[i];
          const T th = std::tanh(kC * (v + kA * v * v * v));
          const T d = T{0.5} * (T{1} + th) +
                      T{0.5} * v * (T{1} - th * th) * kC * (T{1} + T{3} * kA * v * v);
          s[i] += g[i] * d;
        }
      });
}

template <typename T>
BasicTensor<T> activation(const BasicTensor<T>& x, Activation kind) {
  return kind == Activation::kRelu ? relu(x) : gelu(x);
}

template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias) {
  require_rank(x, 1, 2, "linear", "input");
  require_rank(weight, 2, 2, "linear", "weight");
  const bool unbatched = x.dim() == 1;
  const std::size_t batch = unbatched ? 1 : x.size(0);
  const std::size_t in_dim = unbatched ? x.size(0) : x.size(1);
  const std::size_t out_dim = weight.size(0);
  if (weight.size(1) != in_dim) {
    throw DimensionError("linear: feature axis of input " + shape_str(x.shape()) +
                         " does not match weight " + shape_str(weight.shape()));
  }
  if (bias.defined() && bias.numel() != out_dim) {
    throw DimensionError("linear: bias " + shape_str(bias.shape()) + " does not match output " +
                         std::to_string(out_dim));
  }
  auto xv = x.values();
  auto wv = weight.values();
  std::vector<T> out(batch * out_dim);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t o = 0; o < out_dim; ++o) {
      T acc = bias.defined() ? bias.values()[o] : T{0};
      for (std::size_t d = 0; d < in_dim; ++d) acc += wv[o * in_dim + d] * xv[n * in_dim + d];
      out[n * out_dim + o] = acc;
    }
  Shape shape = unbatched ? Shape{out_dim} : Shape{batch, out_dim};
  auto xn = x.node();
  auto wn = weight.node();
  auto bn = bias.defined() ? bias.node() : nullptr;
  return BasicTensor<T>::make_result(
      std::move(shape), std::move(out), {x, weight, bias},
      [xn, wn, bn, batch, in_dim, out_dim](const std::vector<T>& g) {
        auto dx = grad_sink(xn);
        auto dw = grad_sink(wn);
        auto db = grad_sink(bn);
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t o = 0; o < out_dim; ++o) {
            const T go = g[n * out_dim + o];
            if (!db.empty()) db[o] += go;
            for (std::size_t d = 0; d < in_dim; ++d) {
              if (!dx.empty()) dx[n * in_dim + d] += wn->data[o * in_dim + d] * go;
              if (!dw.empty()) dw[o * in_dim + d] += xn->data[n * in_dim + d] * go;
            }
          }
      });
}

template <typename T>
BasicTensor<T> global_avg_pool_time(const BasicTensor<T>& x) {
  require_rank(x, 2, 3, "global_avg_pool_time", "input");
  const std::size_t steps = x.shape().back();
  if (steps == 0) throw DimensionError("global_avg_pool_time: time axis has length 0");
  const std::size_t rows = x.numel() / steps;
  Shape shape(x.shape().begin(), x.shape().end() - 1);
  std::vector<T> out(rows);
  auto xv = x.values();
  const T inv = T{1} / static_cast<T>(steps);
  for (std::size_t r = 0; r < rows; ++r) {
    T acc{0};
    for (std::size_t t = 0; t < steps; ++t) acc += xv[r * steps + t];
    out[r] = acc * inv;
  }
  auto xn = x.node();
  return BasicTensor<T>::make_result(std::move(shape), std::move(out), {x},
                                     [xn, steps, inv](const std::vector<T>& g) {
                                       auto s = grad_sink(xn);
                                       for (std::size_t i = 0; i < s.size(); ++i)
                                         s[i] += g[i / steps] * inv;
                                     });
}

template <typename T>
BasicTensor<T> concat_channels(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_rank(a, 3, 3, "concat_channels", "first input");
  require_rank(b, 3, 3, "concat_channels", "second input");
  if (a.size(0) != b.size(0) || a.size(2) != b.size(2)) {
    throw DimensionError("concat_channels: batch/length axes differ, " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
  const std::size_t batch = a.size(0), ca = a.size(1), cb = b.size(1), len = a.size(2);
  std::vector<T> out(batch * (ca + cb) * len);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < batch; ++n) {
    std::copy_n(av.data() + n * ca * len, ca * len, out.data() + n * (ca + cb) * len);
    std::copy_n(bv.data() + n * cb * len, cb * len, out.data() + n * (ca + cb) * len + ca * len);
  }
  auto an = a.node();
  auto bn = b.node();
  return BasicTensor<T>::make_result(
      Shape{batch, ca + cb, len}, std::move(out), {a, b},
      [an, bn, batch, ca, cb, len](const std::vector<T>& g) {
        auto da = grad_sink(an);
        auto db = grad_sink(bn);
        for (std::size_t n = 0; n < batch; ++n) {
          const T* src = g.data() + n * (ca + cb) * len;
          if (!da.empty())
            for (std::size_t i = 0; i < ca * len; ++i) da[n * ca * len + i] += src[i];
          if (!db.empty())
            for (std::size_t i = 0; i < cb * len; ++i) db[n * cb * len + i] += src[ca * len + i];
        }
      });
}

template <typename T>
BasicTensor<T> weighted_cross_entropy(const BasicTensor<T>& logits,
                                      std::span<const int> labels,
                                      std::span<const T> class_weights) {
  require_rank(logits, 1, 2, "weighted_cross_entropy", "logits");
  const std::size_t batch = logits.dim() == 1 ? 1 : logits.size(0);
  const std::size_t classes = logits.shape().back();
  if (labels.size() != batch) {
    throw DimensionError("weighted_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for batch axis " + std::to_string(batch));
  }
  if (class_weights.size() != classes) {
    throw DimensionError("weighted_cross_entropy: " + std::to_string(class_weights.size()) +
                         " class weights for " + std::to_string(classes) + " classes");
  }
  auto zv = logits.values();
  std::vector<T> probs(batch * classes);
  T weighted{0}, weight_total{0};
  for (std::size_t i = 0; i < batch; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw LabelError("weighted_cross_entropy: label " + std::to_string(y) + " at index " +
                       std::to_string(i) + " outside [0, " + std::to_string(classes) + ")");
    }
    const T* z = zv.data() + i * classes;
    const T zmax = *std::max_element(z, z + classes);
    T denom{0};
    for (std::size_t k = 0; k < classes; ++k) denom += std::exp(z[k] - zmax);
    const T log_denom = std::log(denom) + zmax;
    for (std::size_t k = 0; k < classes; ++k) probs[i * classes + k] = std::exp(z[k] - log_denom);
    const T w = class_weights[static_cast<std::size_t>(y)];
    weighted += w * (log_denom - z[y]);
    weight_total += w;
  }
  if (!(weight_total > T{0})) {
    throw ConfigError("weighted_cross_entropy: total sample weight must be positive");
  }
  auto zn = logits.node();
  std::vector<int> label_copy(labels.begin(), labels.end());
  std::vector<T> weight_copy(class_weights.begin(), class_weights.end());
  return BasicTensor<T>::make_result(
      Shape{1}, {weighted / weight_total}, {logits},
      [zn, probs = std::move(probs), label_copy = std::move(label_copy),
       weight_copy = std::move(weight_copy), weight_total, batch,
       classes](const std::vector<T>& g) {
        auto s = grad_sink(zn);
        for (std::size_t i = 0; i < batch; ++i) {
          const auto y = static_cast<std::size_t>(label_copy[i]);
          const T coeff = g[0] * weight_copy[y] / weight_total;
          for (std::size_t k = 0; k < classes; ++k) {
            s[i * classes + k] += coeff * (probs[i * classes + k] - (k == y ? T{1} : T{0}));
          }
        }
      });
}

template <typename T>
BasicTensor<T> l1_loss(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a, b, "l1_loss");
  const std::size_t n = a.numel();
  if (n == 0) throw DimensionError("l1_loss: empty tensors");
  auto av = a.values();
  auto bv = b.values();
  T acc{0};
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(av[i] - bv[i]);
  const T inv = T{1} / static_cast<T>(n);
  auto an = a.node();
  auto bn = b.node();
  return BasicTensor<T>::make_result(
      Shape{1}, {acc * inv}, {a, b}, [an, bn, inv](const std::vector<T>& g) {
        auto da = grad_sink(an);
        auto db = grad_sink(bn);
        const std::size_t count = an->data.size();
        for (std::size_t i = 0; i < count; ++i) {
          const T d = an->data[i] - bn->data[i];
          const T sign = d > T{0} ? T{1} : (d < T{0} ? T{-1} : T{0});
          if (!da.empty()) da[i] += g[0] * inv * sign;
          if (!db.empty()) db[i] -= g[0] * inv * sign;
        }
      });
}

template <typename T>
DftResult<T> dft(const BasicTensor<T>& x) {
  if (x.dim() == 0) throw DimensionError("dft: scalar input");
  const std::size_t length = x.shape().back();
  if (length == 0) throw DimensionError("dft: last axis has length 0");
  const std::size_t rows = x.numel() / length;
  const FftPlan& plan = fft_plan(length);
  std::vector<T> re(x.numel()), im(x.numel());
  std::vector<Complex> buf_in(length), buf_out(length);
  auto xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < length; ++i) buf_in[i] = Complex(xv[r * length + i], 0.0);
    plan.forward(buf_in, buf_out);
    for (std::size_t k = 0; k < length; ++k) {
      re[r * length + k] = static_cast<T>(buf_out[k].real());
      im[r * length + k] = static_cast<T>(buf_out[k].imag());
    }
  }
  auto xn = x.node();
  // d/dx[n] of sum_k g_re[k] Re X[k]  = Re(FFT(g_re))[n]
  // d/dx[n] of sum_k g_im[k] Im X[k]  = Im(FFT(g_im))[n]
  auto make_backward = [xn, rows, length](bool real_part) {
    return [xn, rows, length, real_part](const std::vector<T>& g) {
      auto s = grad_sink(xn);
      const FftPlan& p = fft_plan(length);
      std::vector<Complex> in(length), out(length);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < length; ++k) in[k] = Complex(g[r * length + k], 0.0);
        p.forward(in, out);
        for (std::size_t i = 0; i < length; ++i) {
          s[r * length + i] += static_cast<T>(real_part ? out[i].real() : out[i].imag());
        }
      }
    };
  };
  DftResult<T> result;
  result.real = BasicTensor<T>::make_result(x.shape(), std::move(re), {x}, make_backward(true));
  result.imag = BasicTensor<T>::make_result(x.shape(), std::move(im), {x}, make_backward(false));
  return result;
}

#define SPELLERSSL_INSTANTIATE(T)                                                               \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                    \
  template BasicTensor<T> sub(const BasicTensor<T>&, const BasicTensor<T>&);                    \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                    \
  template BasicTensor<T> scale(const BasicTensor<T>&, T);                                      \
  template BasicTensor<T> square(const BasicTensor<T>&);                                        \
  template BasicTensor<T> sum(const BasicTensor<T>&);                                           \
  template BasicTensor<T> mean(const BasicTensor<T>&);                                          \
  template BasicTensor<T> reshape(const BasicTensor<T>&, Shape);                                \
  template BasicTensor<T> conv1d(const BasicTensor<T>&, const BasicTensor<T>&,                  \
                                 const BasicTensor<T>&, const Conv1dOptions&);                  \
  template BasicTensor<T> conv_transpose1d(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                           const BasicTensor<T>&,                               \
                                           const ConvTranspose1dOptions&);                      \
  template BasicTensor<T> maxpool1d(const BasicTensor<T>&, std::size_t, std::size_t);           \
  template BasicTensor<T> batchnorm1d(const BasicTensor<T>&, const BasicTensor<T>&,             \
                                      const BasicTensor<T>&, BasicTensor<T>&, BasicTensor<T>&,  \
                                      const BatchNormOptions&);                                 \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                          \
  template BasicTensor<T> gelu(const BasicTensor<T>&);                                          \
  template BasicTensor<T> activation(const BasicTensor<T>&, Activation);                        \
  template BasicTensor<T> linear(const BasicTensor<T>&, const BasicTensor<T>&,                  \
                                 const BasicTensor<T>&);                                        \
  template BasicTensor<T> global_avg_pool_time(const BasicTensor<T>&);                          \
  template BasicTensor<T> concat_channels(const BasicTensor<T>&, const BasicTensor<T>&);        \
  template BasicTensor<T> weighted_cross_entropy(const BasicTensor<T>&, std::span<const int>,   \
                                                 std::span<const T>);                           \
  template BasicTensor<T> l1_loss(const BasicTensor<T>&, const BasicTensor<T>&);                \
  template DftResult<T> dft(const BasicTensor<T>&);

SPELLERSSL_INSTANTIATE(float)
SPELLERSSL_INSTANTIATE(double)
#undef SPELLERSSL_INSTANTIATE

}  // namespace spellerssl::core
