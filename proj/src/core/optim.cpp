#include "spellerssl/core/optim.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "spellerssl/core/error.hpp"

namespace spellerssl::core {

template <typename T>
AdamW<T>::AdamW(std::vector<BasicTensor<T>> params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
  if (!(config_.beta1 >= 0.0 && config_.beta1 < 1.0 && config_.beta2 >= 0.0 &&
        config_.beta2 < 1.0 && config_.eps > 0.0 && config_.weight_decay >= 0.0)) {
    throw ConfigError("AdamW: betas must lie in [0, 1), eps > 0, weight_decay >= 0");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    if (!p.defined()) throw ConfigError("AdamW: undefined parameter");
    m_.emplace_back(p.numel(), T{0});
    v_.emplace_back(p.numel(), T{0});
  }
}

template <typename T>
void AdamW<T>::step(double lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) {
      throw StateError("AdamW: parameter " + std::to_string(i) + " of shape " +
                       shape_str(params_[i].shape()) + " has no gradient");
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T decay = static_cast<T>(1.0 - lr * config_.weight_decay);
  const T step_size = static_cast<T>(lr / bc1);
  const T inv_sqrt_bc2 = static_cast<T>(1.0 / std::sqrt(bc2));
  const T eps = static_cast<T>(config_.eps);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto theta = params_[i].values();
    auto grad = std::as_const(params_[i]).grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const T g = grad[j];
      m[j] = b1 * m[j] + (T{1} - b1) * g;
      v[j] = b2 * v[j] + (T{1} - b2) * g * g;
      theta[j] *= decay;
      theta[j] -= step_size * m[j] / (std::sqrt(v[j]) * inv_sqrt_bc2 + eps);
    }
  }
}

template <typename T>
void AdamW<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template class AdamW<float>;
template class AdamW<double>;

OneCycleSchedule OneCycleSchedule::for_run(std::size_t optimizer_steps) {
  if (optimizer_steps == 0) throw ConfigError("OneCycleSchedule: run has no optimizer steps");
  OneCycleSchedule s;
  s.total_steps = optimizer_steps > 1 ? optimizer_steps - 1 : 1;
  return s;
}

void OneCycleSchedule::validate() const {
  if (total_steps == 0) throw ConfigError("OneCycleSchedule: total_steps must be positive");
  if (!(lr_initial > 0.0 && lr_max > 0.0 && lr_final > 0.0)) {
    throw ConfigError("OneCycleSchedule: learning rates must be positive");
  }
  if (!(lr_initial <= lr_max && lr_final <= lr_initial)) {
    throw ConfigError("OneCycleSchedule: need lr_final <= lr_initial <= lr_max");
  }
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("OneCycleSchedule: warmup_fraction must lie in (0, 1)");
  }
}

namespace {

// start*w + end*(1-w) with w = (1 + cos(pi p)) / 2; exact at p = 0 and p = 1.
double cosine_interp(double start, double end, double p) {
  if (p <= 0.0) return start;
  if (p >= 1.0) return end;
  const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * p));
  return start * w + end * (1.0 - w);
}

}  // namespace

double onecycle_lr(const OneCycleSchedule& schedule, std::size_t step) {
  schedule.validate();
  if (step > schedule.total_steps) {
    throw RangeError("onecycle_lr: step " + std::to_string(step) + " outside [0, " +
                     std::to_string(schedule.total_steps) + "]");
  }
  const double t = static_cast<double>(step);
  const double warm = schedule.warmup_end();
  if (t <= warm) return cosine_interp(schedule.lr_initial, schedule.lr_max, t / warm);
  const double rest = static_cast<double>(schedule.total_steps) - warm;
  return cosine_interp(schedule.lr_max, schedule.lr_final, (t - warm) / rest);
}

}  // namespace spellerssl::core
