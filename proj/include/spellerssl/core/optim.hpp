#pragma once

#include <cstddef>
#include <vector>

#include "spellerssl/core/tensor.hpp"

namespace spellerssl::core {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

// AdamW with decoupled weight decay (theta *= 1 - lr * wd before the adaptive
// update), bias-corrected moments.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<BasicTensor<T>> params, AdamWConfig config = {});

  // Throws StateError when a parameter has no gradient buffer.
  void step(double lr);
  void zero_grad();

  std::size_t step_count() const noexcept { return step_; }
  const AdamWConfig& config() const noexcept { return config_; }
  const std::vector<BasicTensor<T>>& params() const noexcept { return params_; }
  const std::vector<T>& first_moment(std::size_t i) const { return m_.at(i); }
  const std::vector<T>& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<BasicTensor<T>> params_;
  AdamWConfig config_;
  std::size_t step_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

// Two cosine phases: lr_initial -> lr_max over the first warmup_fraction of
// total_steps, then lr_max -> lr_final. Endpoints are returned exactly.
struct OneCycleSchedule {
  std::size_t total_steps = 1;
  double lr_initial = 2.5e-4;
  double lr_max = 5e-4;
  double lr_final = 5e-6;
  double warmup_fraction = 0.1;

  // Schedule for a run of `optimizer_steps` updates indexed 0..steps-1, so
  // the last update uses lr_final.
  static OneCycleSchedule for_run(std::size_t optimizer_steps);

  void validate() const;
  double warmup_end() const { return warmup_fraction * static_cast<double>(total_steps); }
};

// Throws RangeError outside 0..total_steps.
double onecycle_lr(const OneCycleSchedule& schedule, std::size_t step);

}  // namespace spellerssl::core
