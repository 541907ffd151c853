#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spellerssl/core/tensor.hpp"
#include "spellerssl/io/epoch_set.hpp"
#include "spellerssl/model/erp_head.hpp"
#include "spellerssl/model/unet.hpp"
#include "spellerssl/signal/masking.hpp"

namespace spellerssl::model {

template <typename T>
struct SslLoss {
  BasicTensor<T> total;
  BasicTensor<T> time_term;  // mean |x - x_hat|
  BasicTensor<T> freq_term;  // mean over the 2L real and imaginary DFT parts
};

// Time-domain L1 plus lambda times L1 over the real and imaginary parts of
// the DFT along time.
template <typename T>
SslLoss<T> ssl_loss_terms(const BasicTensor<T>& x, const BasicTensor<T>& x_hat, double lambda);

template <typename T>
BasicTensor<T> ssl_loss(const BasicTensor<T>& x, const BasicTensor<T>& x_hat, double lambda);

struct PretrainConfig {
  std::size_t epochs = 200;
  std::size_t batch = 64;
  double lambda = 1.0;
  double lr_initial = 2.5e-4;
  double lr_max = 5e-4;
  double lr_final = 5e-6;
  double warmup_fraction = 0.1;
  double weight_decay = 1e-2;
  signal::MaskSpec mask{};  // seed is replaced per trial and epoch
  std::uint64_t seed = 0;
};

struct PretrainLogRow {
  std::size_t epoch = 0;  // 1-based
  std::size_t step = 0;   // 0-based optimizer step
  double lr = 0.0;
  double time_loss = 0.0;
  double freq_loss = 0.0;
  double total = 0.0;
};

struct FinetuneConfig {
  std::size_t epochs = 10;
  std::size_t batch = 64;
  double lr = 1e-4;
  double weight_decay = 1e-2;
  std::array<double, 2> class_weights{1.0, 5.0};
  bool freeze_encoder = false;
  std::uint64_t seed = 0;
};

struct FinetuneLogRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double batch_accuracy = 0.0;
};

// Called after each optimizer step; lets callers stream logs.
using PretrainObserver = std::function<void(const PretrainLogRow&)>;
using FinetuneObserver = std::function<void(const FinetuneLogRow&)>;

std::size_t steps_per_epoch(std::size_t trials, std::size_t batch);

// Masked-reconstruction pretraining. Throws ConfigError on an empty set and
// NumericError after 3 consecutive non-finite losses.
std::vector<PretrainLogRow> pretrain(UNet<float>& model, const io::EpochSet& data,
                                     const PretrainConfig& config,
                                     const PretrainObserver& observer = {});

// Weighted cross-entropy fine-tuning on labelled trials.
std::vector<FinetuneLogRow> finetune(Classifier<float>& model, const io::EpochSet& data,
                                     const FinetuneConfig& config,
                                     const FinetuneObserver& observer = {});

// Decision scores for every trial (eval mode, no tape).
std::vector<double> score_trials(Classifier<float>& model, const io::EpochSet& data,
                                 std::size_t batch = 256);

// Mean squared reconstruction error over channels, samples and trials, in eval
// mode on the unpadded length. With a mask spec the model sees masked input
// (seed mixed with the trial index) and is scored against the original.
double reconstruction_mse(UNet<float>& model, const io::EpochSet& data,
                          const signal::MaskSpec* mask = nullptr, std::size_t batch = 256);

// Copies trials [indices] into a zero-padded [N, C, L16] tensor.
core::Tensor gather_batch(const io::EpochSet& data, std::span<const std::size_t> indices,
                          std::size_t padded_length);

std::size_t padded_length(std::size_t samples);

}  // namespace spellerssl::model
