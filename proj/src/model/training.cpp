#include "spellerssl/model/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/ops.hpp"
#include "spellerssl/core/optim.hpp"
#include "spellerssl/core/random.hpp"

namespace spellerssl::model {

template <typename T>
SslLoss<T> ssl_loss_terms(const BasicTensor<T>& x, const BasicTensor<T>& x_hat, double lambda) {
  if (x.shape() != x_hat.shape()) {
    throw DimensionError("ssl_loss: shape mismatch " + core::shape_str(x.shape()) + " vs " +
                         core::shape_str(x_hat.shape()));
  }
  SslLoss<T> out;
  out.time_term = core::l1_loss(x, x_hat);
  // The DFT is linear, so FFT(x) - FFT(x_hat) = FFT(x - x_hat).
  const auto spec = core::dft(core::sub(x, x_hat));
  const auto zeros = BasicTensor<T>::zeros(x.shape());
  out.freq_term = core::scale(
      core::add(core::l1_loss(spec.real, zeros), core::l1_loss(spec.imag, zeros)), T{0.5});
  out.total = core::add(out.time_term, core::scale(out.freq_term, static_cast<T>(lambda)));
  return out;
}

template <typename T>
BasicTensor<T> ssl_loss(const BasicTensor<T>& x, const BasicTensor<T>& x_hat, double lambda) {
  return ssl_loss_terms(x, x_hat, lambda).total;
}

template SslLoss<float> ssl_loss_terms(const BasicTensor<float>&, const BasicTensor<float>&, double);
template SslLoss<double> ssl_loss_terms(const BasicTensor<double>&, const BasicTensor<double>&,
                                        double);
template BasicTensor<float> ssl_loss(const BasicTensor<float>&, const BasicTensor<float>&, double);
template BasicTensor<double> ssl_loss(const BasicTensor<double>&, const BasicTensor<double>&,
                                      double);

std::size_t steps_per_epoch(std::size_t trials, std::size_t batch) {
  if (batch == 0) throw ConfigError("batch size must be >= 1");
  return (trials + batch - 1) / batch;
}

std::size_t padded_length(std::size_t samples) { return (samples + 15) / 16 * 16; }

core::Tensor gather_batch(const io::EpochSet& data, std::span<const std::size_t> indices,
                          std::size_t padded) {
  const std::size_t c = data.channels, len = data.samples;
  std::vector<float> v(indices.size() * c * padded, 0.0f);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = data.trial(indices[i]);
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::copy_n(src.data() + ch * len, len, v.data() + (i * c + ch) * padded);
    }
  }
  return core::Tensor({indices.size(), c, padded}, std::move(v));
}

namespace {

constexpr std::uint64_t kShuffleStream = 0x73687566;
constexpr std::uint64_t kMaskStream = 0x6d61736b;

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  core::Rng rng(core::mix_seed(core::mix_seed(seed, kShuffleStream), epoch));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

class NanGuard {
 public:
  // Returns true when the step should be applied.
  bool check(double loss, std::size_t step) {
    if (std::isfinite(loss)) {
      streak_ = 0;
      return true;
    }
    if (++streak_ >= 3) {
      throw NumericError("loss is non-finite for 3 consecutive steps (last at step " +
                         std::to_string(step) + ")");
    }
    return false;
  }

 private:
  int streak_ = 0;
};

}  // namespace

std::vector<PretrainLogRow> pretrain(UNet<float>& model, const io::EpochSet& data,
                                     const PretrainConfig& config,
                                     const PretrainObserver& observer) {
  if (data.size() == 0) throw ConfigError("pretrain: dataset is empty");
  if (config.epochs == 0) throw ConfigError("pretrain: epochs must be >= 1");
  if (data.channels != model.config().in_channels) {
    throw DimensionError("pretrain: data has " + std::to_string(data.channels) +
                         " channels, model expects " +
                         std::to_string(model.config().in_channels));
  }
  const std::size_t n = data.size();
  const std::size_t spe = steps_per_epoch(n, config.batch);
  core::OneCycleSchedule schedule = core::OneCycleSchedule::for_run(config.epochs * spe);
  schedule.lr_initial = config.lr_initial;
  schedule.lr_max = config.lr_max;
  schedule.lr_final = config.lr_final;
  schedule.warmup_fraction = config.warmup_fraction;
  schedule.validate();

  const auto named = model.named_tensors();
  core::AdamW<float> opt(trainable_tensors(named), {.weight_decay = config.weight_decay});
  const std::size_t padded = padded_length(data.samples);
  const std::size_t c = data.channels;
  const std::uint64_t mask_seed = core::mix_seed(config.seed, kMaskStream);
  signal::MaskSpec mask_spec = config.mask;
  mask_spec.validate(data.samples);

  std::vector<PretrainLogRow> log;
  log.reserve(config.epochs * spe);
  NanGuard guard;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(n, config.seed, epoch);
    for (std::size_t b = 0; b < spe; ++b, ++step) {
      const std::size_t lo = b * config.batch;
      const std::size_t hi = std::min(n, lo + config.batch);
      const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const core::Tensor clean = gather_batch(data, idx, padded);
      core::Tensor masked = clean.detach();
      auto mv = masked.values();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        mask_spec.seed = core::mix_seed(mask_seed, epoch * n + idx[i]);
        // Only the real samples are masked; padding stays zero either way.
        const auto mask = signal::sample_time_mask(data.samples, mask_spec);
        for (std::size_t ch = 0; ch < c; ++ch) {
          float* row = mv.data() + (i * c + ch) * padded;
          for (std::size_t t = 0; t < data.samples; ++t)
            if (mask[t]) row[t] = 0.0f;
        }
      }

      const double lr = core::onecycle_lr(schedule, step);
      opt.zero_grad();
      auto out = model.forward(masked, NormMode::kTrain);
      auto loss = ssl_loss_terms(clean, out.reconstruction, config.lambda);
      const double total = loss.total.item();
      if (guard.check(total, step)) {
        core::backward(loss.total);
        opt.step(lr);
      }
      PretrainLogRow row{epoch + 1, step, lr, loss.time_term.item(), loss.freq_term.item(), total};
      log.push_back(row);
      if (observer) observer(row);
    }
  }
  return log;
}

std::vector<FinetuneLogRow> finetune(Classifier<float>& model, const io::EpochSet& data,
                                     const FinetuneConfig& config,
                                     const FinetuneObserver& observer) {
  if (data.size() == 0) throw ConfigError("finetune: training set is empty");
  if (config.epochs == 0) throw ConfigError("finetune: epochs must be >= 1");
  if (data.channels != model.unet_config().in_channels) {
    throw DimensionError("finetune: data has " + std::to_string(data.channels) +
                         " channels, model expects " +
                         std::to_string(model.unet_config().in_channels));
  }
  const std::size_t n = data.size();
  const std::size_t spe = steps_per_epoch(n, config.batch);
  const auto named = config.freeze_encoder ? model.head_tensors() : model.named_tensors();
  core::AdamW<float> opt(trainable_tensors(named), {.weight_decay = config.weight_decay});
  const std::size_t padded = padded_length(data.samples);
  const std::array<float, 2> weights{static_cast<float>(config.class_weights[0]),
                                     static_cast<float>(config.class_weights[1])};
  const NormMode encoder_mode = config.freeze_encoder ? NormMode::kEval : NormMode::kTrain;

  std::vector<FinetuneLogRow> log;
  log.reserve(config.epochs * spe);
  NanGuard guard;
  std::size_t step = 0;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(n, config.seed, epoch);
    for (std::size_t b = 0; b < spe; ++b, ++step) {
      const std::size_t lo = b * config.batch;
      const std::size_t hi = std::min(n, lo + config.batch);
      const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const core::Tensor x = gather_batch(data, idx, padded);
      labels.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.trials[idx[i]].label;

      opt.zero_grad();
      const core::Tensor logits =
          model.forward(x, encoder_mode, NormMode::kTrain, !config.freeze_encoder);
      auto loss = core::weighted_cross_entropy(logits, std::span<const int>(labels),
                                               std::span<const float>(weights));
      const double value = loss.item();
      if (guard.check(value, step)) {
        core::backward(loss);
        opt.step(config.lr);
      }
      std::size_t correct = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const bool predicted = logits.at(2 * i + 1) > logits.at(2 * i);
        correct += predicted == (labels[i] == 1) ? 1 : 0;
      }
      FinetuneLogRow row{epoch + 1, step, config.lr, value,
                         static_cast<double>(correct) / static_cast<double>(idx.size())};
      log.push_back(row);
      if (observer) observer(row);
    }
  }
  return log;
}

std::vector<double> score_trials(Classifier<float>& model, const io::EpochSet& data,
                                 std::size_t batch) {
  core::NoGradGuard no_grad;
  const std::size_t padded = padded_length(data.samples);
  std::vector<double> scores(data.size());
  std::vector<std::size_t> idx;
  for (std::size_t lo = 0; lo < data.size(); lo += batch) {
    const std::size_t hi = std::min(data.size(), lo + batch);
    idx.resize(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    const auto logits = model.forward(gather_batch(data, idx, padded), NormMode::kEval);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      scores[lo + i] = static_cast<double>(logits.at(2 * i + 1)) - logits.at(2 * i);
    }
  }
  return scores;
}

double reconstruction_mse(UNet<float>& model, const io::EpochSet& data,
                          const signal::MaskSpec* mask, std::size_t batch) {
  if (data.size() == 0) throw ConfigError("reconstruction_mse: dataset is empty");
  core::NoGradGuard no_grad;
  const std::size_t padded = padded_length(data.samples);
  const std::size_t c = data.channels;
  double acc = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t lo = 0; lo < data.size(); lo += batch) {
    const std::size_t hi = std::min(data.size(), lo + batch);
    idx.resize(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    const core::Tensor clean = gather_batch(data, idx, padded);
    core::Tensor input = clean;
    if (mask != nullptr) {
      input = clean.detach();
      signal::MaskSpec spec = *mask;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        spec.seed = core::mix_seed(mask->seed, idx[i]);
        const auto m = signal::sample_time_mask(data.samples, spec);
        auto v = input.values();
        for (std::size_t ch = 0; ch < c; ++ch)
          for (std::size_t t = 0; t < data.samples; ++t)
            if (m[t]) v[(i * c + ch) * padded + t] = 0.0f;
      }
    }
    const auto recon = model.forward(input, NormMode::kEval).reconstruction;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t t = 0; t < data.samples; ++t) {
          const std::size_t k = (i * c + ch) * padded + t;
          const double d = static_cast<double>(recon.at(k)) - clean.at(k);
          acc += d * d;
        }
  }
  return acc / static_cast<double>(data.size() * c * data.samples);
}

}  // namespace spellerssl::model
