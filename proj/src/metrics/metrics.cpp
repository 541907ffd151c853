#include "spellerssl/metrics/metrics.hpp"

#include <cmath>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::metrics {

namespace {

void check_pair(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("metrics: " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(labels.size()) + " labels");
  }
  for (const int y : labels)
    if (y != 0 && y != 1) throw LabelError("metrics: labels must be 0 or 1");
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (const double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (const double v : x) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(x.size());
  return m;
}

// x log2 x with the x -> 0 limit.
double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  check_pair(predictions, labels);
  if (labels.empty()) throw StatisticsError("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += (predictions[i] == labels[i]);
  return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

double binary_f1(std::span<const int> predictions, std::span<const int> labels) {
  check_pair(predictions, labels);
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1, y = labels[i] == 1;
    tp += p && y;
    fp += p && !y;
    fn += !p && y;
  }
  // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN); zero whenever TP is.
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

double fdr(std::span<const double> positive, std::span<const double> negative) {
  if (positive.size() < 2 || negative.size() < 2) {
    throw StatisticsError("fdr needs at least 2 samples per group, got " +
                          std::to_string(positive.size()) + " and " +
                          std::to_string(negative.size()));
  }
  const Moments p = moments(positive), n = moments(negative);
  const double num = (p.mean - n.mean) * (p.mean - n.mean);
  const double den = p.variance + n.variance;
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw StatisticsError("fdr undefined: both groups have zero variance and different means");
  }
  return num / den;
}

double selection_time(std::size_t repetitions) {
  if (repetitions < 1) throw RangeError("selection_time: repetitions must be >= 1");
  return 2.5 + 2.1 * static_cast<double>(repetitions);
}

double itr(double a, std::size_t repetitions, std::size_t n_symbols) {
  if (!(a >= 0.0 && a <= 1.0)) throw RangeError("itr: accuracy must lie in [0, 1]");
  if (n_symbols < 2) throw RangeError("itr: need at least 2 symbols");
  const double n = static_cast<double>(n_symbols);
  double bits = std::log2(n) + xlog2x(a);
  if (a < 1.0) bits += (1.0 - a) * std::log2((1.0 - a) / (n - 1.0));
  return 60.0 / selection_time(repetitions) * bits;
}

MetricsReport build_report(const EvaluationOutputs& outputs) {
  if (!outputs.crr) throw StateError("build_report: missing component 'crr'");
  if (!outputs.accuracy) throw StateError("build_report: missing component 'accuracy'");
  if (!outputs.binary_f1) throw StateError("build_report: missing component 'binary_f1'");
  if (!outputs.fdr) throw StateError("build_report: missing component 'fdr'");
  MetricsReport r;
  r.pretraining = outputs.pretraining;
  r.group = outputs.group;
  r.calibration = outputs.calibration;
  r.crr = *outputs.crr;
  r.itr.reserve(r.crr.size());
  for (std::size_t n = 1; n <= r.crr.size(); ++n) r.itr.push_back(itr(r.crr[n - 1] / 100.0, n));
  r.accuracy = *outputs.accuracy;
  r.binary_f1 = *outputs.binary_f1;
  r.fdr = *outputs.fdr;
  return r;
}

}  // namespace spellerssl::metrics
