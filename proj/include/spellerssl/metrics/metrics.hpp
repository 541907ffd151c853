#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spellerssl::metrics {

// Percentage of predictions equal to the labels.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

// F1 of the positive class; 0 when precision + recall is 0.
double binary_f1(std::span<const int> predictions, std::span<const int> labels);

// (mu_p - mu_n)^2 / (var_p + var_n) with population variances. Throws
// StatisticsError when a group has fewer than 2 samples; 0 when both
// variances and the mean difference vanish.
double fdr(std::span<const double> positive, std::span<const double> negative);

// Seconds per character after r repetitions: 2.5 + 2.1 r.
double selection_time(std::size_t repetitions);

// Bits per minute for accuracy fraction a among n_symbols after r repetitions.
double itr(double a, std::size_t repetitions, std::size_t n_symbols = 36);

struct MetricsReport {
  std::string pretraining;   // e.g. "none", "cross", "in"
  std::size_t group = 1;     // G
  double calibration = 1.0;  // fraction of calibration characters used
  std::vector<double> crr;   // percent, n = 1..R
  std::vector<double> itr;   // bits/min, n = 1..R
  double accuracy = 0.0;     // percent
  double binary_f1 = 0.0;
  double fdr = 0.0;
};

struct EvaluationOutputs {
  std::string pretraining;
  std::size_t group = 1;
  double calibration = 1.0;
  std::optional<std::vector<double>> crr;
  std::optional<double> accuracy;
  std::optional<double> binary_f1;
  std::optional<double> fdr;
};

// Throws StateError naming the first missing component. ITR is derived from
// the CRR column.
MetricsReport build_report(const EvaluationOutputs& outputs);

}  // namespace spellerssl::metrics
