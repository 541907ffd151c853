#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spellerssl/core/error.hpp"

namespace spellerssl::cli {

// Resolved options of one subcommand. Unset overrides fall back to the
// command's defaults (200 pretraining epochs, 10 fine-tuning epochs, batch 64).
struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::uint64_t seed = 0;
  std::size_t group = 1;
  double calibration = 1.0;
  std::string from_checkpoint;
  std::string label;  // pretraining tag in reports; default scratch/checkpoint
  double width_mult = 1.0;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  double lambda = 1.0;
  bool freeze_encoder = false;
  // synth only
  std::size_t characters = 36;
  std::size_t reps = 15;
  std::size_t channels = 8;
  double noise_sigma = 10.0;
  double amplitude = 5.0;
};

// Every command writes `output` plus `output.config.json`; training commands
// also write `output.log.csv`.
void cmd_synth(const RunConfig& config);
void cmd_pretrain(const RunConfig& config);
void cmd_finetune(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_report(const RunConfig& config);

void run(const RunConfig& config);

// 0 success, 2 configuration, 3 data integrity, 4 numeric failure.
int exit_code_for(ErrorKind kind);

// Shortest decimal that round-trips.
std::string format_number(double value);

// Applies SPELLERSSL_THREADS when it holds a positive integer; returns the
// thread count in effect.
int configure_threads();

}  // namespace spellerssl::cli
