#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "spellerssl/cli/commands.hpp"

using spellerssl::cli::RunConfig;

namespace {

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.inputs, "Input file (repeatable for report)");
  sub->add_option("--output", c.output, "Output file")->required();
  sub->add_option("--seed", c.seed, "Random seed");
}

void add_training(CLI::App* sub, RunConfig& c) {
  sub->add_option("--width-mult", c.width_mult, "U-Net width multiplier")
      ->check(CLI::PositiveNumber);
  sub->add_option("--epochs", c.epochs, "Epoch override");
  sub->add_option("--batch", c.batch, "Batch size override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P300 speller toolkit: synthetic data, pretraining, fine-tuning, evaluation"};
  app.require_subcommand(1);
  RunConfig c;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic speller session (EPB)");
  add_common(synth, c);
  synth->add_option("--characters", c.characters, "Characters to spell");
  synth->add_option("--reps", c.reps, "Repetitions per character");
  synth->add_option("--channels", c.channels, "EEG channels");
  synth->add_option("--noise-sigma", c.noise_sigma, "Noise standard deviation (uV)");
  synth->add_option("--amplitude", c.amplitude, "P300 amplitude (uV)");

  auto* pretrain = app.add_subcommand("pretrain", "Masked-reconstruction pretraining");
  add_common(pretrain, c);
  add_training(pretrain, c);
  pretrain->add_option("--lambda", c.lambda, "Weight of the frequency-domain term");

  auto* finetune = app.add_subcommand("finetune", "Fine-tune encoder and ERP head");
  add_common(finetune, c);
  add_training(finetune, c);
  finetune->add_option("--G", c.group, "Aggregation group size");
  finetune->add_option("--calibration", c.calibration, "Fraction of calibration characters");
  finetune->add_option("--from-checkpoint", c.from_checkpoint, "Pretrained checkpoint");
  finetune->add_flag("--freeze-encoder", c.freeze_encoder, "Train the head only");
  finetune->add_option("--label", c.label, "Pretraining tag used in reports");

  auto* evaluate = app.add_subcommand("evaluate", "Score a test session and write metrics CSV");
  add_common(evaluate, c);
  evaluate->add_option("--from-checkpoint", c.from_checkpoint, "Fine-tuned checkpoint")
      ->required();

  auto* report = app.add_subcommand("report", "Merge evaluation CSVs");
  add_common(report, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; malformed command lines are configuration errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    spellerssl::cli::configure_threads();
    spellerssl::cli::run(c);
  } catch (const spellerssl::Error& e) {
    std::cerr << "error (" << spellerssl::error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return spellerssl::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
