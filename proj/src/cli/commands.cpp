#include "spellerssl/cli/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "spellerssl/aggregation/aggregate.hpp"
#include "spellerssl/decode/decode.hpp"
#include "spellerssl/io/access_log.hpp"
#include "spellerssl/io/checkpoint.hpp"
#include "spellerssl/io/epb.hpp"
#include "spellerssl/io/synth.hpp"
#include "spellerssl/metrics/metrics.hpp"
#include "spellerssl/model/training.hpp"

namespace spellerssl::cli {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kRange:
    case ErrorKind::kLookup:
    case ErrorKind::kLoad:
    case ErrorKind::kIo:
    case ErrorKind::kCollation:
    case ErrorKind::kState:
      return 2;
    case ErrorKind::kDataIntegrity:
    case ErrorKind::kFormat:
    case ErrorKind::kDimension:
    case ErrorKind::kLabel:
      return 3;
    case ErrorKind::kNumeric:
    case ErrorKind::kStatistics:
      return 4;
  }
  return 1;
}

int configure_threads() {
  if (const char* env = std::getenv("SPELLERSSL_THREADS")) {
    int n = 0;
    const auto* end = env + std::char_traits<char>::length(env);
    const auto res = std::from_chars(env, end, n);
    if (res.ec != std::errc() || res.ptr != end || n < 1) {
      throw ConfigError(std::string("SPELLERSSL_THREADS must be a positive integer, got '") +
                        env + "'");
    }
    omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  io::record_access(io::Access::kWrite, path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("error while writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  io::record_access(io::Access::kRead, path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) {
    throw ConfigError(c.subcommand + " takes exactly one --input, got " +
                      std::to_string(c.inputs.size()));
  }
  return c.inputs.front();
}

void require_output(const RunConfig& c) {
  if (c.output.empty()) throw ConfigError(c.subcommand + " needs --output");
}

// Resolved configuration sidecar. json objects are key-sorted, so the dump
// is stable.
void write_sidecar(const RunConfig& c, json extra) {
  json j;
  j["subcommand"] = c.subcommand;
  j["inputs"] = c.inputs;
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["G"] = c.group;
  j["calibration"] = c.calibration;
  j["from_checkpoint"] = c.from_checkpoint;
  j["label"] = c.label;
  j["width_mult"] = c.width_mult;
  j["lambda"] = c.lambda;
  j["freeze_encoder"] = c.freeze_encoder;
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_text(c.output + ".config.json", j.dump(2) + "\n");
}

model::UNetConfig unet_config_from(const json& j) {
  model::UNetConfig u;
  u.in_channels = j.at("in_channels").get<std::size_t>();
  u.base_width = j.at("base_width").get<std::size_t>();
  u.width_multiplier = j.at("width_multiplier").get<double>();
  u.validate();
  return u;
}

json unet_json(const model::UNetConfig& u) {
  return {{"in_channels", u.in_channels},
          {"base_width", u.base_width},
          {"width_multiplier", u.width_multiplier}};
}

json parse_model_json(const io::Checkpoint& ck, const std::string& path) {
  try {
    return json::parse(ck.metadata.model_json);
  } catch (const json::exception& e) {
    throw FormatError("checkpoint '" + path + "' carries invalid model JSON: " + e.what());
  }
}

io::CheckpointMetadata metadata_for(const json& model_json, std::uint64_t step,
                                    std::uint64_t seed) {
  io::CheckpointMetadata m;
  m.model_json = model_json.dump();
  m.config_hash = io::fnv1a64(m.model_json);
  m.training_step = step;
  m.seed = seed;
  return m;
}

std::string pretraining_label(const RunConfig& c) {
  if (!c.label.empty()) return c.label;
  return c.from_checkpoint.empty() ? "scratch" : "checkpoint";
}

}  // namespace

void cmd_synth(const RunConfig& c) {
  require_output(c);
  io::SynthConfig s;
  s.characters = c.characters;
  s.repetitions = c.reps;
  s.channels = c.channels;
  s.noise_sigma = c.noise_sigma;
  s.p300_amplitude = c.amplitude;
  s.seed = c.seed;
  const auto set = io::synth_generate(s);
  io::write_epb(c.output, set);
  write_sidecar(c, {{"characters", c.characters},
                    {"reps", c.reps},
                    {"channels", c.channels},
                    {"noise_sigma", c.noise_sigma},
                    {"amplitude", c.amplitude},
                    {"trials", set.size()},
                    {"expected_snr", s.expected_snr()}});
  std::cout << "synth: wrote " << set.size() << " trials to " << c.output << "\n";
}

void cmd_pretrain(const RunConfig& c) {
  require_output(c);
  const auto data = io::read_epb(single_input(c));
  const model::UNetConfig ucfg{
      .in_channels = data.channels, .base_width = 64, .width_multiplier = c.width_mult};
  model::UNet<float> net(ucfg, c.seed);
  model::PretrainConfig p;
  p.epochs = c.epochs.value_or(200);
  p.batch = c.batch.value_or(64);
  p.lambda = c.lambda;
  p.seed = c.seed;

  std::ostringstream log;
  log << "epoch,step,lr,time_loss,freq_loss,total\n";
  const auto rows = model::pretrain(net, data, p, [&](const model::PretrainLogRow& r) {
    log << r.epoch << ',' << r.step << ',' << format_number(r.lr) << ','
        << format_number(r.time_loss) << ',' << format_number(r.freq_loss) << ','
        << format_number(r.total) << '\n';
  });
  json mj = unet_json(ucfg);
  mj["model"] = "unet";
  io::save_checkpoint(c.output, net.named_tensors(), metadata_for(mj, rows.size(), c.seed));
  write_text(c.output + ".log.csv", log.str());
  write_sidecar(c, {{"epochs", p.epochs},
                    {"batch", p.batch},
                    {"steps", rows.size()},
                    {"training_trials", data.size()}});
  std::cout << "pretrain: " << rows.size() << " steps, final loss "
            << format_number(rows.back().total) << "\n";
}

void cmd_finetune(const RunConfig& c) {
  require_output(c);
  const auto raw = io::read_epb(single_input(c));
  if (!raw.speller) throw DataIntegrityError("finetune needs a speller-structured calibration set");
  const auto calib = io::split_calibration(raw, c.calibration);
  const auto blocks = aggregation::blocks_from_epoch_set(calib);
  const auto train = aggregation::build_training_set(blocks, c.group, calib.sample_rate_hz);

  const model::UNetConfig ucfg{
      .in_channels = train.channels, .base_width = 64, .width_multiplier = c.width_mult};
  const model::HeadConfig hcfg{.bottleneck_channels = ucfg.bottleneck_channels()};
  model::Classifier<float> clf(ucfg, hcfg, c.seed);
  std::size_t loaded = 0;
  if (!c.from_checkpoint.empty()) {
    const auto ck = io::read_checkpoint(c.from_checkpoint);
    const auto prefixes = io::encoder_prefixes();
    loaded = io::load_checkpoint(ck, clf.named_tensors(), prefixes).loaded.size();
  }
  model::FinetuneConfig f;
  f.epochs = c.epochs.value_or(10);
  f.batch = c.batch.value_or(64);
  f.freeze_encoder = c.freeze_encoder;
  f.seed = c.seed;

  std::ostringstream log;
  log << "epoch,step,lr,loss,batch_accuracy\n";
  const auto rows = model::finetune(clf, train, f, [&](const model::FinetuneLogRow& r) {
    log << r.epoch << ',' << r.step << ',' << format_number(r.lr) << ','
        << format_number(r.loss) << ',' << format_number(r.batch_accuracy) << '\n';
  });
  json mj = unet_json(ucfg);
  mj["model"] = "classifier";
  mj["head_hidden"] = hcfg.hidden;
  mj["run"] = {{"pretraining", pretraining_label(c)},
               {"G", c.group},
               {"calibration", c.calibration}};
  io::save_checkpoint(c.output, clf.named_tensors(), metadata_for(mj, rows.size(), c.seed));
  write_text(c.output + ".log.csv", log.str());
  write_sidecar(c, {{"epochs", f.epochs},
                    {"batch", f.batch},
                    {"steps", rows.size()},
                    {"calibration_characters", calib.characters()},
                    {"training_trials", train.size()},
                    {"training_positives", train.positives()},
                    {"encoder_tensors_loaded", loaded}});
  std::cout << "finetune: " << train.size() << " training trials (" << train.positives()
            << " positive), " << rows.size() << " steps\n";
}

void cmd_evaluate(const RunConfig& c) {
  require_output(c);
  if (c.from_checkpoint.empty()) throw ConfigError("evaluate needs --from-checkpoint");
  const auto ck = io::read_checkpoint(c.from_checkpoint);
  const json mj = parse_model_json(ck, c.from_checkpoint);
  if (mj.value("model", "") != "classifier") {
    throw ConfigError("'" + c.from_checkpoint + "' is not a fine-tuned classifier checkpoint");
  }
  const auto ucfg = unet_config_from(mj);
  const model::HeadConfig hcfg{.bottleneck_channels = ucfg.bottleneck_channels(),
                               .hidden = mj.at("head_hidden").get<std::size_t>()};
  model::Classifier<float> clf(ucfg, hcfg, 0);
  io::load_checkpoint(ck, clf.named_tensors());

  // Test trials are scored one by one (G = 1); no aggregation here.
  const auto test = io::read_epb(single_input(c));
  if (!test.speller) throw DataIntegrityError("evaluate needs a speller-structured test set");
  const auto scores = model::score_trials(clf, test);
  const decode::SpellerGrid grid;
  const auto crr = decode::crr_curve(decode::score_matrices(test, scores), grid);

  std::vector<int> predicted(test.size()), labels(test.size());
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < test.size(); ++i) {
    predicted[i] = scores[i] > 0.0 ? 1 : 0;
    labels[i] = test.trials[i].label;
    (labels[i] == 1 ? pos : neg).push_back(scores[i]);
  }
  metrics::EvaluationOutputs out;
  const auto& run = mj.at("run");
  out.pretraining = run.at("pretraining").get<std::string>();
  out.group = run.at("G").get<std::size_t>();
  out.calibration = run.at("calibration").get<double>();
  out.crr = crr;
  out.accuracy = metrics::accuracy(predicted, labels);
  out.binary_f1 = metrics::binary_f1(predicted, labels);
  out.fdr = metrics::fdr(pos, neg);
  const auto report = metrics::build_report(out);

  std::ostringstream csv;
  csv << "pretraining,G,calibration";
  for (std::size_t n = 1; n <= report.crr.size(); ++n) csv << ",CRR" << n;
  for (std::size_t n = 1; n <= report.itr.size(); ++n) csv << ",ITR" << n;
  csv << ",Acc,B-F1,FDR\n";
  csv << report.pretraining << ',' << report.group << ',' << format_number(report.calibration);
  for (const double v : report.crr) csv << ',' << format_number(v);
  for (const double v : report.itr) csv << ',' << format_number(v);
  csv << ',' << format_number(report.accuracy) << ',' << format_number(report.binary_f1) << ','
      << format_number(report.fdr) << '\n';
  write_text(c.output, csv.str());
  write_sidecar(c, {{"test_trials", test.size()}, {"test_characters", test.characters()}});
  std::cout << "evaluate: CRR@" << report.crr.size() << " " << format_number(report.crr.back())
            << "%, FDR " << format_number(report.fdr) << "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("'" + path + "': '" + s + "' is not a number");
  }
  return v;
}

std::string fixed(double v, int decimals) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(decimals);
  // Avoid printing "-0.00".
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(v * scale) / scale;
  ss << (r == 0.0 ? 0.0 : r);
  return ss.str();
}

}  // namespace

void cmd_report(const RunConfig& c) {
  require_output(c);
  if (c.inputs.empty()) throw ConfigError("report needs at least one --input");
  using Key = std::tuple<std::string, std::size_t, double>;
  std::map<Key, std::pair<std::string, std::vector<std::string>>> rows;  // source, cells
  std::vector<std::string> header;
  for (const auto& path : c.inputs) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw FormatError("'" + path + "' is empty");
    const auto h = split_csv_line(line);
    if (h.size() < 6 || h[0] != "pretraining" || h[1] != "G" || h[2] != "calibration") {
      throw FormatError("'" + path + "' is not an evaluation CSV");
    }
    if (header.empty()) {
      header = h;
    } else if (h != header) {
      throw CollationError("'" + path + "' has different columns from '" + c.inputs.front() + "'");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != header.size()) {
        throw FormatError("'" + path + "': row has " + std::to_string(cells.size()) +
                          " cells, header has " + std::to_string(header.size()));
      }
      const Key key{cells[0], static_cast<std::size_t>(parse_number(cells[1], path)),
                    parse_number(cells[2], path)};
      const auto [it, inserted] = rows.emplace(key, std::make_pair(path, cells));
      if (!inserted && it->second.second != cells) {
        throw CollationError("rows for (" + cells[0] + ", G=" + cells[1] + ", calibration=" +
                             cells[2] + ") differ between '" + it->second.first + "' and '" +
                             path + "'");
      }
    }
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& [key, entry] : rows) {
    const auto& cells = entry.second;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& name = header[i];
      std::string v = cells[i];
      if (i >= 3) {
        const double x = parse_number(v, entry.first);
        if (name.rfind("CRR", 0) == 0) {
          v = fixed(x, 0);
        } else if (name.rfind("ITR", 0) == 0 || name == "Acc") {
          v = fixed(x, 2);
        } else {
          v = fixed(x, 4);
        }
      }
      out << (i ? "," : "") << v;
    }
    out << '\n';
  }
  write_text(c.output, out.str());
  write_sidecar(c, {{"rows", rows.size()}});
  std::cout << "report: " << rows.size() << " rows to " << c.output << "\n";
}

void run(const RunConfig& c) {
  if (c.subcommand == "synth") return cmd_synth(c);
  if (c.subcommand == "pretrain") return cmd_pretrain(c);
  if (c.subcommand == "finetune") return cmd_finetune(c);
  if (c.subcommand == "evaluate") return cmd_evaluate(c);
  if (c.subcommand == "report") return cmd_report(c);
  throw ConfigError("unknown subcommand '" + c.subcommand + "'");
}

}  // namespace spellerssl::cli
