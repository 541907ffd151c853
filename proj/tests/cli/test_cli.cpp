#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "spellerssl/cli/commands.hpp"
#include "spellerssl/core/error.hpp"
#include "spellerssl/io/access_log.hpp"

namespace spellerssl {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

bool was_read(const std::string& path) {
  const auto reads = io::paths_read();
  return std::find(reads.begin(), reads.end(), path) != reads.end();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SPELLERSSL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// A tiny synth -> pretrain -> finetune -> evaluate run shared by the suite.
class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("spellerssl_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    run_pipeline(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static void run_pipeline(const fs::path& dir) {
    fs::create_directories(dir);
    auto p = [&](const std::string& n) { return (dir / n).string(); };
    cli::RunConfig c;
    c.subcommand = "synth";
    c.characters = 4;
    c.noise_sigma = 15.0;
    c.seed = 3;
    c.output = p("cal.epb");
    cli::run(c);
    c.seed = 4;
    c.output = p("test.epb");
    cli::run(c);

    c.seed = 5;
    c.width_mult = 0.125;
    c.epochs = 1;
    c.subcommand = "pretrain";
    c.inputs = {p("cal.epb")};
    c.output = p("unet.ckpt");
    cli::run(c);

    io::clear_access_log();
    c.subcommand = "finetune";
    c.group = 2;
    c.from_checkpoint = p("unet.ckpt");
    c.output = p("clf.ckpt");
    cli::run(c);
    finetune_read_test_ = finetune_read_test_ || was_read(p("test.epb"));

    io::clear_access_log();
    c.subcommand = "evaluate";
    c.inputs = {p("test.epb")};
    c.from_checkpoint = p("clf.ckpt");
    c.output = p("eval.csv");
    cli::run(c);
    evaluate_read_calibration_ = evaluate_read_calibration_ || was_read(p("cal.epb"));
    evaluate_read_test_ = evaluate_read_test_ && was_read(p("test.epb"));
  }

  static inline fs::path dir_;
  static inline bool finetune_read_test_ = false;
  static inline bool evaluate_read_calibration_ = false;
  static inline bool evaluate_read_test_ = true;
};

TEST_F(Pipeline, FinetuneNeverReadsTestData) { EXPECT_FALSE(finetune_read_test_); }

TEST_F(Pipeline, EvaluateReadsTestButNeverCalibration) {
  EXPECT_TRUE(evaluate_read_test_);
  EXPECT_FALSE(evaluate_read_calibration_);
}

TEST_F(Pipeline, WritesSidecarsAndLogs) {
  for (const char* f : {"cal.epb.config.json", "unet.ckpt.config.json", "unet.ckpt.log.csv",
                        "clf.ckpt.config.json", "clf.ckpt.log.csv", "eval.csv.config.json"}) {
    EXPECT_TRUE(fs::exists(path(f))) << f;
  }
  const auto csv = slurp(path("eval.csv"));
  EXPECT_EQ(csv.rfind("pretraining,G,calibration,CRR1,", 0), 0u) << csv;
  EXPECT_NE(csv.find("\ncheckpoint,2,1,"), std::string::npos) << csv;
}

TEST_F(Pipeline, RerunIsByteIdentical) {
  run_pipeline(dir_ / "again");
  for (const char* f : {"cal.epb", "test.epb", "unet.ckpt", "unet.ckpt.log.csv", "clf.ckpt",
                        "clf.ckpt.log.csv", "eval.csv"}) {
    const auto a = slurp(path(f));
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir_ / "again" / f)) << f;
  }
}

TEST_F(Pipeline, ReportMergesSortsAndIsIdempotent) {
  // Second row under another key: same metrics, relabelled as scratch.
  auto text = slurp(path("eval.csv"));
  const auto body = text.find('\n') + 1;
  spit(path("eval_scratch.csv"), text.substr(0, body) + "scratch" +
                                     text.substr(text.find(',', body)));
  cli::RunConfig c;
  c.subcommand = "report";
  c.inputs = {path("eval_scratch.csv"), path("eval.csv"), path("eval.csv")};
  c.output = path("report.csv");
  cli::run(c);
  const auto report = slurp(path("report.csv"));
  const auto checkpoint_row = report.find("\ncheckpoint,");
  const auto scratch_row = report.find("\nscratch,");
  ASSERT_NE(checkpoint_row, std::string::npos) << report;
  ASSERT_NE(scratch_row, std::string::npos) << report;
  EXPECT_LT(checkpoint_row, scratch_row);
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 3);

  c.inputs = {path("report.csv")};
  c.output = path("report2.csv");
  cli::run(c);
  EXPECT_EQ(slurp(path("report2.csv")), report);
}

TEST_F(Pipeline, ReportConflictIsCollationError) {
  auto text = slurp(path("eval.csv"));
  // Same key, altered final cell.
  text.insert(text.size() - 1, "1");
  spit(path("eval_conflict.csv"), text);
  cli::RunConfig c;
  c.subcommand = "report";
  c.inputs = {path("eval.csv"), path("eval_conflict.csv")};
  c.output = path("bad_report.csv");
  EXPECT_THROW(cli::run(c), CollationError);
  EXPECT_FALSE(fs::exists(path("bad_report.csv")));
}

TEST_F(Pipeline, ReportMissingInputIsIoError) {
  cli::RunConfig c;
  c.subcommand = "report";
  c.inputs = {path("eval.csv"), path("does_not_exist.csv")};
  c.output = path("missing_report.csv");
  EXPECT_THROW(cli::run(c), IoError);
  EXPECT_EQ(run_binary("report --input " + path("does_not_exist.csv") + " --output " +
                       path("missing_report.csv")),
            2);
}

TEST_F(Pipeline, ExitCodes) {
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("finetune --no-such-flag --output " + path("x.ckpt")), 2);
  EXPECT_EQ(run_binary("finetune --input " + path("cal.epb") + " --G 0 --output " +
                       path("x.ckpt")),
            2);
  EXPECT_EQ(run_binary("finetune --input " + path("cal.epb") + " --G 16 --output " +
                       path("x.ckpt")),
            2);
  EXPECT_EQ(run_binary("finetune --input " + path("cal.epb") + " --calibration 0 --output " +
                       path("x.ckpt")),
            2);
  EXPECT_EQ(run_binary("evaluate --input " + path("test.epb") + " --output " + path("x.csv")), 2);
  // A pretrained U-Net is not a classifier.
  EXPECT_EQ(run_binary("evaluate --input " + path("test.epb") + " --from-checkpoint " +
                       path("unet.ckpt") + " --output " + path("x.csv")),
            2);

  auto epb = slurp(path("test.epb"));
  spit(path("truncated.epb"), epb.substr(0, epb.size() / 2));
  EXPECT_EQ(run_binary("evaluate --input " + path("truncated.epb") + " --from-checkpoint " +
                       path("clf.ckpt") + " --output " + path("x.csv")),
            3);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST(ExitCodeMapping, ByErrorKind) {
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kConfiguration), 2);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kCollation), 2);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kDataIntegrity), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kFormat), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kNumeric), 4);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::kStatistics), 4);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(cli::format_number(0.1), "0.1");
  EXPECT_EQ(cli::format_number(100.0), "100");
  EXPECT_EQ(cli::format_number(21.86), "21.86");
}

}  // namespace
}  // namespace spellerssl
