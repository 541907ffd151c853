#include <benchmark/benchmark.h>

#include <vector>

#include "spellerssl/aggregation/aggregate.hpp"
#include "spellerssl/core/kernels.hpp"
#include "spellerssl/core/random.hpp"
#include "spellerssl/io/synth.hpp"

namespace {

using spellerssl::core::kernels::Backend;
using spellerssl::core::kernels::ConvGeometry;

struct ConvData {
  ConvGeometry g;
  std::vector<float> x, w, bias, y;
};

// Encoder-stage shapes at width multiplier 1/8: batch 64, L = 160.
ConvData make_conv(std::size_t cin, std::size_t cout, std::size_t length) {
  ConvData d;
  d.g = ConvGeometry::make(64, cin, cout, length, 3, 1, 1, 1, 1);
  spellerssl::core::Rng rng(7);
  d.x.resize(d.g.input_size());
  d.w.resize(d.g.weight_size());
  for (auto& v : d.x) v = static_cast<float>(rng.normal());
  for (auto& v : d.w) v = static_cast<float>(rng.normal());
  d.bias.assign(cout, 0.0f);
  d.y.resize(d.g.output_size());
  return d;
}

void conv_forward(benchmark::State& state, Backend backend) {
  auto d = make_conv(static_cast<std::size_t>(state.range(0)),
                     static_cast<std::size_t>(state.range(1)), 160);
  for (auto _ : state) {
    spellerssl::core::kernels::conv1d_forward<float>(backend, d.g, d.x, d.w, d.bias, d.y);
    benchmark::DoNotOptimize(d.y.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * d.g.batch));
}

void conv_backward_weight(benchmark::State& state, Backend backend) {
  auto d = make_conv(static_cast<std::size_t>(state.range(0)),
                     static_cast<std::size_t>(state.range(1)), 160);
  std::vector<float> dw(d.w.size()), db(d.bias.size());
  for (auto _ : state) {
    spellerssl::core::kernels::conv1d_backward_weight<float>(backend, d.g, d.y, d.x, dw, db);
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * d.g.batch));
}

void BM_ConvForwardReference(benchmark::State& s) { conv_forward(s, Backend::kReference); }
void BM_ConvForwardParallel(benchmark::State& s) { conv_forward(s, Backend::kParallel); }
void BM_ConvWeightGradReference(benchmark::State& s) {
  conv_backward_weight(s, Backend::kReference);
}
void BM_ConvWeightGradParallel(benchmark::State& s) {
  conv_backward_weight(s, Backend::kParallel);
}

#define CONV_ARGS ->Args({8, 8})->Args({16, 16})->Args({32, 32})->Unit(benchmark::kMicrosecond)
BENCHMARK(BM_ConvForwardReference) CONV_ARGS;
BENCHMARK(BM_ConvForwardParallel) CONV_ARGS;
BENCHMARK(BM_ConvWeightGradReference) CONV_ARGS;
BENCHMARK(BM_ConvWeightGradParallel) CONV_ARGS;
#undef CONV_ARGS

const std::vector<spellerssl::aggregation::CharacterBlock>& blocks() {
  static const auto b = [] {
    spellerssl::io::SynthConfig cfg;
    cfg.characters = 12;
    return spellerssl::aggregation::blocks_from_epoch_set(spellerssl::io::synth_generate(cfg));
  }();
  return b;
}

void aggregation(benchmark::State& state, spellerssl::aggregation::Execution exec) {
  const auto& b = blocks();
  const auto group = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto set = spellerssl::aggregation::build_training_set(b, group, 240.0, exec);
    benchmark::DoNotOptimize(set.trials.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * b.size()));
}

void BM_AggregationSerial(benchmark::State& s) {
  aggregation(s, spellerssl::aggregation::Execution::kSerial);
}
void BM_AggregationParallel(benchmark::State& s) {
  aggregation(s, spellerssl::aggregation::Execution::kParallel);
}

BENCHMARK(BM_AggregationSerial)->Arg(1)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregationParallel)->Arg(1)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
