#include <benchmark/benchmark.h>

#include "trajsyn/generator.hpp"
#include "trajsyn/harness.hpp"
#include "trajsyn/oue.hpp"
#include "trajsyn/synthesis.hpp"

using namespace trajsyn;

namespace {

const GridSpec kGrid{BoundingBox{0.0, 0.0, 1.0, 1.0}, 6};

void BM_OuePerturb(benchmark::State& state) {
  const TransitionDomain dom(kGrid);
  const BitReport onehot = encode(17, dom.size());
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(perturb(onehot, {1.0}, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dom.size()));
}
BENCHMARK(BM_OuePerturb);

void BM_OueAggregate(benchmark::State& state) {
  const TransitionDomain dom(kGrid);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<BitReport> reports;
  Rng rng(2);
  for (std::size_t i = 0; i < n; ++i) {
    reports.push_back(perturb(encode(i % dom.size(), dom.size()), {1.0}, rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(reports, {1.0}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_OueAggregate)->Arg(1000)->Arg(10000);

void BM_SynthesisStep(benchmark::State& state) {
  const TransitionDomain dom(kGrid);
  MobilityModel model(dom, 6);
  FrequencyEstimate est;
  est.values.assign(dom.size(), 0.0);
  Rng rng(3);
  for (double& v : est.values) v = rng.next_double() * 0.01;
  est.n = 1000;
  est.epsilon_used = 1.0;
  model.apply_update(est, SignificantSet::all(dom.size()));

  SyntheticDatabase db(kGrid, 4);
  db.initialize(static_cast<std::size_t>(state.range(0)), model, 1);
  Tick t = 2;
  for (auto _ : state) {
    db.step(model, SynthParams{50.0}, t);
    db.adjust_size(static_cast<std::size_t>(state.range(0)), model, t);
    ++t;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SynthesisStep)->Arg(10000);

// Full curator tick at 10k concurrent users; the latency budget that decides
// whether the pipeline keeps up with a live stream.
void BM_PipelineTick(benchmark::State& state) {
  GeneratorSpec spec;
  spec.grid = kGrid;
  spec.initial_users = static_cast<std::size_t>(state.range(0));
  spec.arrivals_per_tick = 0;
  spec.quit_prob = 0.0;
  spec.ticks = 60;
  const CellStream input = generate(spec, 5);

  RunConfig cfg;
  cfg.grid = kGrid;
  cfg.eval.n_queries = 1;
  cfg.eval.pattern_lengths = {2};
  cfg.seed = 5;
  for (auto _ : state) {
    const RunResult result = run(cfg, input);
    benchmark::DoNotOptimize(result.metrics.density_error);
  }
  state.SetItemsProcessed(state.iterations() * spec.ticks);
}
BENCHMARK(BM_PipelineTick)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
