#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trajsyn/allocation.hpp"
#include "trajsyn/generator.hpp"
#include "trajsyn/metrics.hpp"
#include "trajsyn/mobility.hpp"
#include "trajsyn/stream.hpp"
#include "trajsyn/synthesis.hpp"

namespace trajsyn {

// Pipeline variants: `full` is the complete pipeline; `all_update` refreshes
// the whole mobility model every collection tick instead of selecting
// significant transitions; `no_eq` drops enter/quit modeling and size
// adjustment, keeping only cell-to-cell movement.
enum class Variant : std::uint8_t { Full, AllUpdate, NoEq };

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(const std::string& s);

struct RunConfig {
  GridSpec grid{BoundingBox{0.0, 0.0, 1.0, 1.0}, 6};
  double epsilon = 1.0;
  int w = 20;
  AllocationParams allocation;
  // Termination restriction factor; defaults to the input's average
  // trajectory length when unset.
  std::optional<double> lambda;
  EvalConfig eval;
  Variant variant = Variant::Full;
  std::uint64_t seed = 1;
  // When non-empty, run() writes metrics.json, allocation_log.jsonl,
  // per_tick_metrics.csv, synthetic.csv, model_snapshot.json and timing.csv
  // here.
  std::string out_dir;
};

struct AllocationLogRecord {
  Tick tick = 0;
  double p_t = 0.0;
  double eps_t = 0.0;
  std::size_t n_reporters = 0;
  std::size_t sig_count = 0;
  double dev = 0.0;
};

struct RunResult {
  MetricsReport metrics;
  CellStream synthetic;
  std::vector<AllocationLogRecord> allocation_log;
  std::vector<std::vector<UserId>> reporters_by_tick;  // audit, aligned to min_tick
  std::vector<double> density_series;
  std::vector<double> transition_series;
  std::vector<double> tick_millis;
  std::string model_snapshot_json;
  Tick min_tick = 0;
  Tick max_tick = -1;
};

// Invoked at the end of every tick with the curator-side state; lets tests
// and tools watch the run without copying per-tick snapshots.
using TickObserver =
    std::function<void(Tick, const MobilityModel&, const SyntheticDatabase&)>;

// Executes the tick loop over the input stream: register arrivals and quits,
// recycle report users, allocate, collect perturbed transition reports,
// select and apply the model update, then synthesize, and finally scores the
// synthetic output against the input.
RunResult run(const RunConfig& cfg, const CellStream& input);
RunResult run(const RunConfig& cfg, const CellStream& input, const TickObserver& observer);

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

// Serialization used for metrics.json: the metric scores plus config echo
// and deterministic run metadata.
std::string run_metrics_json(const RunConfig& cfg, const RunResult& result,
                             const CellStream& input);

void write_artifacts(const RunConfig& cfg, const RunResult& result, const CellStream& input);

}  // namespace trajsyn
