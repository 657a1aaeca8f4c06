// trajsyn CLI: `run` executes the private collection + synthesis pipeline
// over a CSV stream (or the built-in generator), `generate` emits generator
// streams as CSV, `evaluate` scores two streams against each other.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "trajsyn/generator.hpp"
#include "trajsyn/harness.hpp"
#include "trajsyn/metrics.hpp"
#include "trajsyn/stream.hpp"

namespace {

using namespace trajsyn;

std::string default_out_dir() {
  if (const char* env = std::getenv("TRAJSYN_OUT_DIR")) return env;
  return "out";
}

void add_grid_options(CLI::App* app, GridSpec& grid) {
  app->add_option("--min-x", grid.bbox.min_x, "Bounding box min x");
  app->add_option("--min-y", grid.bbox.min_y, "Bounding box min y");
  app->add_option("--max-x", grid.bbox.max_x, "Bounding box max x");
  app->add_option("--max-y", grid.bbox.max_y, "Bounding box max y");
  app->add_option("-k,--grid-k", grid.k, "Grid discretization granularity K")
      ->check(CLI::PositiveNumber);
}

void add_eval_options(CLI::App* app, EvalConfig& eval) {
  app->add_option("--phi", eval.phi, "Evaluation time-range size (ticks)");
  app->add_option("--queries", eval.n_queries, "Random range queries per metric");
  app->add_option("--hotspot-n", eval.n_hotspot, "NDCG list length");
  app->add_option("--patterns-n", eval.n_patterns, "Top-N pattern set size");
  app->add_option("--pattern-lengths", eval.pattern_lengths, "Pattern lengths");
  app->add_option("--sanity-fraction", eval.sanity_fraction, "Query sanity bound fraction");
  app->add_option("--eval-seed", eval.seed, "Random query/range seed");
}

void add_generator_options(CLI::App* app, GeneratorSpec& gen) {
  app->add_option("--gen-users", gen.initial_users, "Initial user count");
  app->add_option("--gen-arrivals", gen.arrivals_per_tick, "New users per tick");
  app->add_option("--gen-quit", gen.quit_prob, "Per-tick quit probability");
  app->add_option("--gen-ticks", gen.ticks, "Total ticks to generate");
  app->add_option("--gen-hotspots", gen.hotspot_count, "Number of hotspot attractors");
  app->add_option("--gen-attraction", gen.attraction, "Hotspot pull strength");
  app->add_option("--gen-pulse-amp", gen.pulse_amplitude, "Hotspot intensity pulse amplitude");
  app->add_option("--gen-pulse-period", gen.pulse_period, "Hotspot intensity pulse period");
  app->add_option("--gen-drift-tick", [&gen](const CLI::results_t& vals) {
    gen.drift_tick = std::stoll(vals.at(0));
    return true;
  }, "Tick at which hotspots shift (distribution drift)");
}

int cmd_run(const std::string& config_path, const std::string& input_path, RunConfig cfg,
            GeneratorSpec gen, bool quiet) {
  CellStream input;
  if (!input_path.empty()) {
    input = ingest_csv_file(input_path, cfg.grid);
  } else {
    gen.grid = cfg.grid;
    input = generate(gen, cfg.seed);
  }
  (void)config_path;
  const RunResult result = run(cfg, input);
  if (!quiet) {
    std::cout << run_metrics_json(cfg, result, input) << std::endl;
    if (!cfg.out_dir.empty()) {
      std::cerr << "artifacts written to " << cfg.out_dir << std::endl;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private trajectory stream collection and real-time synthesis"};
  app.require_subcommand(1);

  // ---- run ----
  RunConfig cfg;
  cfg.out_dir = default_out_dir();
  GeneratorSpec gen;
  std::string config_path;
  std::string input_path;
  std::string strategy = "adaptive";
  std::string division = "population";
  std::string variant = "full";
  double lambda = -1.0;
  bool quiet = false;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute the private synthesis pipeline");
  run_cmd->add_option("--config", config_path, "JSON config file (flags override it)")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("-i,--input", input_path, "Input stream CSV (default: generator)")
      ->check(CLI::ExistingFile);
  add_grid_options(run_cmd, cfg.grid);
  run_cmd->add_option("-e,--epsilon", cfg.epsilon, "Privacy budget per window")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("-w,--window", cfg.w, "w-event window size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--strategy", strategy, "Allocation strategy")
      ->check(CLI::IsMember({"adaptive", "uniform", "sample"}));
  run_cmd->add_option("--division", division, "Resource division")
      ->check(CLI::IsMember({"budget", "population"}));
  run_cmd->add_option("--alpha", cfg.allocation.alpha, "Adaptive portion scale");
  run_cmd->add_option("--kappa", cfg.allocation.kappa, "History length for deviation");
  run_cmd->add_option("--p-max", cfg.allocation.p_max, "Portion cap");
  run_cmd->add_option("--budget-floor", cfg.allocation.budget_floor,
                      "Skip collection below this per-tick budget");
  run_cmd->add_option("--lambda", lambda,
                      "Termination restriction factor (default: average input length)");
  add_eval_options(run_cmd, cfg.eval);
  run_cmd->add_option("--variant", variant, "Pipeline variant")
      ->check(CLI::IsMember({"full", "all_update", "no_eq"}));
  run_cmd->add_option("-s,--seed", cfg.seed, "Run seed");
  run_cmd->add_option("-o,--out", cfg.out_dir, "Output directory ($TRAJSYN_OUT_DIR)");
  run_cmd->add_flag("-q,--quiet", quiet, "Suppress stdout report");
  add_generator_options(run_cmd, gen);

  // ---- generate ----
  GridSpec gen_grid{BoundingBox{0.0, 0.0, 1.0, 1.0}, 6};
  GeneratorSpec gen_spec;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "stream.csv";
  CLI::App* gen_cmd = app.add_subcommand("generate", "Emit a generator stream as CSV");
  add_grid_options(gen_cmd, gen_grid);
  add_generator_options(gen_cmd, gen_spec);
  gen_cmd->add_option("-s,--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("-o,--out", gen_out, "Output CSV path")->required();

  // ---- evaluate ----
  GridSpec eval_grid{BoundingBox{0.0, 0.0, 1.0, 1.0}, 6};
  EvalConfig eval_cfg;
  std::string orig_path, syn_path, eval_out;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score a synthetic stream against an original");
  eval_cmd->add_option("--orig", orig_path, "Original stream CSV")->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--syn", syn_path, "Synthetic stream CSV")->required()
      ->check(CLI::ExistingFile);
  add_grid_options(eval_cmd, eval_grid);
  add_eval_options(eval_cmd, eval_cfg);
  eval_cmd->add_option("-o,--out", eval_out, "Write metrics JSON here (default stdout)");

  // A config file provides defaults; parse it before the flags so explicit
  // flags win.
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i] ? argv[i] : "") == "--config" && i + 1 < argc) {
      std::ifstream in(argv[i + 1]);
      if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        try {
          cfg = run_config_from_json(ss.str());
        } catch (const std::exception& e) {
          std::cerr << "error: bad config file: " << e.what() << std::endl;
          return 1;
        }
        strategy = to_string(cfg.allocation.strategy);
        division = to_string(cfg.allocation.division);
        variant = to_string(cfg.variant);
        if (cfg.lambda) lambda = *cfg.lambda;
        if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
      }
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      cfg.allocation.strategy = strategy == "adaptive" ? Strategy::Adaptive
                                : strategy == "uniform" ? Strategy::Uniform
                                                        : Strategy::Sample;
      cfg.allocation.division =
          division == "budget" ? Division::Budget : Division::Population;
      cfg.variant = *variant_from_string(variant);
      if (lambda > 0.0) cfg.lambda = lambda;
      return cmd_run(config_path, input_path, cfg, gen, quiet);
    }
    if (gen_cmd->parsed()) {
      gen_spec.grid = gen_grid;
      const CellStream stream = generate(gen_spec, gen_seed);
      write_csv_file(stream, gen_out);
      std::cerr << stream.tracks.size() << " streams, " << stream.total_points()
                << " points -> " << gen_out << std::endl;
      return 0;
    }
    if (eval_cmd->parsed()) {
      const CellStream orig = ingest_csv_file(orig_path, eval_grid);
      const CellStream syn = ingest_csv_file(syn_path, eval_grid);
      const MetricsReport report = evaluate_all(orig, syn, eval_cfg);
      const std::string json = to_json_string(report);
      if (eval_out.empty()) {
        std::cout << json << std::endl;
      } else {
        std::ofstream out(eval_out);
        out << json << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
