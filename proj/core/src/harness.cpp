#include "trajsyn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "trajsyn/client.hpp"
#include "trajsyn/oue.hpp"

namespace trajsyn {

namespace {
constexpr std::uint64_t kTagDecide = 0x68732d646563ull;  // "hs-dec"
constexpr std::uint64_t kTagReport = 0x68732d726570ull;  // "hs-rep"
constexpr std::uint64_t kTagSynth = 0x68732d73796eull;   // "hs-syn"
}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::AllUpdate: return "all_update";
    case Variant::NoEq: return "no_eq";
  }
  return "?";
}

std::optional<Variant> variant_from_string(const std::string& s) {
  if (s == "full") return Variant::Full;
  if (s == "all_update") return Variant::AllUpdate;
  if (s == "no_eq") return Variant::NoEq;
  return std::nullopt;
}

RunResult run(const RunConfig& cfg, const CellStream& input) {
  return run(cfg, input, TickObserver{});
}

RunResult run(const RunConfig& cfg, const CellStream& input, const TickObserver& observer) {
  if (input.grid.k != cfg.grid.k) {
    throw LengthMismatch("input stream and run config use different grids");
  }
  if (input.max_tick < input.min_tick) {
    throw EmptyInput("input stream has no ticks");
  }
  const Tick t0 = input.min_tick;
  const Tick t1 = input.max_tick;
  const TransitionDomain dom(cfg.grid);
  const std::size_t dom_size = dom.size();
  const bool with_enter_quit = cfg.variant != Variant::NoEq;

  MobilityModel model(dom, cfg.allocation.kappa + 1);
  WindowLedger ledger(cfg.w, cfg.epsilon);
  UserRegistry registry(input.tracks.size(), t0);
  SyntheticDatabase db(cfg.grid, derive_seed(cfg.seed, kTagSynth));
  SynthParams synth{cfg.lambda.value_or(std::max(1.0, input.average_track_length()))};

  // Per-tick arrival / quit schedules and present counts.
  const std::size_t n_ticks = static_cast<std::size_t>(t1 - t0 + 1);
  std::vector<std::vector<UserId>> arrivals(n_ticks), quit_events(n_ticks);
  std::vector<std::size_t> present(n_ticks, 0);
  for (UserId u = 0; u < input.tracks.size(); ++u) {
    const CellTrack& tr = input.tracks[u];
    arrivals[static_cast<std::size_t>(tr.start_tick - t0)].push_back(u);
    if (tr.end_tick() < t1) {
      quit_events[static_cast<std::size_t>(tr.end_tick() + 1 - t0)].push_back(u);
    }
    for (Tick t = tr.start_tick; t <= tr.end_tick(); ++t) {
      ++present[static_cast<std::size_t>(t - t0)];
    }
  }

  std::vector<UserStream> clients(input.tracks.size());
  for (UserId u = 0; u < input.tracks.size(); ++u) clients[u].user_id = input.tracks[u].id;
  std::vector<TransitionState> state(input.tracks.size());

  // Masks out enter/quit transitions for the movement-only variant.
  auto strip_enter_quit = [&](SignificantSet& sig) {
    for (std::size_t i = dom.move_count(); i < dom_size; ++i) sig.selected[i] = 0;
  };

  RunResult result;
  result.min_tick = t0;
  result.max_tick = t1;

  auto run_tick = [&](Tick t) {
    const auto wall_start = std::chrono::steady_clock::now();
    const std::size_t ti = static_cast<std::size_t>(t - t0);

    for (UserId u : arrivals[ti]) registry.register_arrival(u, t);
    for (UserId u : quit_events[ti]) registry.mark_quit(u, t);
    registry.recycle(t, cfg.w);

    Rng decide_rng(derive_seed(cfg.seed, kTagDecide, static_cast<std::uint64_t>(t)));
    AllocationDecision decision =
        decide(t, ledger, registry, model, cfg.allocation, decide_rng);

    // Every live client observes its own transition; only sampled ones report.
    for (UserId u = 0; u < input.tracks.size(); ++u) {
      const CellTrack& tr = input.tracks[u];
      if (tr.covers(t)) {
        state[u] = observe(clients[u], t, cell_at(tr.cell_at(t), cfg.grid.k));
      } else if (tr.end_tick() + 1 == t && tr.end_tick() < t1) {
        state[u] = observe(clients[u], t, std::nullopt);
      }
    }

    std::vector<BitReport> reports;
    if (decision.collect) {
      reports.reserve(decision.reporters.size());
      const PrivacyParams eps{decision.eps_t};
      for (UserId u : decision.reporters) {
        if (!with_enter_quit && state[u].kind != TransitionKind::Move) continue;
        Rng rng(derive_seed(cfg.seed, kTagReport, u, static_cast<std::uint64_t>(t)));
        reports.push_back(
            make_report(clients[u].user_id, t, state[u], dom, eps, rng).payload);
      }
    }

    double dev = deviation(model, cfg.allocation.kappa);
    std::size_t sig_count = 0;
    if (decision.collect && !reports.empty()) {
      const FrequencyEstimate fresh =
          aggregate(reports, PrivacyParams{decision.eps_t}, dom_size);
      const bool init_tick = !model.initialized();
      SignificantSet sig = SignificantSet::none(dom_size);
      if (init_tick || cfg.variant == Variant::AllUpdate) {
        // First usable estimate initializes the whole model; the all-update
        // variant keeps selecting everything.
        sig = SignificantSet::all(dom_size);
      } else {
        sig = model.select_significant(fresh, decision.eps_t, reports.size());
      }
      if (!with_enter_quit) strip_enter_quit(sig);
      sig_count = sig.count();
      model.apply_update(fresh, sig);
      // The ratio ring tracks how much of the model each collection updates;
      // the bootstrap initialization is not a selection and stays out of it.
      if (!init_tick) {
        model.push_sig_ratio(static_cast<double>(sig_count) / static_cast<double>(dom_size));
      }
    } else {
      model.carry_forward();
    }
    registry.finalize_tick(t);

    // Synthesis: step existing trajectories, then mirror the real size.
    if (t == t0) {
      db.initialize(present[ti], model, t);
    } else {
      db.step(model, synth, t);
      if (with_enter_quit) db.adjust_size(present[ti], model, t);
    }

    const auto wall_end = std::chrono::steady_clock::now();
    result.tick_millis.push_back(
        std::chrono::duration<double, std::milli>(wall_end - wall_start).count());
    result.allocation_log.push_back({t, decision.p_t, decision.eps_t, decision.n_t(),
                                     sig_count, dev});
    result.reporters_by_tick.push_back(decision.reporters);
    if (observer) observer(t, model, db);
  };

  for (Tick t = t0; t <= t1; ++t) {
    try {
      run_tick(t);
    } catch (const Error& e) {
      throw Error("tick " + std::to_string(t) + ": " + e.what());
    }
  }

  result.synthetic = db.to_stream();
  // A fully quit-free tail can leave the synthetic stream shorter than the
  // run; evaluation aligns on the union of tick ranges either way.
  result.synthetic.min_tick = t0;
  result.synthetic.max_tick = std::max(result.synthetic.max_tick, t1);

  result.metrics = evaluate_all(input, result.synthetic, cfg.eval);
  result.density_series = density_error_series(input, result.synthetic);
  result.transition_series = transition_error_series(input, result.synthetic, dom);
  result.model_snapshot_json = model.to_json_string();

  if (!cfg.out_dir.empty()) {
    write_artifacts(cfg, result, input);
  }
  return result;
}

namespace {

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["grid"] = {{"min_x", cfg.grid.bbox.min_x},
               {"min_y", cfg.grid.bbox.min_y},
               {"max_x", cfg.grid.bbox.max_x},
               {"max_y", cfg.grid.bbox.max_y},
               {"k", cfg.grid.k}};
  j["epsilon"] = cfg.epsilon;
  j["w"] = cfg.w;
  j["allocation"] = {{"strategy", to_string(cfg.allocation.strategy)},
                     {"division", to_string(cfg.allocation.division)},
                     {"alpha", cfg.allocation.alpha},
                     {"kappa", cfg.allocation.kappa},
                     {"p_max", cfg.allocation.p_max},
                     {"budget_floor", cfg.allocation.budget_floor}};
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  j["eval"] = {{"phi", cfg.eval.phi},
               {"n_queries", cfg.eval.n_queries},
               {"n_hotspot", cfg.eval.n_hotspot},
               {"n_patterns", cfg.eval.n_patterns},
               {"pattern_lengths", cfg.eval.pattern_lengths},
               {"sanity_fraction", cfg.eval.sanity_fraction},
               {"seed", cfg.eval.seed}};
  j["variant"] = to_string(cfg.variant);
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2); }

RunConfig run_config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RunConfig cfg;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.bbox.min_x = g.value("min_x", cfg.grid.bbox.min_x);
    cfg.grid.bbox.min_y = g.value("min_y", cfg.grid.bbox.min_y);
    cfg.grid.bbox.max_x = g.value("max_x", cfg.grid.bbox.max_x);
    cfg.grid.bbox.max_y = g.value("max_y", cfg.grid.bbox.max_y);
    cfg.grid.k = g.value("k", cfg.grid.k);
  }
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.w = j.value("w", cfg.w);
  if (j.contains("allocation")) {
    const auto& a = j.at("allocation");
    const std::string strategy = a.value("strategy", "adaptive");
    if (strategy == "adaptive") cfg.allocation.strategy = Strategy::Adaptive;
    else if (strategy == "uniform") cfg.allocation.strategy = Strategy::Uniform;
    else if (strategy == "sample") cfg.allocation.strategy = Strategy::Sample;
    else throw Error("unknown strategy: " + strategy);
    const std::string division = a.value("division", "population");
    if (division == "budget") cfg.allocation.division = Division::Budget;
    else if (division == "population") cfg.allocation.division = Division::Population;
    else throw Error("unknown division: " + division);
    cfg.allocation.alpha = a.value("alpha", cfg.allocation.alpha);
    cfg.allocation.kappa = a.value("kappa", cfg.allocation.kappa);
    cfg.allocation.p_max = a.value("p_max", cfg.allocation.p_max);
    cfg.allocation.budget_floor = a.value("budget_floor", cfg.allocation.budget_floor);
  }
  if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    cfg.eval.phi = e.value("phi", cfg.eval.phi);
    cfg.eval.n_queries = e.value("n_queries", cfg.eval.n_queries);
    cfg.eval.n_hotspot = e.value("n_hotspot", cfg.eval.n_hotspot);
    cfg.eval.n_patterns = e.value("n_patterns", cfg.eval.n_patterns);
    if (e.contains("pattern_lengths")) {
      cfg.eval.pattern_lengths = e.at("pattern_lengths").get<std::vector<int>>();
    }
    cfg.eval.sanity_fraction = e.value("sanity_fraction", cfg.eval.sanity_fraction);
    cfg.eval.seed = e.value("seed", cfg.eval.seed);
  }
  if (j.contains("variant")) {
    const auto v = variant_from_string(j.at("variant").get<std::string>());
    if (!v) throw Error("unknown variant: " + j.at("variant").get<std::string>());
    cfg.variant = *v;
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  return cfg;
}

std::string run_metrics_json(const RunConfig& cfg, const RunResult& result,
                             const CellStream& input) {
  nlohmann::json j;
  const MetricsReport& r = result.metrics;
  j["metrics"] = {{"density_error", r.density_error},
                  {"query_error", r.query_error},
                  {"hotspot_ndcg", r.hotspot_ndcg},
                  {"transition_error", r.transition_error},
                  {"pattern_f1", r.pattern_f1},
                  {"kendall_tau", r.kendall_tau},
                  {"trip_error", r.trip_error},
                  {"length_error", r.length_error}};
  j["run"] = {{"ticks", result.max_tick - result.min_tick + 1},
              {"input_tracks", input.tracks.size()},
              {"input_points", input.total_points()},
              {"synthetic_tracks", result.synthetic.tracks.size()},
              {"synthetic_points", result.synthetic.total_points()}};
  j["config"] = config_json(cfg);
  return j.dump(2);
}

void write_artifacts(const RunConfig& cfg, const RunResult& result, const CellStream& input) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "metrics.json");
    out << run_metrics_json(cfg, result, input) << '\n';
  }
  {
    std::ofstream out(dir / "allocation_log.jsonl");
    for (const AllocationLogRecord& rec : result.allocation_log) {
      nlohmann::json j;
      j["tick"] = rec.tick;
      j["strategy"] = to_string(cfg.allocation.strategy);
      j["division"] = to_string(cfg.allocation.division);
      j["p"] = rec.p_t;
      j["eps"] = rec.eps_t;
      j["reporters"] = rec.n_reporters;
      j["significant"] = rec.sig_count;
      j["dev"] = rec.dev;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "per_tick_metrics.csv");
    out << "tick,density_error,transition_error\n";
    char buf[64];
    for (std::size_t i = 0; i < result.density_series.size(); ++i) {
      out << (result.min_tick + static_cast<Tick>(i)) << ',';
      std::snprintf(buf, sizeof buf, "%.9f,%.9f\n", result.density_series[i],
                    result.transition_series[i]);
      out << buf;
    }
  }
  {
    std::ofstream out(dir / "timing.csv");
    out << "tick,millis\n";
    for (std::size_t i = 0; i < result.tick_millis.size(); ++i) {
      out << (result.min_tick + static_cast<Tick>(i)) << ',' << result.tick_millis[i] << '\n';
    }
  }
  write_csv_file(result.synthetic, (dir / "synthetic.csv").string());
  {
    std::ofstream out(dir / "model_snapshot.json");
    out << result.model_snapshot_json << '\n';
  }
}

}  // namespace trajsyn
