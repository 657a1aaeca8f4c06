#include <doctest.h>

#include <cmath>

#include "trajsyn/synthesis.hpp"

using namespace trajsyn;

namespace {

const GridSpec kGrid2{BoundingBox{0.0, 0.0, 1.0, 1.0}, 2};

FrequencyEstimate estimate_of(std::vector<double> values) {
  FrequencyEstimate est;
  est.values = std::move(values);
  est.n = 100;
  est.epsilon_used = 1.0;
  return est;
}

// Model with uniform movement everywhere plus the given enter/quit masses.
MobilityModel build_model(const TransitionDomain& dom, double move_mass, double quit_mass,
                          std::vector<double> enter_mass = {}) {
  std::vector<double> values(dom.size(), 0.0);
  for (std::size_t i = 0; i < dom.move_count(); ++i) values[i] = move_mass;
  const int ncells = dom.grid().cell_count();
  for (int c = 0; c < ncells; ++c) {
    values[dom.quit_index(cell_at(c, dom.grid().k))] = quit_mass;
    if (!enter_mass.empty()) {
      values[dom.enter_index(cell_at(c, dom.grid().k))] = enter_mass[c];
    }
  }
  MobilityModel model(dom, 6);
  model.apply_update(estimate_of(values), SignificantSet::all(dom.size()));
  return model;
}

}  // namespace

TEST_CASE("step terminates deterministically when the reweighted quit clamps to 1") {
  const TransitionDomain dom(kGrid2);
  // Base quit probability 0.6 per cell: quit 0.6 vs moves totalling 0.4.
  const MobilityModel model = build_model(dom, 0.1, 0.6);
  CHECK(model.quit_given_cell({0, 0}) == doctest::Approx(0.6));

  SyntheticDatabase db(kGrid2, 7);
  db.initialize(50, model, 1);
  CHECK(db.active_count() == 50);
  // Length 1, lambda 0.5: factor 2 * 0.6 = 1.2, clamped to certain quit.
  db.step(model, SynthParams{0.5}, 2);
  CHECK(db.active_count() == 0);
  for (const auto& traj : db.trajectories()) CHECK(traj.length() == 1);
}

TEST_CASE("step at the restriction length uses the base quit probability") {
  const TransitionDomain dom(kGrid2);
  // Moves sum to 0.4 per row, quit mass 0.4: base quit probability 1/2.
  const MobilityModel model = build_model(dom, 0.1, 0.4);
  CHECK(model.quit_given_cell({0, 0}) == doctest::Approx(0.5));
  // lambda = 1 and length 1: reweight factor is exactly 1; expect about half
  // of a large population to terminate.
  SyntheticDatabase db(kGrid2, 21);
  db.initialize(20000, model, 1);
  db.step(model, SynthParams{1.0}, 2);
  const double survivors = static_cast<double>(db.active_count()) / 20000.0;
  CHECK(survivors == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("without quit mass and huge lambda no trajectory ever terminates in step") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.2, 0.0);
  SyntheticDatabase db(kGrid2, 3);
  db.initialize(100, model, 1);
  for (Tick t = 2; t <= 40; ++t) db.step(model, SynthParams{1e18}, t);
  CHECK(db.active_count() == 100);
  for (const auto& traj : db.trajectories()) CHECK(traj.length() == 40);
}

TEST_CASE("adjust_size tops up from the entering distribution") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.1, 0.0);
  SyntheticDatabase db(kGrid2, 5);
  db.initialize(90, model, 1);
  db.adjust_size(100, model, 1);
  CHECK(db.active_count() == 100);
  CHECK(db.trajectories().size() == 100);
  for (const auto& traj : db.trajectories()) CHECK(traj.length() == 1);
  db.adjust_size(100, model, 1);  // no change
  CHECK(db.trajectories().size() == 100);
}

TEST_CASE("adjust_size terminates the excess exactly") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.1, 0.0);  // uniform quit fallback
  SyntheticDatabase db(kGrid2, 9);
  db.initialize(100, model, 1);
  db.adjust_size(97, model, 1);
  CHECK(db.active_count() == 97);
  std::size_t terminated = 0;
  for (const auto& traj : db.trajectories()) terminated += traj.active ? 0 : 1;
  CHECK(terminated == 3);
}

TEST_CASE("surplus terminated after stepping lose their current-tick cell") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.2, 0.0);
  SyntheticDatabase db(kGrid2, 13);
  db.initialize(10, model, 1);
  db.step(model, SynthParams{100.0}, 2);
  CHECK(db.active_count() == 10);
  db.adjust_size(6, model, 2);
  CHECK(db.active_count() == 6);
  for (const auto& traj : db.trajectories()) {
    if (traj.active) {
      CHECK(traj.length() == 2);
    } else {
      // Ended at tick 1; no location at its quit tick.
      CHECK(traj.length() == 1);
    }
  }
}

TEST_CASE("initialize: start cells follow the entering distribution") {
  const TransitionDomain dom(kGrid2);
  // Enter mass (0.3, 0.1, 0, 0) -> distribution (0.75, 0.25, 0, 0).
  const MobilityModel model = build_model(dom, 0.1, 0.0, {0.3, 0.1, 0.0, 0.0});
  SyntheticDatabase db(kGrid2, 31);
  const std::size_t n = 10000;
  db.initialize(n, model, 1);
  std::vector<std::size_t> counts(4, 0);
  for (const auto& traj : db.trajectories()) ++counts[traj.cells.front()];
  // 3 sigma of a Binomial(n, 0.75) share.
  const double sigma = std::sqrt(0.75 * 0.25 / static_cast<double>(n));
  CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.75) < 3.0 * sigma);
  CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.25) < 3.0 * sigma);
  CHECK(counts[2] == 0);
  CHECK(counts[3] == 0);
}

TEST_CASE("one-hot entering distribution pins every start cell") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.1, 0.0, {0.0, 0.0, 1.0, 0.0});
  SyntheticDatabase db(kGrid2, 1);
  db.initialize(5, model, 1);
  for (const auto& traj : db.trajectories()) CHECK(traj.cells.front() == 2);
  SyntheticDatabase empty(kGrid2, 1);
  empty.initialize(0, model, 1);
  CHECK(empty.trajectories().empty());
}

TEST_CASE("generation is reproducible from the seed") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.3, 0.2, {0.4, 0.3, 0.2, 0.1});
  auto run_db = [&](std::uint64_t seed) {
    SyntheticDatabase db(kGrid2, seed);
    db.initialize(200, model, 1);
    for (Tick t = 2; t <= 30; ++t) {
      db.step(model, SynthParams{10.0}, t);
      db.adjust_size(200, model, t);
    }
    return db.to_stream();
  };
  const CellStream a = run_db(55);
  const CellStream b = run_db(55);
  REQUIRE(a.tracks.size() == b.tracks.size());
  for (std::size_t i = 0; i < a.tracks.size(); ++i) {
    CHECK(a.tracks[i].cells == b.tracks[i].cells);
    CHECK(a.tracks[i].start_tick == b.tracks[i].start_tick);
  }
  const CellStream c = run_db(56);
  bool differs = c.tracks.size() != a.tracks.size();
  for (std::size_t i = 0; !differs && i < a.tracks.size(); ++i) {
    differs = a.tracks[i].cells != c.tracks[i].cells;
  }
  CHECK(differs);
}

TEST_CASE("synthetic trajectories always respect adjacency") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = build_model(dom, 0.3, 0.1, {0.4, 0.3, 0.2, 0.1});
  SyntheticDatabase db(kGrid2, 77);
  db.initialize(150, model, 1);
  for (Tick t = 2; t <= 50; ++t) {
    db.step(model, SynthParams{20.0}, t);
    db.adjust_size(150, model, t);
  }
  for (const auto& traj : db.trajectories()) {
    for (std::size_t i = 1; i < traj.cells.size(); ++i) {
      CHECK(adjacent(cell_at(traj.cells[i - 1], 2), cell_at(traj.cells[i], 2)));
    }
  }
}
