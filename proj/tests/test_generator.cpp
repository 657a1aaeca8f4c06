#include <doctest.h>

#include <sstream>

#include "trajsyn/generator.hpp"
#include "trajsyn/metrics.hpp"

using namespace trajsyn;

namespace {
GeneratorSpec base_spec() {
  GeneratorSpec spec;
  spec.grid = GridSpec{BoundingBox{0.0, 0.0, 1.0, 1.0}, 6};
  spec.initial_users = 300;
  spec.arrivals_per_tick = 5;
  spec.quit_prob = 0.02;
  spec.ticks = 80;
  return spec;
}
}  // namespace

TEST_CASE("no arrivals and no quitting keeps the population constant") {
  GeneratorSpec spec = base_spec();
  spec.arrivals_per_tick = 0;
  spec.quit_prob = 0.0;
  const CellStream s = generate(spec, 9);
  CHECK(s.tracks.size() == 300);
  for (Tick t = 1; t <= spec.ticks; ++t) CHECK(s.present_count(t) == 300);
}

TEST_CASE("generated streams are legal and cover the configured span") {
  const CellStream s = generate(base_spec(), 10);
  CHECK(s.min_tick == 1);
  CHECK(s.max_tick == 80);
  for (const CellTrack& tr : s.tracks) {
    CHECK(tr.start_tick >= 1);
    CHECK(tr.end_tick() <= 80);
    for (std::size_t i = 1; i < tr.cells.size(); ++i) {
      CHECK(adjacent(cell_at(tr.cells[i - 1], 6), cell_at(tr.cells[i], 6)));
    }
  }
}

TEST_CASE("identical seeds give byte-identical output") {
  std::ostringstream a, b;
  write_csv(generate(base_spec(), 42), a);
  write_csv(generate(base_spec(), 42), b);
  CHECK(a.str() == b.str());
  std::ostringstream c;
  write_csv(generate(base_spec(), 43), c);
  CHECK(a.str() != c.str());
}

TEST_CASE("a scheduled drift shifts the transition distribution") {
  GeneratorSpec spec = base_spec();
  spec.initial_users = 1500;
  spec.arrivals_per_tick = 30;
  spec.ticks = 100;
  spec.drift_tick = 51;
  const CellStream s = generate(spec, 5);

  // Aggregate empirical movement distribution per half of the run.
  const TransitionDomain dom(spec.grid);
  auto half_distribution = [&](Tick lo, Tick hi) {
    std::vector<double> counts(dom.size(), 0.0);
    for (const CellTrack& tr : s.tracks) {
      for (Tick t = std::max(tr.start_tick + 1, lo); t <= std::min(tr.end_tick(), hi); ++t) {
        const auto move = TransitionState::move(cell_at(tr.cell_at(t - 1), spec.grid.k),
                                                cell_at(tr.cell_at(t), spec.grid.k));
        counts[dom.index_of(move)] += 1.0;
      }
    }
    double total = 0.0;
    for (double c : counts) total += c;
    for (double& c : counts) c /= total;
    return counts;
  };
  const double shift = jsd(half_distribution(1, 50), half_distribution(51, 100));
  CHECK(shift > 0.1);

  GeneratorSpec steady = spec;
  steady.drift_tick.reset();
  const CellStream s2 = generate(steady, 5);
  // Without the drift the halves agree much more closely; rebuild the
  // distributions against the steady stream.
  auto steady_distribution = [&](Tick lo, Tick hi) {
    std::vector<double> counts(dom.size(), 0.0);
    for (const CellTrack& tr : s2.tracks) {
      for (Tick t = std::max(tr.start_tick + 1, lo); t <= std::min(tr.end_tick(), hi); ++t) {
        const auto move = TransitionState::move(cell_at(tr.cell_at(t - 1), spec.grid.k),
                                                cell_at(tr.cell_at(t), spec.grid.k));
        counts[dom.index_of(move)] += 1.0;
      }
    }
    double total = 0.0;
    for (double c : counts) total += c;
    for (double& c : counts) c /= total;
    return counts;
  };
  CHECK(jsd(steady_distribution(1, 50), steady_distribution(51, 100)) < shift);
}
