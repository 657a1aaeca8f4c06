#include "trajsyn/generator.hpp"

#include <algorithm>
#include <cmath>

#include "trajsyn/rng.hpp"

namespace trajsyn {

namespace {

constexpr std::uint64_t kTagHotspots = 0x67656e2d686f74ull;  // "gen-hot"
constexpr std::uint64_t kTagUser = 0x67656e2d757372ull;      // "gen-usr"

int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.ix - b.ix), std::abs(a.iy - b.iy));
}

std::vector<Cell> pick_hotspots(const GridSpec& g, std::size_t count, Rng& rng) {
  std::vector<int> all(g.cell_count());
  for (int i = 0; i < g.cell_count(); ++i) all[i] = i;
  count = std::min<std::size_t>(count, all.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(all[i], all[i + rng.uniform_below(all.size() - i)]);
  }
  std::vector<Cell> spots;
  for (std::size_t i = 0; i < count; ++i) spots.push_back(cell_at(all[i], g.k));
  return spots;
}

Cell mirror(Cell c, int k) { return Cell{k - 1 - c.ix, k - 1 - c.iy}; }

// Hotspot intensities oscillating out of phase, akin to districts taking
// turns at rush hour.
double spot_strength(const GeneratorSpec& spec, std::size_t spot, std::size_t n_spots,
                     Tick t) {
  if (spec.pulse_amplitude <= 0.0 || spec.pulse_period <= 0 || n_spots == 0) return 1.0;
  const double phase = 2.0 * 3.14159265358979323846 *
                       (static_cast<double>(t) / static_cast<double>(spec.pulse_period) +
                        static_cast<double>(spot) / static_cast<double>(n_spots));
  return 1.0 + spec.pulse_amplitude * std::sin(phase);
}

double cell_weight(const GeneratorSpec& spec, Cell c, const std::vector<Cell>& hotspots,
                   Tick t) {
  if (hotspots.empty() || spec.attraction <= 0.0) return 1.0;
  double w = 0.05;
  for (std::size_t h = 0; h < hotspots.size(); ++h) {
    w += spot_strength(spec, h, hotspots.size(), t) *
         std::exp(-spec.attraction * static_cast<double>(chebyshev(c, hotspots[h])));
  }
  return w;
}


template <typename WeightFn>
std::size_t weighted_pick(std::size_t n, WeightFn&& weight, Rng& rng) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weight(i);
  double r = rng.next_double() * total;
  for (std::size_t i = 0; i < n; ++i) {
    r -= weight(i);
    if (r < 0.0) return i;
  }
  return n - 1;
}

}  // namespace

CellStream generate(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.quit_prob < 0.0 || spec.quit_prob > 1.0) {
    throw Error("generate: quit probability outside [0, 1]");
  }
  const GridSpec& g = spec.grid;
  Rng spot_rng(derive_seed(seed, kTagHotspots));
  const std::vector<Cell> base_spots = pick_hotspots(g, spec.hotspot_count, spot_rng);
  std::vector<Cell> shifted_spots;
  for (Cell c : base_spots) shifted_spots.push_back(mirror(c, g.k));

  auto spots_at = [&](Tick t) -> const std::vector<Cell>& {
    return (spec.drift_tick && t >= *spec.drift_tick) ? shifted_spots : base_spots;
  };

  CellStream out;
  out.grid = g;
  std::size_t next_user = 0;

  auto start_user = [&](Tick enter_tick) {
    const std::size_t uid = next_user++;
    Rng rng(derive_seed(seed, kTagUser, uid));
    const auto& spots = spots_at(enter_tick);
    // Entry cell pulled toward the currently strong hotspots.
    const std::size_t start = weighted_pick(
        static_cast<std::size_t>(g.cell_count()),
        [&](std::size_t i) {
          return cell_weight(spec, cell_at(static_cast<int>(i), g.k), spots, enter_tick);
        },
        rng);
    CellTrack track;
    track.id = "u" + std::to_string(uid);
    track.start_tick = enter_tick;
    track.cells.push_back(static_cast<std::int32_t>(start));
    // Walk forward until quitting or end of run.
    for (Tick t = enter_tick + 1; t <= spec.ticks; ++t) {
      if (rng.bernoulli(spec.quit_prob)) break;
      const Cell cur = cell_at(track.cells.back(), g.k);
      const std::vector<Cell> nbs = neighbors(cur, g);
      const auto& tick_spots = spots_at(t);
      const std::size_t pick = weighted_pick(
          nbs.size(), [&](std::size_t i) { return cell_weight(spec, nbs[i], tick_spots, t); },
          rng);
      track.cells.push_back(static_cast<std::int32_t>(cell_index(nbs[pick], g.k)));
    }
    out.tracks.push_back(std::move(track));
  };

  for (std::size_t i = 0; i < spec.initial_users; ++i) start_user(1);
  for (Tick t = 2; t <= spec.ticks; ++t) {
    for (std::size_t i = 0; i < spec.arrivals_per_tick; ++i) start_user(t);
  }
  out.update_bounds();
  // A run covers its configured span even if every user quits early.
  out.min_tick = 1;
  out.max_tick = std::max(out.max_tick, spec.ticks);
  return out;
}

}  // namespace trajsyn
