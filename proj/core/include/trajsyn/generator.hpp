#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trajsyn/stream.hpp"

namespace trajsyn {

// Built-in stream source: a biased random walk on the grid with hotspot
// attractors, Poisson-like arrivals and geometric quitting, optionally with a
// scheduled distribution shift. Stands in for external moving-object data so
// runs have a ground truth with known enter/quit/transition structure.
struct GeneratorSpec {
  GridSpec grid;
  std::size_t initial_users = 1000;
  std::size_t arrivals_per_tick = 20;
  double quit_prob = 0.02;
  Tick ticks = 200;
  std::size_t hotspot_count = 3;
  // Pull toward hotspots; candidate cells are weighted by a uniform floor
  // plus per-hotspot exp(-attraction * distance) terms. Real mobility data
  // is heavily concentrated; the default keeps most movement around the
  // attractors.
  double attraction = 3.0;
  // Rush-hour style dynamics: hotspot intensities oscillate out of phase
  // with this period and amplitude, so mobility mass migrates gradually
  // between attractors. Amplitude 0 gives a statistically stationary stream.
  double pulse_amplitude = 0.6;
  Tick pulse_period = 80;
  // When set, hotspots jump to their mirrored cells at this tick, shifting
  // the enter and transition distributions mid-run.
  std::optional<Tick> drift_tick;
};

CellStream generate(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace trajsyn
