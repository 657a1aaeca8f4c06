#pragma once

#include <cstdint>
#include <vector>

#include "trajsyn/mobility.hpp"
#include "trajsyn/stream.hpp"

namespace trajsyn {

struct SynthParams {
  // Termination restriction factor; defaults to the average trajectory
  // length of the dataset being mirrored.
  double lambda = 1.0;
};

struct SyntheticTrajectory {
  Tick start_tick = 0;
  std::vector<std::int32_t> cells;
  bool active = true;

  std::size_t length() const { return cells.size(); }
};

// The evolving synthetic database. Per-trajectory randomness is derived from
// (seed, trajectory, tick) substreams, so stepping is order-independent and
// reproducible.
class SyntheticDatabase {
 public:
  SyntheticDatabase(const GridSpec& grid, std::uint64_t seed);

  std::size_t active_count() const { return active_count_; }
  const std::vector<SyntheticTrajectory>& trajectories() const { return trajectories_; }

  // Tick t: each active trajectory first draws termination with probability
  // min{1, (len/lambda) * quit_given_cell(last)}, otherwise appends a next
  // cell proportional to the model's movement row.
  void step(const MobilityModel& model, const SynthParams& params, Tick t);

  // Matches the active size to the real population at t: shortfall is filled
  // with new single-cell trajectories drawn from the entering distribution;
  // surplus trajectories are terminated with probability proportional to the
  // quitting distribution at their latest cell, sampled without replacement.
  void adjust_size(std::size_t target_active, const MobilityModel& model, Tick t);

  // First tick: adjust_size from an empty database.
  void initialize(std::size_t target_active, const MobilityModel& model, Tick t);

  CellStream to_stream() const;

 private:
  GridSpec grid_;
  std::uint64_t seed_;
  std::vector<SyntheticTrajectory> trajectories_;
  std::size_t active_count_ = 0;
};

}  // namespace trajsyn
