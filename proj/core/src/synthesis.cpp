#include "trajsyn/synthesis.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "trajsyn/rng.hpp"

namespace trajsyn {

namespace {
constexpr std::uint64_t kTagStep = 0x73796e2d737465ull;   // "syn-ste"
constexpr std::uint64_t kTagEnter = 0x73796e2d656e74ull;  // "syn-ent"
constexpr std::uint64_t kTagKill = 0x73796e2d6b696cull;   // "syn-kil"
}  // namespace

SyntheticDatabase::SyntheticDatabase(const GridSpec& grid, std::uint64_t seed)
    : grid_(grid), seed_(seed) {}

void SyntheticDatabase::step(const MobilityModel& model, const SynthParams& params, Tick t) {
  std::vector<double> row;
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    SyntheticTrajectory& traj = trajectories_[i];
    if (!traj.active) continue;
    Rng rng(derive_seed(seed_, kTagStep, i, static_cast<std::uint64_t>(t)));
    const Cell cur = cell_at(traj.cells.back(), grid_.k);
    const double len = static_cast<double>(traj.length());
    const double p_quit = std::min(1.0, (len / params.lambda) * model.quit_given_cell(cur));
    if (rng.bernoulli(p_quit)) {
      traj.active = false;
      --active_count_;
      continue;
    }
    model.move_row(cur, row);
    double total = 0.0;
    for (double v : row) total += v;
    const std::vector<Cell> nbs = neighbors(cur, grid_);
    std::size_t pick = nbs.size() - 1;
    if (total <= 0.0) {
      // Cold row or all mass on quitting; a survivor still needs somewhere
      // to go.
      pick = rng.uniform_below(nbs.size());
    } else {
      double r = rng.next_double() * total;
      for (std::size_t j = 0; j < nbs.size(); ++j) {
        r -= row[j];
        if (r < 0.0) {
          pick = j;
          break;
        }
      }
    }
    traj.cells.push_back(static_cast<std::int32_t>(cell_index(nbs[pick], grid_.k)));
  }
}

void SyntheticDatabase::adjust_size(std::size_t target_active, const MobilityModel& model,
                                    Tick t) {
  if (active_count_ < target_active) {
    const std::vector<double> enter = model.enter_dist();
    const std::size_t need = target_active - active_count_;
    for (std::size_t j = 0; j < need; ++j) {
      Rng rng(derive_seed(seed_, kTagEnter, trajectories_.size()));
      double r = rng.next_double();
      std::size_t cell = enter.size() - 1;
      for (std::size_t c = 0; c < enter.size(); ++c) {
        r -= enter[c];
        if (r < 0.0) {
          cell = c;
          break;
        }
      }
      SyntheticTrajectory traj;
      traj.start_tick = t;
      traj.cells.push_back(static_cast<std::int32_t>(cell));
      trajectories_.push_back(std::move(traj));
      ++active_count_;
    }
    return;
  }

  if (active_count_ > target_active) {
    const std::vector<double> quit = model.quit_dist();
    std::vector<std::size_t> candidates;
    std::vector<double> weight;
    for (std::size_t i = 0; i < trajectories_.size(); ++i) {
      if (!trajectories_[i].active) continue;
      candidates.push_back(i);
      weight.push_back(quit[static_cast<std::size_t>(trajectories_[i].cells.back())]);
    }
    double total = 0.0;
    for (double v : weight) total += v;
    Rng rng(derive_seed(seed_, kTagKill, static_cast<std::uint64_t>(t)));
    const std::size_t excess = active_count_ - target_active;
    // Weighted sampling without replacement; each removal zeroes its weight.
    for (std::size_t n = 0; n < excess; ++n) {
      std::size_t pick = candidates.size();
      if (total > 1e-300) {
        double r = rng.next_double() * total;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
          r -= weight[j];
          if (r < 0.0 && weight[j] > 0.0) {
            pick = j;
            break;
          }
        }
      }
      if (pick == candidates.size()) {
        // Residual weights exhausted or all zero: uniform over survivors.
        do {
          pick = rng.uniform_below(candidates.size());
        } while (!trajectories_[candidates[pick]].active);
      }
      SyntheticTrajectory& victim = trajectories_[candidates[pick]];
      victim.active = false;
      // A trajectory cut in the same tick it was stepped loses its
      // current-tick cell: quitting streams have no location at the quit
      // tick, and the published per-tick size must mirror the real count.
      if (victim.start_tick + static_cast<Tick>(victim.cells.size()) - 1 == t &&
          victim.cells.size() > 1) {
        victim.cells.pop_back();
      }
      total -= weight[pick];
      weight[pick] = 0.0;
      --active_count_;
    }
  }
}

void SyntheticDatabase::initialize(std::size_t target_active, const MobilityModel& model,
                                   Tick t) {
  if (!trajectories_.empty()) {
    throw Error("initialize: database not empty");
  }
  adjust_size(target_active, model, t);
}

CellStream SyntheticDatabase::to_stream() const {
  CellStream out;
  out.grid = grid_;
  out.tracks.reserve(trajectories_.size());
  char buf[24];
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    CellTrack tr;
    std::snprintf(buf, sizeof buf, "syn%07zu", i);
    tr.id = buf;
    tr.start_tick = trajectories_[i].start_tick;
    tr.cells = trajectories_[i].cells;
    out.tracks.push_back(std::move(tr));
  }
  out.update_bounds();
  return out;
}

}  // namespace trajsyn
