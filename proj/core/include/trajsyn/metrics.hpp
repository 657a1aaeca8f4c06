#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajsyn/grid.hpp"
#include "trajsyn/stream.hpp"

namespace trajsyn {

struct EvalConfig {
  Tick phi = 20;              // time-range size for range-based metrics
  int n_queries = 100;        // random ranges per range-based metric
  int n_hotspot = 10;         // NDCG list length
  int n_patterns = 100;       // top-N pattern set size
  std::vector<int> pattern_lengths = {2, 3, 4};
  double sanity_fraction = 0.01;
  std::uint64_t seed = 0;
};

struct MetricsReport {
  double density_error = 0.0;
  double query_error = 0.0;
  double hotspot_ndcg = 0.0;
  double transition_error = 0.0;
  double pattern_f1 = 0.0;
  double kendall_tau = 0.0;
  double trip_error = 0.0;
  double length_error = 0.0;
  EvalConfig config;
};

// Jensen-Shannon divergence with natural logarithms; symmetric and bounded
// by ln 2. All-zero inputs are treated as uniform. Throws LengthMismatch.
double jsd(std::span<const double> p, std::span<const double> q);

// JSD between the per-cell occupancy distributions at one tick, and its
// average over every tick both streams span.
double density_error_at(const CellStream& orig, const CellStream& syn, Tick t);
double density_error_avg(const CellStream& orig, const CellStream& syn);
std::vector<double> density_error_series(const CellStream& orig, const CellStream& syn);

// Mean relative error of random (cell-rectangle x phi-tick) count queries,
// denominators floored by sanity_fraction of the orig points in the queried
// time range. Throws StreamTooShort when the run spans fewer than phi ticks.
double query_error(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg);

// Average NDCG@n_hotspot of the synthetic top-visited cells against the
// original visit counts over random phi-ranges.
double hotspot_ndcg(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg);

// JSD between the empirical transition-state distributions at one tick
// (over the full transition domain), and its per-run average.
double transition_error_at(const CellStream& orig, const CellStream& syn,
                           const TransitionDomain& dom, Tick t);
double transition_error_avg(const CellStream& orig, const CellStream& syn,
                            const TransitionDomain& dom);
std::vector<double> transition_error_series(const CellStream& orig, const CellStream& syn,
                                            const TransitionDomain& dom);

// F1 overlap of the top-n_patterns most frequent contiguous cell sequences
// (of the configured lengths) within random phi-ranges.
double pattern_f1(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg);

// Tie-aware Kendall tau-b between per-cell total visit counts.
double kendall_tau(const CellStream& orig, const CellStream& syn);

// JSD over the joint (start cell, end cell) trip distribution. Trajectories
// still active at run end count as ending at their last cell.
double trip_error(const CellStream& orig, const CellStream& syn);

// JSD over bucketed trajectory lengths (cell counts).
double length_error(const CellStream& orig, const CellStream& syn);

MetricsReport evaluate_all(const CellStream& orig, const CellStream& syn,
                           const EvalConfig& cfg);

std::string to_json_string(const MetricsReport& report);

}  // namespace trajsyn
