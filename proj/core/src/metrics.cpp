#include "trajsyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <json.hpp>

#include "trajsyn/rng.hpp"

namespace trajsyn {

namespace {

constexpr std::uint64_t kTagQuery = 0x6d2d717565ull;    // "m-que"
constexpr std::uint64_t kTagHotspot = 0x6d2d686f74ull;  // "m-hot"
constexpr std::uint64_t kTagPattern = 0x6d2d706174ull;  // "m-pat"

std::vector<double> normalized(std::span<const std::int64_t> counts) {
  double total = 0.0;
  for (std::int64_t c : counts) total += static_cast<double>(c);
  std::vector<double> out(counts.size(), 0.0);
  if (total <= 0.0) return out;  // all-zero; jsd substitutes uniform
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<double>(counts[i]) / total;
  }
  return out;
}

// Per-tick per-cell visit counts over [lo, hi], plus tick prefix sums for
// range queries.
struct Occupancy {
  Tick lo = 0;
  Tick hi = -1;
  int ncells = 0;
  std::vector<std::int64_t> counts;  // (hi-lo+1) x ncells

  std::span<const std::int64_t> at(Tick t) const {
    return {counts.data() + (t - lo) * ncells, static_cast<std::size_t>(ncells)};
  }
};

Occupancy build_occupancy(const CellStream& s, Tick lo, Tick hi) {
  Occupancy occ;
  occ.lo = lo;
  occ.hi = hi;
  occ.ncells = s.grid.cell_count();
  occ.counts.assign(static_cast<std::size_t>(hi - lo + 1) * occ.ncells, 0);
  for (const CellTrack& tr : s.tracks) {
    for (Tick t = std::max(tr.start_tick, lo); t <= std::min(tr.end_tick(), hi); ++t) {
      ++occ.counts[static_cast<std::size_t>(t - lo) * occ.ncells + tr.cell_at(t)];
    }
  }
  return occ;
}

// cum[(t+1) * ncells + c] = total visits of cell c in ticks [lo, lo+t].
std::vector<std::int64_t> tick_prefix(const Occupancy& occ) {
  const std::size_t n = static_cast<std::size_t>(occ.hi - occ.lo + 1);
  std::vector<std::int64_t> cum((n + 1) * occ.ncells, 0);
  for (std::size_t t = 0; t < n; ++t) {
    for (int c = 0; c < occ.ncells; ++c) {
      cum[(t + 1) * occ.ncells + c] =
          cum[t * occ.ncells + c] + occ.counts[t * occ.ncells + c];
    }
  }
  return cum;
}

struct TickRange {
  Tick lo = 0;
  Tick hi = -1;
};

TickRange union_range(const CellStream& a, const CellStream& b) {
  TickRange r;
  r.lo = std::min(a.min_tick, b.min_tick);
  r.hi = std::max(a.max_tick, b.max_tick);
  return r;
}

void check_grids(const CellStream& a, const CellStream& b) {
  if (a.grid.k != b.grid.k) {
    throw LengthMismatch("streams discretized on different grids");
  }
}

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("jsd: distributions of different length");
  }
  if (p.empty()) return 0.0;
  const double uniform = 1.0 / static_cast<double>(p.size());
  double sum_p = 0.0, sum_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum_p += p[i];
    sum_q += q[i];
  }
  auto value = [&](std::span<const double> v, double sum, std::size_t i) {
    return sum <= 0.0 ? uniform : v[i];
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = value(p, sum_p, i);
    const double qi = value(q, sum_q, i);
    const double m = 0.5 * (pi + qi);
    if (pi > 0.0) acc += 0.5 * pi * std::log(pi / m);
    if (qi > 0.0) acc += 0.5 * qi * std::log(qi / m);
  }
  return std::max(0.0, acc);
}

double density_error_at(const CellStream& orig, const CellStream& syn, Tick t) {
  check_grids(orig, syn);
  const Occupancy a = build_occupancy(orig, t, t);
  const Occupancy b = build_occupancy(syn, t, t);
  return jsd(normalized(a.at(t)), normalized(b.at(t)));
}

std::vector<double> density_error_series(const CellStream& orig, const CellStream& syn) {
  check_grids(orig, syn);
  const TickRange r = union_range(orig, syn);
  const Occupancy a = build_occupancy(orig, r.lo, r.hi);
  const Occupancy b = build_occupancy(syn, r.lo, r.hi);
  std::vector<double> out;
  for (Tick t = r.lo; t <= r.hi; ++t) {
    out.push_back(jsd(normalized(a.at(t)), normalized(b.at(t))));
  }
  return out;
}

double density_error_avg(const CellStream& orig, const CellStream& syn) {
  const std::vector<double> series = density_error_series(orig, syn);
  if (series.empty()) return 0.0;
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

double query_error(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg) {
  check_grids(orig, syn);
  const TickRange r = union_range(orig, syn);
  const Tick span = r.hi - r.lo + 1;
  if (span < cfg.phi) {
    throw StreamTooShort("query_error: run spans " + std::to_string(span) +
                         " ticks, need " + std::to_string(cfg.phi));
  }
  const int k = orig.grid.k;
  const int ncells = orig.grid.cell_count();
  const auto cum_o = tick_prefix(build_occupancy(orig, r.lo, r.hi));
  const auto cum_s = tick_prefix(build_occupancy(syn, r.lo, r.hi));

  auto range_count = [&](const std::vector<std::int64_t>& cum, int ix0, int ix1, int iy0,
                         int iy1, Tick t0, Tick t1) {
    std::int64_t total = 0;
    const std::size_t a = static_cast<std::size_t>(t0 - r.lo);
    const std::size_t b = static_cast<std::size_t>(t1 - r.lo + 1);
    for (int ix = ix0; ix <= ix1; ++ix) {
      for (int iy = iy0; iy <= iy1; ++iy) {
        const int c = ix * k + iy;
        total += cum[b * ncells + c] - cum[a * ncells + c];
      }
    }
    return total;
  };

  Rng rng(derive_seed(cfg.seed, kTagQuery));
  double err = 0.0;
  for (int i = 0; i < cfg.n_queries; ++i) {
    int ix0 = static_cast<int>(rng.uniform_below(k));
    int ix1 = static_cast<int>(rng.uniform_below(k));
    if (ix0 > ix1) std::swap(ix0, ix1);
    int iy0 = static_cast<int>(rng.uniform_below(k));
    int iy1 = static_cast<int>(rng.uniform_below(k));
    if (iy0 > iy1) std::swap(iy0, iy1);
    const Tick t0 = r.lo + static_cast<Tick>(rng.uniform_below(span - cfg.phi + 1));
    const Tick t1 = t0 + cfg.phi - 1;

    const auto q_orig = range_count(cum_o, ix0, ix1, iy0, iy1, t0, t1);
    const auto q_syn = range_count(cum_s, ix0, ix1, iy0, iy1, t0, t1);
    const auto in_range = range_count(cum_o, 0, k - 1, 0, k - 1, t0, t1);
    const double sanity = cfg.sanity_fraction * static_cast<double>(in_range);
    const double denom = std::max(static_cast<double>(q_orig), sanity);
    if (denom <= 0.0) {
      err += q_syn > 0 ? 1.0 : 0.0;
    } else {
      err += std::abs(static_cast<double>(q_orig - q_syn)) / denom;
    }
  }
  return err / cfg.n_queries;
}

double hotspot_ndcg(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg) {
  check_grids(orig, syn);
  const TickRange r = union_range(orig, syn);
  const Tick span = r.hi - r.lo + 1;
  if (span < cfg.phi) {
    throw StreamTooShort("hotspot_ndcg: run shorter than phi");
  }
  const int ncells = orig.grid.cell_count();
  const auto cum_o = tick_prefix(build_occupancy(orig, r.lo, r.hi));
  const auto cum_s = tick_prefix(build_occupancy(syn, r.lo, r.hi));

  auto counts_in = [&](const std::vector<std::int64_t>& cum, Tick t0, Tick t1) {
    std::vector<std::int64_t> out(ncells);
    const std::size_t a = static_cast<std::size_t>(t0 - r.lo);
    const std::size_t b = static_cast<std::size_t>(t1 - r.lo + 1);
    for (int c = 0; c < ncells; ++c) {
      out[c] = cum[b * ncells + c] - cum[a * ncells + c];
    }
    return out;
  };
  // Cells ranked by visit count (ties by cell index); zero-count cells are
  // not ranked.
  auto top_cells = [&](const std::vector<std::int64_t>& counts) {
    std::vector<int> cells;
    for (int c = 0; c < ncells; ++c) {
      if (counts[c] > 0) cells.push_back(c);
    }
    std::sort(cells.begin(), cells.end(), [&](int a, int b) {
      if (counts[a] != counts[b]) return counts[a] > counts[b];
      return a < b;
    });
    if (cells.size() > static_cast<std::size_t>(cfg.n_hotspot)) {
      cells.resize(cfg.n_hotspot);
    }
    return cells;
  };

  Rng rng(derive_seed(cfg.seed, kTagHotspot));
  double total = 0.0;
  for (int i = 0; i < cfg.n_queries; ++i) {
    const Tick t0 = r.lo + static_cast<Tick>(rng.uniform_below(span - cfg.phi + 1));
    const Tick t1 = t0 + cfg.phi - 1;
    const auto counts_orig = counts_in(cum_o, t0, t1);
    const auto counts_syn = counts_in(cum_s, t0, t1);
    auto dcg_of = [&](const std::vector<int>& list) {
      double dcg = 0.0;
      for (std::size_t j = 0; j < list.size(); ++j) {
        dcg += static_cast<double>(counts_orig[list[j]]) / std::log2(static_cast<double>(j) + 2.0);
      }
      return dcg;
    };
    const double idcg = dcg_of(top_cells(counts_orig));
    total += idcg <= 0.0 ? 1.0 : std::min(1.0, dcg_of(top_cells(counts_syn)) / idcg);
  }
  return total / cfg.n_queries;
}

namespace {

// Per-tick transition-state counts over the domain. Enter events land on the
// start tick, quit events one past the final cell; tracks reaching the end
// of the evaluated span are still running and emit no quit.
std::vector<std::int64_t> transition_counts(const CellStream& s, const TransitionDomain& dom,
                                            Tick lo, Tick hi) {
  const std::size_t width = dom.size();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(hi - lo + 1) * width, 0);
  const int k = s.grid.k;
  auto bump = [&](Tick t, std::size_t state) {
    if (t < lo || t > hi) return;
    ++counts[static_cast<std::size_t>(t - lo) * width + state];
  };
  for (const CellTrack& tr : s.tracks) {
    bump(tr.start_tick, dom.enter_index(cell_at(tr.cells.front(), k)));
    for (std::size_t i = 1; i < tr.cells.size(); ++i) {
      bump(tr.start_tick + static_cast<Tick>(i),
           dom.index_of(TransitionState::move(cell_at(tr.cells[i - 1], k),
                                              cell_at(tr.cells[i], k))));
    }
    if (tr.end_tick() < hi) {
      bump(tr.end_tick() + 1, dom.quit_index(cell_at(tr.cells.back(), k)));
    }
  }
  return counts;
}

}  // namespace

std::vector<double> transition_error_series(const CellStream& orig, const CellStream& syn,
                                            const TransitionDomain& dom) {
  check_grids(orig, syn);
  const TickRange r = union_range(orig, syn);
  const auto a = transition_counts(orig, dom, r.lo, r.hi);
  const auto b = transition_counts(syn, dom, r.lo, r.hi);
  const std::size_t width = dom.size();
  std::vector<double> out;
  for (Tick t = r.lo; t <= r.hi; ++t) {
    const std::size_t off = static_cast<std::size_t>(t - r.lo) * width;
    out.push_back(jsd(normalized({a.data() + off, width}), normalized({b.data() + off, width})));
  }
  return out;
}

double transition_error_at(const CellStream& orig, const CellStream& syn,
                           const TransitionDomain& dom, Tick t) {
  check_grids(orig, syn);
  const auto a = transition_counts(orig, dom, t, t);
  const auto b = transition_counts(syn, dom, t, t);
  return jsd(normalized({a.data(), dom.size()}), normalized({b.data(), dom.size()}));
}

double transition_error_avg(const CellStream& orig, const CellStream& syn,
                            const TransitionDomain& dom) {
  const auto series = transition_error_series(orig, syn, dom);
  if (series.empty()) return 0.0;
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

namespace {

using PatternCounts = std::unordered_map<std::uint64_t, std::int64_t>;

void collect_patterns(const CellStream& s, Tick t0, Tick t1, const std::vector<int>& lengths,
                      std::uint64_t base, PatternCounts& out) {
  for (const CellTrack& tr : s.tracks) {
    const Tick a = std::max(tr.start_tick, t0);
    const Tick b = std::min(tr.end_tick(), t1);
    if (a > b) continue;
    const std::size_t off = static_cast<std::size_t>(a - tr.start_tick);
    const std::size_t len = static_cast<std::size_t>(b - a + 1);
    for (int L : lengths) {
      if (len < static_cast<std::size_t>(L)) continue;
      for (std::size_t i = 0; i + L <= len; ++i) {
        std::uint64_t key = 1;
        for (int j = 0; j < L; ++j) {
          key = key * base + static_cast<std::uint64_t>(tr.cells[off + i + j]);
        }
        ++out[key];
      }
    }
  }
}

std::vector<std::uint64_t> top_patterns(const PatternCounts& counts, int n) {
  std::vector<std::pair<std::uint64_t, std::int64_t>> items(counts.begin(), counts.end());
  auto cmp = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  if (items.size() > static_cast<std::size_t>(n)) {
    std::nth_element(items.begin(), items.begin() + n, items.end(), cmp);
    items.resize(n);
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(items.size());
  for (const auto& [k, c] : items) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

double pattern_f1(const CellStream& orig, const CellStream& syn, const EvalConfig& cfg) {
  check_grids(orig, syn);
  const TickRange r = union_range(orig, syn);
  const Tick span = r.hi - r.lo + 1;
  if (span < cfg.phi) {
    throw StreamTooShort("pattern_f1: run shorter than phi");
  }
  const auto base = static_cast<std::uint64_t>(orig.grid.cell_count());
  int max_len = 0;
  for (int L : cfg.pattern_lengths) max_len = std::max(max_len, L);
  if (static_cast<double>(max_len + 1) * std::log2(static_cast<double>(base)) > 62.0) {
    throw Error("pattern_f1: pattern length too large for this grid");
  }

  Rng rng(derive_seed(cfg.seed, kTagPattern));
  double total = 0.0;
  for (int i = 0; i < cfg.n_queries; ++i) {
    const Tick t0 = r.lo + static_cast<Tick>(rng.uniform_below(span - cfg.phi + 1));
    const Tick t1 = t0 + cfg.phi - 1;
    PatternCounts po, ps;
    collect_patterns(orig, t0, t1, cfg.pattern_lengths, base, po);
    collect_patterns(syn, t0, t1, cfg.pattern_lengths, base, ps);
    const auto a = top_patterns(po, cfg.n_patterns);
    const auto b = top_patterns(ps, cfg.n_patterns);
    if (a.empty() && b.empty()) {
      total += 1.0;
      continue;
    }
    std::size_t inter = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
      if (a[ia] == b[ib]) {
        ++inter;
        ++ia;
        ++ib;
      } else if (a[ia] < b[ib]) {
        ++ia;
      } else {
        ++ib;
      }
    }
    total += 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
  }
  return total / cfg.n_queries;
}

double kendall_tau(const CellStream& orig, const CellStream& syn) {
  check_grids(orig, syn);
  const int ncells = orig.grid.cell_count();
  std::vector<std::int64_t> x(ncells, 0), y(ncells, 0);
  for (const CellTrack& tr : orig.tracks) {
    for (std::int32_t c : tr.cells) ++x[c];
  }
  for (const CellTrack& tr : syn.tracks) {
    for (std::int32_t c : tr.cells) ++y[c];
  }
  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (int i = 0; i < ncells; ++i) {
    for (int j = i + 1; j < ncells; ++j) {
      const auto dx = x[i] - x[j];
      const auto dy = y[i] - y[j];
      if (dx == 0 && dy == 0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0) {
        ++ties_x;
      } else if (dy == 0) {
        ++ties_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<double>(ncells) * (ncells - 1) / 2.0;
  const double denom = std::sqrt((n0 - static_cast<double>(ties_x)) *
                                 (n0 - static_cast<double>(ties_y)));
  if (denom <= 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

double trip_error(const CellStream& orig, const CellStream& syn) {
  check_grids(orig, syn);
  const int ncells = orig.grid.cell_count();
  auto trips = [&](const CellStream& s) {
    std::vector<std::int64_t> joint(static_cast<std::size_t>(ncells) * ncells, 0);
    for (const CellTrack& tr : s.tracks) {
      ++joint[static_cast<std::size_t>(tr.cells.front()) * ncells + tr.cells.back()];
    }
    return joint;
  };
  const auto a = trips(orig);
  const auto b = trips(syn);
  return jsd(normalized(a), normalized(b));
}

double length_error(const CellStream& orig, const CellStream& syn) {
  check_grids(orig, syn);
  std::size_t max_len = 0;
  for (const CellTrack& tr : orig.tracks) max_len = std::max(max_len, tr.cells.size());
  for (const CellTrack& tr : syn.tracks) max_len = std::max(max_len, tr.cells.size());
  if (max_len == 0) return 0.0;
  // Buckets 1..cap plus an overflow bucket for anything longer.
  const std::size_t cap = std::min<std::size_t>(max_len, 512);
  auto lengths = [&](const CellStream& s) {
    std::vector<std::int64_t> buckets(cap + 1, 0);
    for (const CellTrack& tr : s.tracks) {
      ++buckets[std::min(tr.cells.size(), cap + 1) - 1];
    }
    return buckets;
  };
  const auto a = lengths(orig);
  const auto b = lengths(syn);
  return jsd(normalized(a), normalized(b));
}

MetricsReport evaluate_all(const CellStream& orig, const CellStream& syn,
                           const EvalConfig& cfg) {
  check_grids(orig, syn);
  const TransitionDomain dom(orig.grid);
  MetricsReport report;
  report.config = cfg;
  report.density_error = density_error_avg(orig, syn);
  report.query_error = query_error(orig, syn, cfg);
  report.hotspot_ndcg = hotspot_ndcg(orig, syn, cfg);
  report.transition_error = transition_error_avg(orig, syn, dom);
  report.pattern_f1 = pattern_f1(orig, syn, cfg);
  report.kendall_tau = kendall_tau(orig, syn);
  report.trip_error = trip_error(orig, syn);
  report.length_error = length_error(orig, syn);
  return report;
}

std::string to_json_string(const MetricsReport& r) {
  nlohmann::json j;
  j["metrics"] = {{"density_error", r.density_error},
                  {"query_error", r.query_error},
                  {"hotspot_ndcg", r.hotspot_ndcg},
                  {"transition_error", r.transition_error},
                  {"pattern_f1", r.pattern_f1},
                  {"kendall_tau", r.kendall_tau},
                  {"trip_error", r.trip_error},
                  {"length_error", r.length_error}};
  j["config"] = {{"phi", r.config.phi},
                 {"n_queries", r.config.n_queries},
                 {"n_hotspot", r.config.n_hotspot},
                 {"n_patterns", r.config.n_patterns},
                 {"pattern_lengths", r.config.pattern_lengths},
                 {"sanity_fraction", r.config.sanity_fraction},
                 {"seed", r.config.seed}};
  return j.dump(2);
}

}  // namespace trajsyn
