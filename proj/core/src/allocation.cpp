#include "trajsyn/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace trajsyn {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Adaptive: return "adaptive";
    case Strategy::Uniform: return "uniform";
    case Strategy::Sample: return "sample";
  }
  return "?";
}

const char* to_string(Division d) {
  return d == Division::Budget ? "budget" : "population";
}

double deviation(const MobilityModel& model, std::size_t kappa) {
  const std::size_t m = model.history_size();
  if (m < 2) return 0.0;
  const std::vector<double>& latest = model.history_at(m - 1);
  const std::size_t span = std::min(kappa, m - 1);  // vectors preceding the latest
  std::vector<double> mean(latest.size(), 0.0);
  for (std::size_t j = 0; j < span; ++j) {
    const std::vector<double>& v = model.history_at(m - 2 - j);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    dev += std::abs(latest[i] - mean[i] / static_cast<double>(span));
  }
  return dev;
}

double portion(double dev, std::span<const double> sig_ratios, int w,
               const AllocationParams& params) {
  double ratio_mean = 0.0;
  if (!sig_ratios.empty()) {
    ratio_mean = std::accumulate(sig_ratios.begin(), sig_ratios.end(), 0.0) /
                 static_cast<double>(sig_ratios.size());
  }
  const double p =
      (params.alpha / static_cast<double>(w)) * (1.0 - ratio_mean) * std::log(dev + 1.0);
  return std::clamp(p, 0.0, params.p_max);
}

WindowLedger::WindowLedger(int w, double epsilon) : w_(w), epsilon_(epsilon) {}

double WindowLedger::remaining() const {
  const std::size_t n = std::min<std::size_t>(spent_.size(), w_ - 1);
  double sum = 0.0;
  for (std::size_t i = spent_.size() - n; i < spent_.size(); ++i) sum += spent_[i];
  return epsilon_ - sum;
}

double WindowLedger::window_sum() const {
  const std::size_t n = std::min<std::size_t>(spent_.size(), w_);
  double sum = 0.0;
  for (std::size_t i = spent_.size() - n; i < spent_.size(); ++i) sum += spent_[i];
  return sum;
}

void WindowLedger::charge(double eps_t) {
  spent_.push_back(eps_t);
  while (spent_.size() > static_cast<std::size_t>(w_)) spent_.pop_front();
  if (window_sum() > epsilon_ + 1e-12) {
    throw WindowOverflow("window budget " + std::to_string(window_sum()) + " exceeds " +
                         std::to_string(epsilon_));
  }
}

UserRegistry::UserRegistry(std::size_t user_count, Tick start_tick)
    : start_tick_(start_tick),
      status_(user_count, UserStatus::Pending),
      quit_tick_(user_count, -1),
      last_report_(user_count, -1) {}

void UserRegistry::register_arrival(UserId u, Tick t) {
  if (status_[u] != UserStatus::Pending) {
    throw Error("register_arrival: user already registered");
  }
  status_[u] = UserStatus::Active;
  (void)t;
}

void UserRegistry::mark_quit(UserId u, Tick t) {
  quit_tick_[u] = t;
  if (status_[u] == UserStatus::Inactive) {
    status_[u] = UserStatus::Quitted;
  }
}

void UserRegistry::finalize_tick(Tick t) {
  for (UserId u = 0; u < status_.size(); ++u) {
    if (quit_tick_[u] == t && status_[u] != UserStatus::Quitted) {
      status_[u] = UserStatus::Quitted;
    }
  }
}

std::vector<UserId> UserRegistry::eligible() const {
  std::vector<UserId> out;
  for (UserId u = 0; u < status_.size(); ++u) {
    if (status_[u] == UserStatus::Active) out.push_back(u);
  }
  return out;
}

std::size_t UserRegistry::active_count() const {
  return static_cast<std::size_t>(
      std::count(status_.begin(), status_.end(), UserStatus::Active));
}

void UserRegistry::note_reported(UserId u, Tick t, bool suspend) {
  if (status_[u] != UserStatus::Active) {
    throw Error("note_reported: user not active");
  }
  const std::size_t idx = static_cast<std::size_t>(t - start_tick_);
  if (reported_by_tick_.size() <= idx) reported_by_tick_.resize(idx + 1);
  reported_by_tick_[idx].push_back(u);
  last_report_[u] = t;
  if (suspend) status_[u] = UserStatus::Inactive;
}

void UserRegistry::recycle(Tick t, int w) {
  const Tick target = t - w;
  if (target < start_tick_) return;
  for (UserId u : reported_at(target)) {
    if (status_[u] == UserStatus::Inactive) status_[u] = UserStatus::Active;
  }
}

const std::vector<UserId>& UserRegistry::reported_at(Tick t) const {
  const std::size_t idx = static_cast<std::size_t>(t - start_tick_);
  if (t < start_tick_ || idx >= reported_by_tick_.size()) return empty_;
  return reported_by_tick_[idx];
}

namespace {

// Uniform sample of m ids without replacement (partial Fisher-Yates),
// returned sorted for reproducible downstream iteration.
std::vector<UserId> sample_without_replacement(std::vector<UserId> pool, std::size_t m,
                                               Rng& rng) {
  m = std::min(m, pool.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

AllocationDecision decide(Tick t, WindowLedger& ledger, UserRegistry& registry,
                          const MobilityModel& model, const AllocationParams& params, Rng& rng) {
  const int w = ledger.window();
  const double epsilon = ledger.epsilon();
  // Bootstrap lasts until the model holds data: the first timestamp's 1/w
  // share, repeated if that collection yielded nothing usable.
  const bool bootstrap = !model.initialized();
  const bool block_start = ((t - registry.start_tick()) % w) == 0;
  std::vector<UserId> pool = registry.eligible();

  AllocationDecision d;
  switch (params.strategy) {
    case Strategy::Adaptive: {
      if (bootstrap) {
        // 1/w of the resource initializes the model and database.
        d.p_t = 1.0 / static_cast<double>(w);
      } else {
        const double dev = deviation(model, params.kappa);
        const auto ratios = model.recent_sig_ratios(params.kappa);
        d.p_t = portion(dev, ratios, w, params);
      }
      if (params.division == Division::Budget) {
        d.eps_t = bootstrap ? epsilon / w : d.p_t * ledger.remaining();
        if (d.eps_t < params.budget_floor) d.eps_t = 0.0;
        d.collect = d.eps_t > 0.0;
        if (d.collect) d.reporters = std::move(pool);
      } else {
        const auto m = static_cast<std::size_t>(d.p_t * static_cast<double>(pool.size()));
        d.reporters = sample_without_replacement(std::move(pool), m, rng);
        d.collect = !d.reporters.empty();
        d.eps_t = d.collect ? epsilon : 0.0;
      }
      break;
    }
    case Strategy::Uniform: {
      d.p_t = 1.0 / static_cast<double>(w);
      if (params.division == Division::Budget) {
        d.eps_t = epsilon / w;
        d.collect = true;
        d.reporters = std::move(pool);
      } else {
        const auto m = static_cast<std::size_t>(d.p_t * static_cast<double>(pool.size()));
        d.reporters = sample_without_replacement(std::move(pool), m, rng);
        d.collect = !d.reporters.empty();
        d.eps_t = d.collect ? epsilon : 0.0;
      }
      break;
    }
    case Strategy::Sample: {
      if (block_start) {
        d.p_t = 1.0;
        d.eps_t = epsilon;
        d.reporters = std::move(pool);
        d.collect = !d.reporters.empty();
      } else {
        d.p_t = 0.0;
        d.eps_t = 0.0;
        d.collect = false;
      }
      break;
    }
  }

  if (params.division == Division::Budget) {
    ledger.charge(d.collect ? d.eps_t : 0.0);
  }
  const bool suspend = params.division == Division::Population;
  for (UserId u : d.reporters) registry.note_reported(u, t, suspend);
  return d;
}

}  // namespace trajsyn
