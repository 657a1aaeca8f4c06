#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "trajsyn/client.hpp"
#include "trajsyn/mobility.hpp"
#include "trajsyn/rng.hpp"

namespace trajsyn {

enum class Strategy : std::uint8_t { Adaptive, Uniform, Sample };
enum class Division : std::uint8_t { Budget, Population };

const char* to_string(Strategy s);
const char* to_string(Division d);

struct AllocationParams {
  double alpha = 8.0;
  std::size_t kappa = 5;
  double p_max = 0.6;
  Strategy strategy = Strategy::Adaptive;
  Division division = Division::Budget;
  // Collections cheaper than this are skipped outright under budget division;
  // reports perturbed with a vanishing budget are pure noise.
  double budget_floor = 1e-3;
};

// Magnitude of recent change in the maintained frequency vector:
//   sum_s |f_s(latest) - mean_{k in preceding kappa ticks} f_s(k)|.
// Returns 0 when the history holds fewer than two vectors. The per-term
// absolute value keeps opposite-sign changes from cancelling.
double deviation(const MobilityModel& model, std::size_t kappa);

// Allocation portion p_t = min{(alpha/w) * (1 - mean(sig_ratios)) * ln(dev+1),
// p_max}, clamped to >= 0. Missing ratio history counts as mean 0.
double portion(double dev, std::span<const double> sig_ratios, int w,
               const AllocationParams& params);

// Sliding-window budget ledger for budget division: the sum of the last w
// per-tick budgets must never exceed epsilon.
class WindowLedger {
 public:
  WindowLedger(int w, double epsilon);

  int window() const { return w_; }
  double epsilon() const { return epsilon_; }

  // Budget available at the next tick: epsilon minus the spend of the last
  // w-1 recorded ticks.
  double remaining() const;
  // Sum over the last w recorded ticks.
  double window_sum() const;

  // Records the spend for one tick. Throws WindowOverflow if the window sum
  // would exceed epsilon; reaching that throw means an allocation bug.
  void charge(double eps_t);

 private:
  int w_;
  double epsilon_;
  std::deque<double> spent_;
};

using UserId = std::uint32_t;

enum class UserStatus : std::uint8_t { Pending, Active, Inactive, Quitted };

// Tracks each user's reporting status across the run plus the per-tick record
// of who reported, which drives recycling and the per-user audit.
class UserRegistry {
 public:
  UserRegistry(std::size_t user_count, Tick start_tick);

  Tick start_tick() const { return start_tick_; }
  UserStatus status(UserId u) const { return status_[u]; }

  void register_arrival(UserId u, Tick t);
  // Stream ended at t-1; the user may still send the final Quit report at t
  // if selected, then leaves the population for good.
  void mark_quit(UserId u, Tick t);
  // Users who quit at t become Quitted after collection finished for t.
  void finalize_tick(Tick t);

  // All users currently able to report: Active status (present or sending
  // their final quit this tick). Sorted by id.
  std::vector<UserId> eligible() const;
  std::size_t active_count() const;

  // Records a report; under population division (suspend) the user goes
  // Inactive until recycled w ticks later.
  void note_reported(UserId u, Tick t, bool suspend);

  // Users who reported at t-w and are Inactive become Active again. Quitted
  // users are never resurrected.
  void recycle(Tick t, int w);

  const std::vector<UserId>& reported_at(Tick t) const;
  Tick last_report_tick(UserId u) const { return last_report_[u]; }

 private:
  Tick start_tick_;
  std::vector<UserStatus> status_;
  std::vector<Tick> quit_tick_;
  std::vector<Tick> last_report_;
  std::vector<std::vector<UserId>> reported_by_tick_;
  std::vector<UserId> empty_;
};

struct AllocationDecision {
  double p_t = 0.0;
  double eps_t = 0.0;  // per-report budget this tick (0 when not collecting)
  bool collect = false;
  std::vector<UserId> reporters;

  std::size_t n_t() const { return reporters.size(); }
};

// Chooses the per-tick budget (budget division) or report-user sample
// (population division) per the configured strategy, charges the ledger and
// marks the chosen reporters in the registry atomically.
AllocationDecision decide(Tick t, WindowLedger& ledger, UserRegistry& registry,
                          const MobilityModel& model, const AllocationParams& params, Rng& rng);

}  // namespace trajsyn
