#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "trajsyn/grid.hpp"
#include "trajsyn/oue.hpp"

namespace trajsyn {

using Tick = std::int64_t;

// User-side state: tracks the last reported cell across ticks so the current
// transition state can be derived locally.
struct UserStream {
  std::string user_id;
  std::optional<Cell> last_cell;
  Tick entered_at = -1;
  bool live = false;
};

struct ClientReport {
  std::string user_id;
  Tick timestamp = 0;
  BitReport payload;
  double epsilon_spent = 0.0;
};

// Advances the stream one tick and returns its transition state: first
// location -> Enter, absent location after presence -> Quit (live becomes
// false), otherwise Move from the previous cell. Observation is free; only
// reporting costs budget.
TransitionState observe(UserStream& u, Tick t, std::optional<Cell> cell);
TransitionState observe(UserStream& u, Tick t, std::optional<Point> loc, const GridSpec& g);

// Encodes and perturbs the state for transmission to the curator.
// Throws StateNotInDomain for states the domain does not contain.
ClientReport make_report(const std::string& user_id, Tick t, const TransitionState& state,
                         const TransitionDomain& dom, PrivacyParams eps, Rng& rng);

}  // namespace trajsyn
