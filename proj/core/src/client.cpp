#include "trajsyn/client.hpp"

namespace trajsyn {

TransitionState observe(UserStream& u, Tick t, std::optional<Cell> cell) {
  if (!u.live && !cell) {
    throw Error("observe: dead stream with no location");
  }
  if (!u.live && u.last_cell) {
    throw Error("observe: stream already quit; streams do not re-enter");
  }
  if (!u.live) {
    u.live = true;
    u.entered_at = t;
    u.last_cell = cell;
    return TransitionState::enter(*cell);
  }
  if (!cell) {
    u.live = false;
    return TransitionState::quit(*u.last_cell);
  }
  TransitionState s = transition_of(u.last_cell, cell);
  u.last_cell = cell;
  return s;
}

TransitionState observe(UserStream& u, Tick t, std::optional<Point> loc, const GridSpec& g) {
  std::optional<Cell> cell;
  if (loc) cell = discretize(*loc, g);
  return observe(u, t, cell);
}

ClientReport make_report(const std::string& user_id, Tick t, const TransitionState& state,
                         const TransitionDomain& dom, PrivacyParams eps, Rng& rng) {
  const std::size_t index = dom.index_of(state);
  ClientReport r;
  r.user_id = user_id;
  r.timestamp = t;
  r.payload = perturb(encode(index, dom.size()), eps, rng);
  r.epsilon_spent = eps.epsilon;
  return r;
}

}  // namespace trajsyn
