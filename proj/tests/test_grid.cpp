#include <doctest.h>

#include <set>

#include "trajsyn/grid.hpp"

using namespace trajsyn;

namespace {
GridSpec unit_grid(int k) { return GridSpec{BoundingBox{0.0, 0.0, 1.0, 1.0}, k}; }
}  // namespace

TEST_CASE("discretize maps points to cells with clamping") {
  CHECK(discretize({0.6, 0.2}, unit_grid(2)) == Cell{1, 0});
  CHECK(discretize({1.0, 1.0}, unit_grid(2)) == Cell{1, 1});
  GridSpec g{BoundingBox{0.0, 0.0, 10.0, 10.0}, 5};
  CHECK(discretize({-3.0, 4.5}, g) == Cell{0, 2});
}

TEST_CASE("discretize round-trips cell centroids") {
  const GridSpec g = unit_grid(6);
  for (int i = 0; i < g.cell_count(); ++i) {
    const Cell c = cell_at(i, g.k);
    CHECK(discretize(cell_centroid(c, g), g) == c);
  }
}

TEST_CASE("neighbors: corner, interior, degenerate grid") {
  auto as_set = [](const std::vector<Cell>& v) { return std::set<Cell>(v.begin(), v.end()); };
  CHECK(as_set(neighbors({0, 0}, unit_grid(3))) ==
        std::set<Cell>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(neighbors({1, 1}, unit_grid(3)).size() == 9);
  CHECK(as_set(neighbors({0, 0}, unit_grid(1))) == std::set<Cell>{{0, 0}});
}

TEST_CASE("neighbors contain self and are symmetric") {
  for (int k = 1; k <= 6; ++k) {
    const GridSpec g = unit_grid(k);
    for (int i = 0; i < g.cell_count(); ++i) {
      const Cell a = cell_at(i, k);
      const auto na = neighbors(a, g);
      CHECK(std::find(na.begin(), na.end(), a) != na.end());
      for (const Cell& b : na) {
        const auto nb = neighbors(b, g);
        CHECK(std::find(nb.begin(), nb.end(), a) != nb.end());
      }
    }
  }
}

TEST_CASE("transition domain sizes") {
  CHECK(TransitionDomain(unit_grid(2)).size() == 24);  // 16 moves + 4 enter + 4 quit
  CHECK(TransitionDomain(unit_grid(1)).size() == 3);
  CHECK(TransitionDomain(unit_grid(3)).size() == 67);  // 4*4 + 4*6 + 9 moves, + 9 + 9
}

TEST_CASE("transition domain matches neighborhood enumeration") {
  for (int k = 1; k <= 6; ++k) {
    const GridSpec g = unit_grid(k);
    const TransitionDomain dom(g);
    std::size_t moves = 0;
    for (int i = 0; i < g.cell_count(); ++i) {
      moves += neighbors(cell_at(i, k), g).size();
    }
    CHECK(dom.move_count() == moves);
    CHECK(dom.size() == moves + 2 * static_cast<std::size_t>(g.cell_count()));
    CHECK(dom.size() <= 11 * static_cast<std::size_t>(g.cell_count()));
  }
}

TEST_CASE("domain indexing is a bijection with documented ordering") {
  const GridSpec g = unit_grid(4);
  const TransitionDomain dom(g);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const TransitionState& s = dom.state_at(i);
    CHECK(dom.index_of(s) == i);
    seen.insert(i);
  }
  CHECK(seen.size() == dom.size());
  // Moves first (sorted by from-index then to-index), then enters, then quits.
  for (std::size_t i = 0; i < dom.move_count(); ++i) {
    CHECK(dom.state_at(i).kind == TransitionKind::Move);
  }
  for (std::size_t i = 1; i < dom.move_count(); ++i) {
    const auto& prev = dom.state_at(i - 1);
    const auto& cur = dom.state_at(i);
    const int pf = cell_index(prev.a, g.k), cf = cell_index(cur.a, g.k);
    CHECK(pf <= cf);
    if (pf == cf) CHECK(cell_index(prev.b, g.k) < cell_index(cur.b, g.k));
  }
  for (int i = 0; i < g.cell_count(); ++i) {
    CHECK(dom.state_at(dom.enter_index(cell_at(i, g.k))).kind == TransitionKind::Enter);
    CHECK(dom.state_at(dom.quit_index(cell_at(i, g.k))).kind == TransitionKind::Quit);
  }
}

TEST_CASE("transition_of derives enter, move, quit") {
  CHECK(transition_of(std::nullopt, Cell{1, 1}) == TransitionState::enter({1, 1}));
  CHECK(transition_of(Cell{1, 1}, Cell{1, 2}) == TransitionState::move({1, 1}, {1, 2}));
  CHECK(transition_of(Cell{1, 1}, std::nullopt) == TransitionState::quit({1, 1}));
  CHECK_THROWS_AS(transition_of(Cell{0, 0}, Cell{2, 2}), NonAdjacentMove);
  CHECK_THROWS_AS(transition_of(std::nullopt, std::nullopt), Error);
}

TEST_CASE("illegal states are not in the domain") {
  const TransitionDomain dom(unit_grid(3));
  CHECK_THROWS_AS(dom.index_of(TransitionState::move({0, 0}, {2, 2})), StateNotInDomain);
  CHECK(dom.find(TransitionState::move({0, 0}, {2, 2})) == -1);
  CHECK_THROWS_AS(dom.state_at(dom.size()), IndexOutOfDomain);
}
