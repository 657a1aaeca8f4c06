#include "trajsyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trajsyn {

Point cell_centroid(Cell c, const GridSpec& g) {
  return Point{g.bbox.min_x + (c.ix + 0.5) * g.cell_width(),
               g.bbox.min_y + (c.iy + 0.5) * g.cell_height()};
}

namespace {
int clamp_axis(double v, double lo, double width, int k) {
  int i = static_cast<int>(std::floor((v - lo) / width));
  return std::clamp(i, 0, k - 1);
}
}  // namespace

Cell discretize(Point p, const GridSpec& g) {
  return Cell{clamp_axis(p.x, g.bbox.min_x, g.cell_width(), g.k),
              clamp_axis(p.y, g.bbox.min_y, g.cell_height(), g.k)};
}

bool adjacent(Cell a, Cell b) {
  return std::abs(a.ix - b.ix) <= 1 && std::abs(a.iy - b.iy) <= 1;
}

std::vector<Cell> neighbors(Cell c, const GridSpec& g) {
  std::vector<Cell> out;
  out.reserve(9);
  // ix-major loop yields dense-index order directly.
  for (int ix = std::max(0, c.ix - 1); ix <= std::min(g.k - 1, c.ix + 1); ++ix) {
    for (int iy = std::max(0, c.iy - 1); iy <= std::min(g.k - 1, c.iy + 1); ++iy) {
      out.push_back(Cell{ix, iy});
    }
  }
  return out;
}

TransitionState transition_of(std::optional<Cell> prev, std::optional<Cell> cur) {
  if (!prev && !cur) {
    throw Error("transition_of: both cells absent");
  }
  if (!prev) {
    return TransitionState::enter(*cur);
  }
  if (!cur) {
    return TransitionState::quit(*prev);
  }
  if (!adjacent(*prev, *cur)) {
    throw NonAdjacentMove("move from (" + std::to_string(prev->ix) + "," +
                          std::to_string(prev->iy) + ") to (" + std::to_string(cur->ix) +
                          "," + std::to_string(cur->iy) + ") is not adjacent");
  }
  return TransitionState::move(*prev, *cur);
}

TransitionDomain::TransitionDomain(GridSpec g) : grid_(g) {
  if (g.k < 1 || g.bbox.max_x <= g.bbox.min_x || g.bbox.max_y <= g.bbox.min_y) {
    throw Error("TransitionDomain: invalid grid spec");
  }
  const int n_cells = grid_.cell_count();
  row_offset_.assign(n_cells + 1, 0);
  for (int from = 0; from < n_cells; ++from) {
    Cell fc = cell_at(from, grid_.k);
    for (Cell to : neighbors(fc, grid_)) {
      states_.push_back(TransitionState::move(fc, to));
    }
    row_offset_[from + 1] = states_.size();
  }
  move_count_ = states_.size();
  for (int i = 0; i < n_cells; ++i) {
    states_.push_back(TransitionState::enter(cell_at(i, grid_.k)));
  }
  for (int i = 0; i < n_cells; ++i) {
    states_.push_back(TransitionState::quit(cell_at(i, grid_.k)));
  }
  move_index_range_.resize(move_count_);
  for (std::size_t i = 0; i < move_count_; ++i) move_index_range_[i] = i;
}

const TransitionState& TransitionDomain::state_at(std::size_t index) const {
  if (index >= states_.size()) {
    throw IndexOutOfDomain("state index " + std::to_string(index) + " out of domain of size " +
                           std::to_string(states_.size()));
  }
  return states_[index];
}

std::ptrdiff_t TransitionDomain::find(const TransitionState& s) const {
  const int k = grid_.k;
  auto in_grid = [&](Cell c) { return c.ix >= 0 && c.ix < k && c.iy >= 0 && c.iy < k; };
  if (!in_grid(s.a)) return -1;
  switch (s.kind) {
    case TransitionKind::Enter:
      return static_cast<std::ptrdiff_t>(enter_index(s.a));
    case TransitionKind::Quit:
      return static_cast<std::ptrdiff_t>(quit_index(s.a));
    case TransitionKind::Move: {
      if (!in_grid(s.b) || !adjacent(s.a, s.b)) return -1;
      const int from = cell_index(s.a, k);
      const int to = cell_index(s.b, k);
      // Destinations within a row are sorted by cell index.
      for (std::size_t i = row_offset_[from]; i < row_offset_[from + 1]; ++i) {
        if (cell_index(states_[i].b, k) == to) return static_cast<std::ptrdiff_t>(i);
      }
      return -1;
    }
  }
  return -1;
}

std::size_t TransitionDomain::index_of(const TransitionState& s) const {
  std::ptrdiff_t i = find(s);
  if (i < 0) {
    throw StateNotInDomain("transition state not in domain");
  }
  return static_cast<std::size_t>(i);
}

std::size_t TransitionDomain::enter_index(Cell c) const {
  return move_count_ + static_cast<std::size_t>(cell_index(c, grid_.k));
}

std::size_t TransitionDomain::quit_index(Cell c) const {
  return move_count_ + static_cast<std::size_t>(grid_.cell_count()) +
         static_cast<std::size_t>(cell_index(c, grid_.k));
}

std::span<const std::size_t> TransitionDomain::moves_from(Cell from) const {
  const int f = cell_index(from, grid_.k);
  return {move_index_range_.data() + row_offset_[f], row_offset_[f + 1] - row_offset_[f]};
}

}  // namespace trajsyn
