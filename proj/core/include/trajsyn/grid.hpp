#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trajsyn/errors.hpp"

namespace trajsyn {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;
};

// Uniform K x K partition of a bounding box.
struct GridSpec {
  BoundingBox bbox;
  int k = 1;

  double cell_width() const { return (bbox.max_x - bbox.min_x) / k; }
  double cell_height() const { return (bbox.max_y - bbox.min_y) / k; }
  int cell_count() const { return k * k; }
};

struct Cell {
  int ix = 0;
  int iy = 0;
  auto operator<=>(const Cell&) const = default;
};

// Dense index of a cell: ix * K + iy.
inline int cell_index(Cell c, int k) { return c.ix * k + c.iy; }
inline Cell cell_at(int index, int k) { return Cell{index / k, index % k}; }

// Center point of a cell, used when emitting synthetic streams as coordinates.
Point cell_centroid(Cell c, const GridSpec& g);

// Maps a point to its cell. Points on the max boundary or outside the box
// clamp to the nearest valid index; streaming data with GPS jitter should not
// abort a run.
Cell discretize(Point p, const GridSpec& g);

// Chebyshev distance <= 1 (a cell is adjacent to itself).
bool adjacent(Cell a, Cell b);

// Moore neighborhood of c intersected with the grid, including c itself,
// sorted by dense cell index. Size ranges from 4 (corner) to 9 (interior).
std::vector<Cell> neighbors(Cell c, const GridSpec& g);

enum class TransitionKind : std::uint8_t { Move, Enter, Quit };

// A user's per-tick mobility status: movement between adjacent cells, the
// start of a stream, or the end of one.
struct TransitionState {
  TransitionKind kind = TransitionKind::Enter;
  Cell a;  // Move: origin; Enter: entry cell; Quit: last reported cell
  Cell b;  // Move: destination; unused otherwise

  static TransitionState move(Cell from, Cell to) {
    return {TransitionKind::Move, from, to};
  }
  static TransitionState enter(Cell at) { return {TransitionKind::Enter, at, {}}; }
  static TransitionState quit(Cell last) { return {TransitionKind::Quit, last, {}}; }

  bool operator==(const TransitionState& o) const {
    if (kind != o.kind) return false;
    if (kind == TransitionKind::Move) return a == o.a && b == o.b;
    return a == o.a;
  }
};

// Derives the transition state from two consecutive observations.
// (absent, c) -> Enter(c); (c, absent) -> Quit(c); (a, b) -> Move(a, b).
// Throws NonAdjacentMove when the pair violates the reachability constraint;
// the ingest layer splits such streams instead of passing them through.
TransitionState transition_of(std::optional<Cell> prev, std::optional<Cell> cur);

// Enumeration of every legal transition state with a dense, reproducible
// indexing: movement states sorted by (from-index, to-index), then enter
// states by cell index, then quit states by cell index.
class TransitionDomain {
 public:
  explicit TransitionDomain(GridSpec g);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return states_.size(); }
  std::size_t move_count() const { return move_count_; }

  const TransitionState& state_at(std::size_t index) const;

  // Throws StateNotInDomain for illegal states (e.g. non-adjacent moves).
  std::size_t index_of(const TransitionState& s) const;
  // Same lookup without the throw; -1 when not in the domain.
  std::ptrdiff_t find(const TransitionState& s) const;

  std::size_t enter_index(Cell c) const;
  std::size_t quit_index(Cell c) const;

  // Contiguous range of movement-state indices originating at `from`,
  // in destination order. Pairs with neighbors(from) element-for-element.
  std::span<const std::size_t> moves_from(Cell from) const;

 private:
  GridSpec grid_;
  std::size_t move_count_ = 0;
  std::vector<TransitionState> states_;
  std::vector<std::size_t> row_offset_;  // per from-cell offset into move block
  std::vector<std::size_t> move_index_range_;  // identity list sliced by moves_from
};

}  // namespace trajsyn
