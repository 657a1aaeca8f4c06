#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajsyn/client.hpp"
#include "trajsyn/grid.hpp"

namespace trajsyn {

// One legal stream: a cell per consecutive tick, every consecutive pair
// adjacent. Ingest splits raw user data at timestamp gaps and non-adjacent
// jumps so this invariant holds for everything downstream.
struct CellTrack {
  std::string id;
  Tick start_tick = 0;
  std::vector<std::int32_t> cells;  // dense cell indices

  Tick end_tick() const { return start_tick + static_cast<Tick>(cells.size()) - 1; }
  bool covers(Tick t) const { return t >= start_tick && t <= end_tick(); }
  std::int32_t cell_at(Tick t) const { return cells[static_cast<std::size_t>(t - start_tick)]; }
};

struct CellStream {
  GridSpec grid;
  std::vector<CellTrack> tracks;
  Tick min_tick = 0;
  Tick max_tick = -1;  // max < min means empty

  Tick tick_count() const { return max_tick >= min_tick ? max_tick - min_tick + 1 : 0; }
  void update_bounds();

  std::size_t total_points() const;
  double average_track_length() const;
  // Number of streams with a location at t.
  std::size_t present_count(Tick t) const;
};

// Reads the CSV stream format `user_id,timestamp,x,y` (header required),
// discretizes points, and splits each user's records at timestamp gaps and
// at non-adjacent cell jumps into separate streams so that every resulting
// transition is legal. Throws ParseError (with line number) and EmptyInput.
CellStream ingest_csv(std::istream& in, const GridSpec& grid);
CellStream ingest_csv_file(const std::string& path, const GridSpec& grid);

// Writes the same CSV format, emitting each cell's centroid coordinates.
// Rows are ordered by (timestamp, user_id); byte output is deterministic.
void write_csv(const CellStream& stream, std::ostream& out);
void write_csv_file(const CellStream& stream, const std::string& path);

}  // namespace trajsyn
