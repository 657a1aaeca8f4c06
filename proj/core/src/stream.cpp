#include "trajsyn/stream.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

namespace trajsyn {

void CellStream::update_bounds() {
  if (tracks.empty()) {
    min_tick = 0;
    max_tick = -1;
    return;
  }
  min_tick = tracks.front().start_tick;
  max_tick = tracks.front().end_tick();
  for (const CellTrack& tr : tracks) {
    min_tick = std::min(min_tick, tr.start_tick);
    max_tick = std::max(max_tick, tr.end_tick());
  }
}

std::size_t CellStream::total_points() const {
  std::size_t n = 0;
  for (const CellTrack& tr : tracks) n += tr.cells.size();
  return n;
}

double CellStream::average_track_length() const {
  if (tracks.empty()) return 0.0;
  return static_cast<double>(total_points()) / static_cast<double>(tracks.size());
}

std::size_t CellStream::present_count(Tick t) const {
  std::size_t n = 0;
  for (const CellTrack& tr : tracks) n += tr.covers(t) ? 1 : 0;
  return n;
}

namespace {

struct RawRecord {
  Tick timestamp;
  double x;
  double y;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

}  // namespace

CellStream ingest_csv(std::istream& in, const GridSpec& grid) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw EmptyInput("no header line");
  }
  ++line_no;
  if (trim(line) != "user_id,timestamp,x,y") {
    throw ParseError("expected header 'user_id,timestamp,x,y'", line_no);
  }

  // Group records per user; std::map keeps user iteration deterministic.
  std::map<std::string, std::vector<RawRecord>> by_user;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::size_t n_fields = 0;
    std::size_t pos = 0;
    while (n_fields < 4) {
      const std::size_t comma = sv.find(',', pos);
      if (comma == std::string_view::npos) {
        fields[n_fields++] = trim(sv.substr(pos));
        pos = sv.size();
        break;
      }
      fields[n_fields++] = trim(sv.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (n_fields != 4 || pos != sv.size()) {
      throw ParseError("expected 4 fields", line_no);
    }
    RawRecord rec;
    rec.timestamp = parse_number<Tick>(fields[1], line_no, "timestamp");
    rec.x = parse_number<double>(fields[2], line_no, "x");
    rec.y = parse_number<double>(fields[3], line_no, "y");
    rec.line = line_no;
    by_user[std::string(fields[0])].push_back(rec);
  }
  if (by_user.empty()) {
    throw EmptyInput("no data rows");
  }

  CellStream out;
  out.grid = grid;
  for (auto& [user_id, recs] : by_user) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < recs.size(); ++i) {
      if (recs[i].timestamp == recs[i - 1].timestamp) {
        throw ParseError("duplicate timestamp for user '" + user_id + "'", recs[i].line);
      }
    }
    // Split at gaps and at jumps that violate adjacency (quit + re-enter).
    CellTrack track;
    int piece = 1;
    auto flush = [&]() {
      if (track.cells.empty()) return;
      track.id = piece == 1 ? user_id : user_id + "#" + std::to_string(piece);
      out.tracks.push_back(std::move(track));
      track = CellTrack{};
      ++piece;
    };
    for (const RawRecord& rec : recs) {
      const Cell c = discretize(Point{rec.x, rec.y}, grid);
      const std::int32_t ci = cell_index(c, grid.k);
      if (!track.cells.empty()) {
        const Tick prev_t = track.end_tick();
        const Cell prev = cell_at(track.cells.back(), grid.k);
        if (rec.timestamp != prev_t + 1 || !adjacent(prev, c)) {
          flush();
        }
      }
      if (track.cells.empty()) track.start_tick = rec.timestamp;
      track.cells.push_back(ci);
    }
    flush();
  }
  out.update_bounds();
  return out;
}

CellStream ingest_csv_file(const std::string& path, const GridSpec& grid) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open input file: " + path);
  }
  return ingest_csv(in, grid);
}

void write_csv(const CellStream& stream, std::ostream& out) {
  out << "user_id,timestamp,x,y\n";
  // Row index sorted by (timestamp, user_id).
  struct Row {
    Tick t;
    std::size_t track;
  };
  std::vector<Row> rows;
  rows.reserve(stream.total_points());
  for (std::size_t i = 0; i < stream.tracks.size(); ++i) {
    const CellTrack& tr = stream.tracks[i];
    for (Tick t = tr.start_tick; t <= tr.end_tick(); ++t) rows.push_back({t, i});
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    if (a.t != b.t) return a.t < b.t;
    return stream.tracks[a.track].id < stream.tracks[b.track].id;
  });
  char buf[64];
  for (const Row& r : rows) {
    const CellTrack& tr = stream.tracks[r.track];
    const Point p = cell_centroid(cell_at(tr.cell_at(r.t), stream.grid.k), stream.grid);
    out << tr.id << ',' << r.t << ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.x, p.y);
    out << buf;
  }
}

void write_csv_file(const CellStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open output file: " + path);
  }
  write_csv(stream, out);
}

}  // namespace trajsyn
