//
// Copyright 2026 The gazedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// File formats:
//   fixations CSV   observer_id,x,y[,weight]
//   gaze map        "# gazedp v1 gazemap", "W H", H rows of W integers
//   aggregate map   "# gazedp v1 aggregate", "W H N", H rows of W reals
//   heatmap image   8-bit binary PGM (P5), value round(255 * intensity)

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/heatmap.hpp"

namespace gazedp {

inline constexpr std::string_view kFormatTag = "# gazedp v1";

struct ObserverFixations {
  std::string observer_id;
  std::vector<Fixation> fixations;
};

namespace detail {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

inline void FinishWrite(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

inline std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Next line that is neither blank nor a '#' comment; false at end of input.
inline bool NextContentLine(std::istream& in, std::string& line,
                            std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    return true;
  }
  return false;
}

inline Error ParseError(const std::string& source, std::size_t line_no,
                        const std::string& what) {
  return Error(ErrorCode::kParse,
               source + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace detail

// Groups rows of `observer_id,x,y[,weight]` by observer in first-appearance
// order. The header row is required; '#' lines are ignored.
inline std::vector<ObserverFixations> ReadFixations(std::istream& in,
                                                    const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!detail::NextContentLine(in, line, line_no)) {
    throw Error(ErrorCode::kParse, source + ": no fixation rows (empty file)");
  }
  const auto header = detail::SplitCommas(line);
  const bool header_ok =
      (header.size() == 3 || header.size() == 4) && header[0] == "observer_id" &&
      header[1] == "x" && header[2] == "y" &&
      (header.size() == 3 || header[3] == "weight");
  if (!header_ok) {
    throw detail::ParseError(source, line_no,
                             "expected header observer_id,x,y[,weight]");
  }
  std::vector<ObserverFixations> observers;
  std::unordered_map<std::string, std::size_t> slot;
  while (detail::NextContentLine(in, line, line_no)) {
    const auto fields = detail::SplitCommas(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw detail::ParseError(source, line_no,
                               "expected 3 or 4 fields, got " +
                                   std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw detail::ParseError(source, line_no, "empty observer_id");
    }
    Fixation f;
    if (!detail::ParseNumber(fields[1], f.x) || !detail::ParseNumber(fields[2], f.y) ||
        !std::isfinite(f.x) || !std::isfinite(f.y)) {
      throw detail::ParseError(source, line_no, "malformed coordinate");
    }
    if (fields.size() == 4 && !fields[3].empty()) {
      if (!detail::ParseNumber(fields[3], f.weight) || f.weight == 0) {
        throw detail::ParseError(source, line_no,
                                 "weight must be a positive integer");
      }
    }
    const std::string id(fields[0]);
    auto [it, inserted] = slot.try_emplace(id, observers.size());
    if (inserted) observers.push_back({id, {}});
    observers[it->second].fixations.push_back(f);
  }
  if (observers.empty()) {
    throw Error(ErrorCode::kParse, source + ": no fixation rows (empty file)");
  }
  return observers;
}

inline std::vector<ObserverFixations> LoadFixations(const std::string& path) {
  auto in = detail::OpenForRead(path);
  return ReadFixations(in, path);
}

inline void WriteGazeMap(std::ostream& out, const GazeMap& map) {
  const GridSpec& g = map.grid();
  out << kFormatTag << " gazemap\n" << g.width() << ' ' << g.height() << '\n';
  for (std::size_t y = 0; y < g.height(); ++y) {
    for (std::size_t x = 0; x < g.width(); ++x) {
      if (x) out << ' ';
      out << map.at(x, y);
    }
    out << '\n';
  }
}

namespace detail {

template <typename T>
std::vector<T> ReadGridRows(std::istream& in, const GridSpec& grid,
                            const std::string& source, std::size_t& line_no) {
  std::vector<T> cells;
  cells.reserve(grid.pixels());
  std::string line;
  std::size_t rows = 0;
  while (NextContentLine(in, line, line_no)) {
    ++rows;
    if (rows > grid.height()) {
      throw ParseError(source, line_no,
                       "more than the declared " +
                           std::to_string(grid.height()) + " rows");
    }
    std::istringstream fields(line);
    std::string token;
    std::size_t cols = 0;
    while (fields >> token) {
      T value{};
      if (!ParseNumber(std::string_view(token), value)) {
        throw ParseError(source, line_no, "malformed value '" + token + "'");
      }
      cells.push_back(value);
      ++cols;
    }
    if (cols != grid.width()) {
      throw ParseError(source, line_no,
                       "row has " + std::to_string(cols) + " values, expected " +
                           std::to_string(grid.width()));
    }
  }
  if (rows != grid.height()) {
    throw ParseError(source, line_no,
                     "found " + std::to_string(rows) + " rows, expected " +
                         std::to_string(grid.height()));
  }
  return cells;
}

}  // namespace detail

inline GazeMap ReadGazeMap(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!detail::NextContentLine(in, line, line_no)) {
    throw Error(ErrorCode::kParse, source + ": missing 'width height' header");
  }
  std::istringstream header(line);
  std::size_t w = 0, h = 0;
  std::string extra;
  if (!(header >> w >> h) || (header >> extra) || w == 0 || h == 0) {
    throw detail::ParseError(source, line_no, "expected 'width height' header");
  }
  const GridSpec grid(w, h);
  auto counts = detail::ReadGridRows<Count>(in, grid, source, line_no);
  return GazeMap(grid, std::move(counts));
}

inline void SaveGazeMap(const std::string& path, const GazeMap& map) {
  auto out = detail::OpenForWrite(path);
  WriteGazeMap(out, map);
  detail::FinishWrite(out, path);
}

inline GazeMap LoadGazeMap(const std::string& path) {
  auto in = detail::OpenForRead(path);
  return ReadGazeMap(in, path);
}

inline void WriteAggregateMap(std::ostream& out, const AggregateMap& map) {
  const GridSpec& g = map.grid();
  out << kFormatTag << " aggregate\n"
      << g.width() << ' ' << g.height() << ' ' << map.normalization() << '\n';
  for (std::size_t y = 0; y < g.height(); ++y) {
    for (std::size_t x = 0; x < g.width(); ++x) {
      if (x) out << ' ';
      out << detail::FormatReal(map[g.Index(x, y)]);
    }
    out << '\n';
  }
}

inline AggregateMap ReadAggregateMap(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!detail::NextContentLine(in, line, line_no)) {
    throw Error(ErrorCode::kParse, source + ": missing 'width height n' header");
  }
  std::istringstream header(line);
  std::size_t w = 0, h = 0, n = 0;
  std::string extra;
  if (!(header >> w >> h >> n) || (header >> extra) || w == 0 || h == 0 ||
      n == 0) {
    throw detail::ParseError(source, line_no, "expected 'width height n' header");
  }
  const GridSpec grid(w, h);
  auto values = detail::ReadGridRows<double>(in, grid, source, line_no);
  return AggregateMap(grid, std::move(values), n);
}

inline void SaveAggregateMap(const std::string& path, const AggregateMap& map) {
  auto out = detail::OpenForWrite(path);
  WriteAggregateMap(out, map);
  detail::FinishWrite(out, path);
}

inline AggregateMap LoadAggregateMap(const std::string& path) {
  auto in = detail::OpenForRead(path);
  return ReadAggregateMap(in, path);
}

// Grey level round(255 * v) with v clamped to [0, 1].
inline std::uint8_t GreyLevel(double intensity) {
  const double v = std::clamp(intensity, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * v));
}

inline void WritePgm(std::ostream& out, const Heatmap& heatmap) {
  const GridSpec& g = heatmap.grid();
  out << "P5\n" << kFormatTag << '\n' << g.width() << ' ' << g.height() << "\n255\n";
  std::vector<char> bytes(g.pixels());
  for (std::size_t p = 0; p < g.pixels(); ++p) {
    bytes[p] = static_cast<char>(GreyLevel(heatmap[p]));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline void RenderHeatmap(const Heatmap& heatmap, const std::string& path) {
  auto out = detail::OpenForWrite(path);
  WritePgm(out, heatmap);
  detail::FinishWrite(out, path);
}

struct GreyImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Reads an 8-bit P5 image, skipping header comments.
inline GreyImage ReadPgm(const std::string& path) {
  auto in = detail::OpenForRead(path);
  const auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  if (token() != "P5") throw Error(ErrorCode::kParse, path + ": not a P5 PGM");
  GreyImage img;
  std::size_t maxval = 0;
  if (!detail::ParseNumber(std::string_view(token()), img.width) ||
      !detail::ParseNumber(std::string_view(token()), img.height)) {
    throw Error(ErrorCode::kParse, path + ": bad PGM dimensions");
  }
  const std::string maxval_token = token();
  if (!detail::ParseNumber(std::string_view(maxval_token), maxval) ||
      maxval != 255) {
    throw Error(ErrorCode::kParse, path + ": only maxval 255 is supported");
  }
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw Error(ErrorCode::kParse, path + ": truncated PGM pixel data");
  }
  return img;
}

}  // namespace gazedp
