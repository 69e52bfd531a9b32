// Copyright 2026 The GridGame Authors
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

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "gridgame/error.hpp"

namespace gridgame {

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Attack rows by defense columns; entries are defender payoffs.
class PayoffMatrix {
 public:
  PayoffMatrix() = default;
  PayoffMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    for (std::size_t i = 0; i < rows; ++i) attack_ids.push_back("A" + std::to_string(i + 1));
    for (std::size_t j = 0; j < cols; ++j) defense_ids.push_back("D" + std::to_string(j + 1));
  }
  PayoffMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : PayoffMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0) {
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ValidationError("payoff matrix: ragged rows");
      std::size_t j = 0;
      for (double v : r) (*this)(i, j++) = v;
      ++i;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  std::vector<std::string> attack_ids;
  std::vector<std::string> defense_ids;

  bool operator==(const PayoffMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Header row of defense ids, then one row per attack led by its id.
inline std::string to_csv(const PayoffMatrix& m) {
  std::string out = "attack";
  for (const auto& d : m.defense_ids) out += "," + d;
  out += "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += m.attack_ids[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out += "," + format_double(m(i, j));
    out += "\n";
  }
  return out;
}

// Long format (attack, defense, score) for plotting tools.
inline std::string to_long_csv(const PayoffMatrix& m) {
  std::string out = "attack,defense,score\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += m.attack_ids[i] + "," + m.defense_ids[j] + "," + format_double(m(i, j)) + "\n";
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

inline PayoffMatrix parse_matrix_csv(const std::string& text, const std::string& origin = "matrix") {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::string> attacks;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = detail::split_csv_line(line);
    if (header.empty()) {
      if (cells.size() < 2) throw ParseError(origin + ":" + std::to_string(lineno) + ": header needs defense ids");
      header = std::move(cells);
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    attacks.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      const auto* first = cells[c].data();
      const auto* last = first + cells[c].size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw ParseError(origin + ":" + std::to_string(lineno) + ": field " + std::to_string(c + 1) +
                         " is not a number: '" + cells[c] + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(origin + ": no data rows");
  PayoffMatrix m(rows.size(), header.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  m.attack_ids = std::move(attacks);
  m.defense_ids.assign(header.begin() + 1, header.end());
  return m;
}

inline PayoffMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix_csv(ss.str(), path);
}

}  // namespace gridgame
