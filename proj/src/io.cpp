// Copyright 2026 The lfmc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfmc/io.hpp"

#include "lfmc/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace lfmc {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  const auto res = std::from_chars(begin, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("not a number: '" + t + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("not an integer: '" + t + "'");
  }
  return v;
}

std::string format_vector(const Vec& v, char sep) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += sep;
    s += format_double(v(i));
  }
  return s;
}

Vec parse_vector(std::string_view text, char sep) {
  const std::string t = trim(text);
  if (t.empty()) return Vec(0);
  const auto parts = split(t, sep);
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(parts[i]);
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

void KeyValueDoc::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

bool KeyValueDoc::has(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& KeyValueDoc::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw IoError("missing key '" + key + "'");
}

std::string KeyValueDoc::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValueDoc::get_double(const std::string& key) const { return parse_double(get(key)); }
std::int64_t KeyValueDoc::get_int(const std::string& key) const { return parse_int(get(key)); }
Vec KeyValueDoc::get_vector(const std::string& key) const { return parse_vector(get(key)); }

std::string KeyValueDoc::to_string() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
  return s;
}

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw IoError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    doc.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return doc;
}

void KeyValueDoc::save(const std::string& path) const { write_text_file(path, to_string()); }

KeyValueDoc KeyValueDoc::load(const std::string& path) { return parse(read_text_file(path)); }

std::string prefix_basename(const std::string& prefix) {
  return std::filesystem::path(prefix).filename().string();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    return __builtin_bswap64(bits);
  }
}

}  // namespace

void write_f64_values(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (double v : values) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<double> read_f64_values(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % 8 != 0) throw IoError("'" + path + "' is not a float64 block");
  in.seekg(0);
  std::vector<double> values(bytes / 8);
  for (double& v : values) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  if (!in) throw IoError("read from '" + path + "' failed");
  return values;
}

void write_f64_block(const std::string& path, const Mat& m) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  }
  write_f64_values(path, values);
}

Mat read_f64_block(const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  const auto values = read_f64_values(path);
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw IoError("'" + path + "' holds " + std::to_string(values.size()) + " values, expected " +
                  std::to_string(rows * cols));
  }
  Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[k++];
  }
  return m;
}

void write_csv_matrix(const std::string& path, const std::vector<std::string>& header, const Mat& m) {
  if (static_cast<Eigen::Index>(header.size()) != m.cols()) {
    throw DimensionError("write_csv_matrix: header has " + std::to_string(header.size()) + " names for " +
                         std::to_string(m.cols()) + " columns");
  }
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) text += ',';
    text += header[i];
  }
  text += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) text += ',';
      text += format_double(m(r, c));
    }
    text += '\n';
  }
  write_text_file(path, text);
}

Mat read_csv_matrix(const std::string& path, std::vector<std::string>* header) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const auto names = split(trim(line), ',');
  if (header) *header = names;
  std::vector<Vec> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    Vec row = parse_vector(line);
    if (row.size() != static_cast<Eigen::Index>(names.size())) {
      throw IoError("'" + path + "': row " + std::to_string(rows.size() + 1) + " has wrong column count");
    }
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return m;
}

}  // namespace lfmc
