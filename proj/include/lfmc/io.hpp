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

#ifndef LFMC_IO_HPP
#define LFMC_IO_HPP

#include "lfmc/linalg.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lfmc {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

std::string format_vector(const Vec& v, char sep = ',');
Vec parse_vector(std::string_view text, char sep = ',');

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

/// Ordered "key = value" text document. Lines starting with '#' are comments.
class KeyValueDoc {
 public:
  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, const Vec& value) { set(key, format_vector(value)); }

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // throws IoError when missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  Vec get_vector(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  static KeyValueDoc parse(const std::string& text);

  void save(const std::string& path) const;
  static KeyValueDoc load(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// File-name part of a path prefix (used for sibling-file references in metadata).
std::string prefix_basename(const std::string& prefix);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Flat little-endian float64 block, row-major.
void write_f64_block(const std::string& path, const Mat& m);
Mat read_f64_block(const std::string& path, Eigen::Index rows, Eigen::Index cols);
std::vector<double> read_f64_values(const std::string& path);
void write_f64_values(const std::string& path, const std::vector<double>& values);

/// Comma-separated matrix with a header row naming the columns.
void write_csv_matrix(const std::string& path, const std::vector<std::string>& header, const Mat& m);
Mat read_csv_matrix(const std::string& path, std::vector<std::string>* header = nullptr);

}  // namespace lfmc

#endif  // LFMC_IO_HPP
