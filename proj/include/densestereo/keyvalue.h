// Copyright 2026 The densestereo Authors.
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

#ifndef DENSESTEREO_KEYVALUE_H_
#define DENSESTEREO_KEYVALUE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace densestereo {

// Flat "key = value" text, one entry per line, '#' starts a comment. List
// values are whitespace separated. Doubles are written in shortest
// round-trip form so parse(format(x)) == x bit for bit.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::string& path);
  void save(const std::string& path) const;
  std::string format() const;

  bool has(std::string_view key) const;
  std::vector<std::string> keys() const;

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  long get_int(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  std::optional<std::string> find(std::string_view key) const;

  void set(std::string_view key, std::string value);
  void set_double(std::string_view key, double value);
  void set_int(std::string_view key, long value);
  void set_doubles(std::string_view key, std::span<const double> values);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest string that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace densestereo

#endif  // DENSESTEREO_KEYVALUE_H_
