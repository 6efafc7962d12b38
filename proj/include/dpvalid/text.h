// Copyright 2026 The dpvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPVALID_TEXT_H_
#define DPVALID_TEXT_H_

// Small string helpers shared by the CSV and report writers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dpvalid {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::string unquote(std::string_view s);
void strip_line_ending(std::string& line);

// Whole-token parses; throw std::invalid_argument on any trailing garbage.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

// Shortest representation that round-trips. Locale independent.
std::string format_double(double v);

}  // namespace dpvalid

#endif  // DPVALID_TEXT_H_
