/* Copyright 2026 The Cyclotrack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CYCLOTRACK_TIME_HPP_
#define CYCLOTRACK_TIME_HPP_

#include <chrono>
#include <string>
#include <string_view>

namespace cyclotrack {

// UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

using std::chrono::hours;
using std::chrono::minutes;

// Accepts "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DDTHH:MMZ". Throws FormatError.
Instant parse_iso8601(std::string_view text);

// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Instant t);

// Compact form used in artifact file names: "YYYYMMDDTHHMMSSZ".
std::string format_compact(Instant t);

inline double to_hours(Duration d) {
  return static_cast<double>(d.count()) / 3600.0;
}

}  // namespace cyclotrack

#endif  // CYCLOTRACK_TIME_HPP_
