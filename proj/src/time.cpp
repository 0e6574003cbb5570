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
#include "cyclotrack/time.hpp"

#include <cctype>
#include <cstdio>

#include "cyclotrack/error.hpp"

namespace cyclotrack {
namespace {

bool ReadDigits(std::string_view text, std::size_t pos, std::size_t count,
                int* out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    value = value * 10 + (text[i] - '0');
  }
  *out = value;
  return true;
}

[[noreturn]] void Fail(std::string_view text) {
  throw FormatError("invalid ISO-8601 UTC timestamp: '" + std::string(text) +
                    "'");
}

}  // namespace

Instant parse_iso8601(std::string_view text) {
  int y, mo, d, h, mi, s = 0;
  if (!ReadDigits(text, 0, 4, &y) || text.size() < 17 || text[4] != '-' ||
      !ReadDigits(text, 5, 2, &mo) || text[7] != '-' ||
      !ReadDigits(text, 8, 2, &d) || text[10] != 'T' ||
      !ReadDigits(text, 11, 2, &h) || text[13] != ':' ||
      !ReadDigits(text, 14, 2, &mi)) {
    Fail(text);
  }
  std::size_t pos = 16;
  if (text[pos] == ':') {
    if (!ReadDigits(text, pos + 1, 2, &s)) Fail(text);
    pos += 3;
  }
  if (pos + 1 != text.size() || text[pos] != 'Z') Fail(text);

  const std::chrono::year_month_day ymd{
      std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
      std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) Fail(text);
  return std::chrono::sys_days{ymd} + hours{h} + minutes{mi} +
         std::chrono::seconds{s};
}

namespace {

struct Fields {
  int y;
  unsigned mo, d;
  long h, mi, s;
};

Fields Split(Instant t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const long secs = (t - day).count();
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), secs / 3600, (secs / 60) % 60,
          secs % 60};
}

}  // namespace

std::string format_iso8601(Instant t) {
  const Fields f = Split(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", f.y,
                f.mo, f.d, f.h, f.mi, f.s);
  return buf;
}

std::string format_compact(Instant t) {
  const Fields f = Split(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d%02u%02uT%02ld%02ld%02ldZ", f.y, f.mo,
                f.d, f.h, f.mi, f.s);
  return buf;
}

}  // namespace cyclotrack
