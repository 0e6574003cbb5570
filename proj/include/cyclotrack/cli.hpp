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
#ifndef CYCLOTRACK_CLI_HPP_
#define CYCLOTRACK_CLI_HPP_

// Pipeline commands behind the `cyclotrack` binary. Each command reads its
// inputs from the run configuration, writes artifacts below `out` and a
// run.json provenance record.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cyclotrack {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  std::filesystem::path out = "cyclotrack-out";
  // Defaults below `out` when unset.
  std::optional<std::filesystem::path> granule_dir;
  std::optional<std::filesystem::path> besttrack;
  std::optional<std::filesystem::path> manifest;

  std::string boxes = "custom";
  int nc_type = 1;
  long nc_count = 0;  // 0 keeps every eligible frame
  int interval_min = 180;
  int span_min = 360;
  int length = 3;

  std::string detector = "blob";
  // "coldcore" or a path to a .wb.json bundle.
  std::string intensity_backend = "coldcore";
  double conf = 0.25;
  double dup_px = 10.0;
  double bg_px = 100.0;
  std::string split = "all";  // all | train | val | test
  std::optional<std::string> event_id;
  int smoothing_window = 6;

  // synth
  int events = 2;
  double hours = 24.0;
  int cadence_min = 30;
  double pad_hours = 12.0;
  double noise_sd = 0.0;
  std::string grid = "nio";  // nio | AS | BOB
  std::string start = "2019-10-24T00:00:00Z";
  std::optional<double> peak_wind;
  std::optional<std::string> basin;

  // Throws ConfigError.
  void validate() const;

  std::filesystem::path granule_path() const;
  std::filesystem::path besttrack_path() const;
  std::filesystem::path manifest_path() const;
};

// Throws ConfigError on unknown keys, wrong types or schema mismatch.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical JSON of every field; the basis of the run.json config hash.
std::string config_to_json(const RunConfig& cfg);

void cmd_synth(const RunConfig& cfg, std::ostream& log);
void cmd_extract(const RunConfig& cfg, std::ostream& log);
void cmd_sample_nc(const RunConfig& cfg, std::ostream& log);
void cmd_label(const RunConfig& cfg, std::ostream& log);
void cmd_sequences(const RunConfig& cfg, std::ostream& log);
void cmd_detect(const RunConfig& cfg, std::ostream& log);
void cmd_eval_detect(const RunConfig& cfg, std::ostream& log);
void cmd_eval_intensity(const RunConfig& cfg, std::ostream& log);
void cmd_case_study(const RunConfig& cfg, std::ostream& log);

// Parses argv, runs one subcommand and maps failures to exit codes with a
// JSON error object on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cyclotrack

#endif  // CYCLOTRACK_CLI_HPP_
