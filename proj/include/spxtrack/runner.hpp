#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spxtrack/tracking.hpp"

namespace spxtrack {

enum class IntegrationKind { direct, sequential, multistep };

/// One tracking run as described by a flat key = value config file.
struct RunConfig {
  std::filesystem::path sequence_dir;
  std::string pattern;  // optional printf-style filename pattern
  int ref_index = 0;
  std::optional<std::filesystem::path> gt_dir;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> cache_dir;
  IntegrationKind integration = IntegrationKind::multistep;
  std::optional<Direction> direction;  // defaulted per integration when absent
  TrackerConfig tracker;
};

/// Parse a config file; unknown keys and malformed values raise
/// ConfigError naming the key. The seed key is mandatory.
RunConfig parse_run_config(const std::filesystem::path& path);

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

/// Ordered frame files of a sequence directory, either every supported
/// image sorted by name or the expansions of a printf-style pattern.
std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir,
                                                       const std::string& pattern);

/// Mask-painting direction after the per-integration default is applied.
Direction resolved_direction(const RunConfig& cfg);

/// Cache directory after precedence: SPXTRACK_CACHE env, cache_dir key,
/// output_dir/fields.
std::filesystem::path resolved_cache_dir(const RunConfig& cfg);

void stage_segment(const RunConfig& cfg);
void stage_fields(const RunConfig& cfg);
void stage_track(const RunConfig& cfg);
void stage_all(const RunConfig& cfg);

/// Score estimated masks against ground truth; emits the report CSV and
/// prints the aggregate row. Consistency columns are filled when
/// fields_dir (a track output directory) is given.
void stage_eval(const std::filesystem::path& masks_dir, const std::filesystem::path& gt_dir,
                const std::optional<std::filesystem::path>& fields_dir,
                const std::filesystem::path& report_path);

/// Exit-code wrappers: 0 success, 2 config error, 3 data error,
/// 1 internal failure; one-line diagnostics go to stderr.
int run_track(const std::filesystem::path& config_path, const CliOverrides& overrides,
              const std::string& stage);
int run_eval(const std::filesystem::path& masks_dir, const std::filesystem::path& gt_dir,
             const std::optional<std::filesystem::path>& fields_dir,
             const std::filesystem::path& report_path);

}  // namespace spxtrack
