#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "evfuse/fusion.hpp"
#include "evfuse/toymodel.hpp"

namespace evfuse {

enum class DataSource { kSynthetic, kCsv };

/// Everything a run needs, parsed from a flat `section.key = value` file.
struct ExperimentConfig {
  DataSource source = DataSource::kSynthetic;
  SyntheticConfig synthetic;
  std::size_t test_samples_per_class = 200;
  // CSV sources: one file per view for each split.
  std::filesystem::path train_a, train_b, test_a, test_b;

  PipelineConfig pipeline;

  std::uint64_t seed = 1;
  std::vector<FusionStrategy> strategies = {FusionStrategy::kCmam,
                                            FusionStrategy::kAverageEvidence,
                                            FusionStrategy::kHarmonicReference};
  std::size_t density_bins = 20;

  std::filesystem::path out_dir = "evfuse_out";
  bool write_json = true;
  bool write_csv = true;

  /// Applies one `key = value` setting. Throws UsageError naming unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Reads `section.key = value` lines; `#` starts a comment, blank lines are skipped.
  void load(std::istream& in, std::string_view origin = "config");
  void load_file(const std::filesystem::path& path);

  /// Pushes the shared seed into the data and pipeline configs; call after all settings.
  void finalize();

  // Seeds derived from `seed` for the two synthetic splits.
  std::uint64_t train_seed() const { return seed; }
  std::uint64_t test_seed() const { return seed + 0x632be59bd9b4e019ULL; }
};

struct ConfigKey {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

/// All accepted keys with defaults, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Human-readable key listing used by `--help`.
std::string describe_config_keys();

}  // namespace evfuse
