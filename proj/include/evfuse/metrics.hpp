#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace evfuse {

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  // confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  // Classes that occur in neither predictions nor labels; their F1 is 0.
  std::vector<bool> absent;
  std::size_t n_samples = 0;
};

/// Accuracy, one-vs-rest F1 per class and their unweighted mean.
/// Throws DimensionError on empty or misaligned input and DataError on class ids >= num_classes.
MetricsReport compute_metrics(std::span<const std::size_t> predictions,
                              std::span<const std::size_t> labels, std::size_t num_classes);

// Conflict buckets: [0, 0.3), [0.3, 0.6), [0.6, 1].
inline constexpr std::size_t kConflictBuckets = 3;
inline constexpr std::array<double, kConflictBuckets + 1> kConflictEdges = {0.0, 0.3, 0.6, 1.0};

std::size_t conflict_bucket(double conflict);

struct ConflictStats {
  std::size_t total = 0;
  std::array<std::size_t, kConflictBuckets> counts{};
  std::array<double, kConflictBuckets> percent{};
  double mean = 0.0;
  // [bucket][0 = clean, 1 = injected]
  std::array<std::array<std::size_t, 2>, kConflictBuckets> by_flag{};
};

/// Bucketed distribution of per-sample conflict degrees, cross-tabulated against
/// the injected-conflict flag. `injected` may be empty when flags are unknown.
ConflictStats conflict_statistics(std::span<const double> conflicts,
                                  const std::vector<bool>& injected);

struct DensityRow {
  double bin_center = 0.0;
  double density = 0.0;
};

/// Normalized histogram over n_bins equal-width bins of [0, 1]; 1.0 falls in the last bin.
/// Throws DomainError for values outside [0, 1], empty input or n_bins == 0.
std::vector<DensityRow> uncertainty_density(std::span<const double> values, std::size_t n_bins);

}  // namespace evfuse
