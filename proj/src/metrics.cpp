#include "evfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evfuse/error.hpp"

namespace evfuse {

MetricsReport compute_metrics(std::span<const std::size_t> predictions,
                              std::span<const std::size_t> labels, std::size_t num_classes) {
  if (predictions.empty()) throw DimensionError("compute_metrics: empty input");
  if (predictions.size() != labels.size()) {
    throw DimensionError("compute_metrics: " + std::to_string(predictions.size()) +
                         " predictions but " + std::to_string(labels.size()) + " labels");
  }
  if (num_classes == 0) throw DimensionError("compute_metrics: num_classes must be > 0");

  MetricsReport r;
  r.n_samples = labels.size();
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes || predictions[i] >= num_classes) {
      throw DataError("compute_metrics: class id out of range at sample " + std::to_string(i));
    }
    ++r.confusion[labels[i]][predictions[i]];
  }

  std::size_t correct = 0;
  r.per_class_f1.assign(num_classes, 0.0);
  r.absent.assign(num_classes, false);
  for (std::size_t k = 0; k < num_classes; ++k) {
    const std::size_t tp = r.confusion[k][k];
    std::size_t support = 0;    // tp + fn
    std::size_t predicted = 0;  // tp + fp
    for (std::size_t j = 0; j < num_classes; ++j) {
      support += r.confusion[k][j];
      predicted += r.confusion[j][k];
    }
    correct += tp;
    if (support == 0 && predicted == 0) {
      r.absent[k] = true;
      continue;
    }
    if (tp == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    const double recall = static_cast<double>(tp) / static_cast<double>(support);
    r.per_class_f1[k] = 2.0 * precision * recall / (precision + recall);
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  double f1_sum = 0.0;
  for (double f : r.per_class_f1) f1_sum += f;
  r.macro_f1 = f1_sum / static_cast<double>(num_classes);
  return r;
}

std::size_t conflict_bucket(double conflict) {
  if (conflict < kConflictEdges[1]) return 0;
  if (conflict < kConflictEdges[2]) return 1;
  return 2;
}

ConflictStats conflict_statistics(std::span<const double> conflicts,
                                  const std::vector<bool>& injected) {
  if (!injected.empty() && injected.size() != conflicts.size()) {
    throw DimensionError("conflict_statistics: " + std::to_string(conflicts.size()) +
                         " conflict values but " + std::to_string(injected.size()) + " flags");
  }
  ConflictStats s;
  s.total = conflicts.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    const std::size_t b = conflict_bucket(conflicts[i]);
    ++s.counts[b];
    if (!injected.empty()) ++s.by_flag[b][injected[i] ? 1 : 0];
    sum += conflicts[i];
  }
  if (s.total > 0) {
    s.mean = sum / static_cast<double>(s.total);
    for (std::size_t b = 0; b < kConflictBuckets; ++b) {
      s.percent[b] = 100.0 * static_cast<double>(s.counts[b]) / static_cast<double>(s.total);
    }
  }
  return s;
}

std::vector<DensityRow> uncertainty_density(std::span<const double> values, std::size_t n_bins) {
  if (n_bins == 0) throw DomainError("uncertainty_density: n_bins must be > 0");
  if (values.empty()) throw DomainError("uncertainty_density: no values");
  std::vector<std::size_t> counts(n_bins, 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("uncertainty_density: value " + std::to_string(v) + " outside [0, 1]");
    }
    const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(v * static_cast<double>(n_bins)));
    ++counts[bin];
  }
  const double width = 1.0 / static_cast<double>(n_bins);
  const double norm = 1.0 / (static_cast<double>(values.size()) * width);
  std::vector<DensityRow> rows(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    rows[b].bin_center = (static_cast<double>(b) + 0.5) * width;
    rows[b].density = static_cast<double>(counts[b]) * norm;
  }
  return rows;
}

}  // namespace evfuse
