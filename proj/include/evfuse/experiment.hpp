#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evfuse/config.hpp"
#include "evfuse/fusion.hpp"
#include "evfuse/metrics.hpp"
#include "evfuse/toymodel.hpp"

namespace evfuse {

struct DatasetPair {
  MultiViewDataset train;
  MultiViewDataset test;
};

/// Synthetic splits from the derived seeds, or the four configured CSV files.
DatasetPair load_datasets(const ExperimentConfig& cfg);

struct StrategyEvaluation {
  FusionStrategy strategy = FusionStrategy::kCmam;
  MetricsReport metrics;
  std::vector<Inference> inferences;
  double mean_uncertainty = 0.0;
  double mean_uncertainty_clean = 0.0;
  double mean_uncertainty_injected = 0.0;  // 0 when the split has no injected conflicts
};

StrategyEvaluation evaluate(const Pipeline& pipeline, const MultiViewDataset& data,
                            FusionStrategy strategy);

struct ExperimentResult {
  Pipeline pipeline;
  TrainResult training;
  std::vector<StrategyEvaluation> evaluations;
  ConflictStats conflict;
  std::vector<std::filesystem::path> files;  // written, in creation order
};

/// Trains once, evaluates every configured strategy on the same heads and writes
/// the report bundle into cfg.out_dir. Outputs depend only on the config.
///
/// Files: heads.txt, loss_trace.csv, metrics.json, summary.csv, conflict_stats.csv,
/// predictions.csv, confusion_<strategy>.csv, uncertainty_density_<strategy>.csv.
/// With output.formats lacking json or csv the corresponding files are skipped.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Evaluation-only variant: reuses a trained pipeline (e.g. loaded from heads.txt).
ExperimentResult run_evaluation(const ExperimentConfig& cfg, Pipeline pipeline);

// Individual report writers, shared with the command line tool.
void write_loss_trace(const std::filesystem::path& path, const TrainResult& training);
void write_heads(const std::filesystem::path& path, const Pipeline& pipeline);
Pipeline read_heads(const std::filesystem::path& path);
void write_metrics_json(const std::filesystem::path& path,
                        const std::vector<StrategyEvaluation>& evaluations);
void write_density_csv(const std::filesystem::path& path, const std::vector<DensityRow>& rows);

}  // namespace evfuse
