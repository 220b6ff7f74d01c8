#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evfuse/fusion.hpp"
#include "evfuse/loss.hpp"
#include "evfuse/mapping.hpp"
#include "evfuse/matrix.hpp"
#include "evfuse/opinion.hpp"

namespace evfuse {

// ---------------------------------------------------------------------------
// Synthetic two-view data

inline constexpr std::size_t kViewA = 0;
inline constexpr std::size_t kViewB = 1;
inline constexpr std::size_t kRawViews = 2;
// Class means sit on the scaled standard simplex vertices: mean_c = kMeanScale * e_c.
inline constexpr double kMeanScale = 2.0;

struct SyntheticConfig {
  static constexpr std::size_t kClasses = stage::kFineCount;

  std::size_t n_features = 5;  // per view, >= kClasses
  std::size_t samples_per_class = 200;
  std::array<double, kRawViews> noise_sigma = {1.0, 1.0};
  // Fraction of samples with exactly one view drawn from a wrong class.
  double conflict_rate = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t total_samples() const { return samples_per_class * kClasses; }
};

/// Labeled samples with one feature matrix per view.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::vector<std::size_t> labels;
  // Per sample: index of the view resampled from a wrong class, or -1 when clean.
  std::vector<int> conflict_view;
  // Per sample: class the conflicting view was drawn from (the label when clean).
  std::vector<std::size_t> conflict_source;

  std::size_t size() const noexcept { return labels.size(); }
  bool is_conflicting(std::size_t i) const { return conflict_view[i] >= 0; }
  std::size_t conflict_count() const;

  // Throws DataError when views and labels disagree in length.
  void validate() const;
};

MultiViewDataset generate_dataset(const SyntheticConfig& cfg);

// ---------------------------------------------------------------------------
// Evidence heads

double softplus(double x);
double sigmoid(double x);

/// Linear map followed by softplus: e = softplus(W^T x + b).
class EvidenceHead {
 public:
  EvidenceHead() = default;
  EvidenceHead(std::size_t n_inputs, std::size_t n_classes);

  static EvidenceHead random(std::size_t n_inputs, std::size_t n_classes, std::mt19937_64& rng,
                             double scale);

  std::size_t n_inputs() const noexcept { return weights_.rows(); }
  std::size_t n_classes() const noexcept { return weights_.cols(); }

  // n_inputs x n_classes
  Matrix& weights() noexcept { return weights_; }
  const Matrix& weights() const noexcept { return weights_; }
  std::vector<double>& bias() noexcept { return bias_; }
  const std::vector<double>& bias() const noexcept { return bias_; }

  friend bool operator==(const EvidenceHead&, const EvidenceHead&) = default;

 private:
  Matrix weights_;
  std::vector<double> bias_;
};

Evidence forward(const EvidenceHead& head, std::span<const double> features);

// ---------------------------------------------------------------------------
// Four-head pipeline

// f1: view A at K = 5, f2: A|B at K = 5, f3: view B at K = 3, f4: A|B at K = 3.
enum class HeadInput { kViewA, kViewB, kConcat };
inline constexpr std::size_t kHeadCount = 4;
inline constexpr std::array<HeadInput, kHeadCount> kHeadInputs = {
    HeadInput::kViewA, HeadInput::kConcat, HeadInput::kViewB, HeadInput::kConcat};
inline constexpr std::array<std::size_t, kHeadCount> kHeadClasses = {
    stage::kFineCount, stage::kFineCount, stage::kCoarseCount, stage::kCoarseCount};
inline constexpr std::size_t kPairCount = kHeadCount * (kHeadCount - 1) / 2;

enum class Exec { kSerial, kParallel };

struct PipelineConfig {
  double learning_rate = 0.5;
  double momentum = 0.0;       // 0 or 0.9
  std::size_t epochs = 200;
  std::size_t batch_size = 0;  // 0 = full batch
  double init_scale = 0.01;
  FusionStrategy fusion = FusionStrategy::kCmam;
  MappingStrategy mapping = MappingStrategy::kUniform;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Pipeline {
  PipelineConfig config;
  std::array<EvidenceHead, kHeadCount> heads;
  MappingMatrix mapping = uniform_mapping();
};

Pipeline make_pipeline(const PipelineConfig& cfg, std::size_t features_a, std::size_t features_b);

/// Input matrix seen by head `h`.
Matrix head_inputs(const MultiViewDataset& data, std::size_t h);

/// Per-head label for a fine class (coarse heads collapse N1..N3).
std::size_t head_label(std::size_t h, std::size_t fine_class);

struct EpochLoss {
  std::size_t epoch = 0;
  std::array<LossReport, kHeadCount> views{};  // batch-mean per head
  double total = 0.0;
};

struct TrainResult {
  std::vector<EpochLoss> trace;
  bool monotone = true;  // loss trace non-increasing (reported only)
};

/// Gradient descent on the summed per-view losses. Deterministic for a fixed
/// config and dataset; Exec only changes how the batch kernels run.
TrainResult train(Pipeline& pipeline, const MultiViewDataset& data, Exec exec = Exec::kParallel);

struct Inference {
  std::vector<Opinion> views;  // one per head, all at K = 5
  Opinion joint = Opinion::vacuous(stage::kFineCount);
  std::size_t predicted = 0;
  std::array<double, kPairCount> pair_conflicts{};
  double mean_conflict = 0.0;
};

/// Per-view fine-grained evidence for one sample (coarse heads mapped through the pipeline mapping).
std::vector<Evidence> view_evidences(const Pipeline& pipeline, std::span<const double> view_a,
                                     std::span<const double> view_b);

Inference infer(const Pipeline& pipeline, std::span<const double> view_a,
                std::span<const double> view_b, FusionStrategy strategy);

std::vector<Inference> infer_batch(const Pipeline& pipeline, const MultiViewDataset& data,
                                   FusionStrategy strategy, Exec exec = Exec::kParallel);

// ---------------------------------------------------------------------------
// Persistence: versioned text format, doubles written with 17 significant digits.
//
//   evfuse-heads 1
//   mapping <strategy> <rows> <cols>
//   <rows lines of cols values>
//   head <index> <n_inputs> <n_classes>
//   <n_inputs lines of n_classes weights>
//   <one line of n_classes biases>
//   ... (4 heads)

void save_pipeline(std::ostream& out, const Pipeline& pipeline);
// Throws DataError on malformed input. The returned config is default-constructed
// apart from the mapping strategy.
Pipeline load_pipeline(std::istream& in);

}  // namespace evfuse
