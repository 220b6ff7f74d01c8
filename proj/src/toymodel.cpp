#include "evfuse/toymodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "evfuse/error.hpp"
#include "evfuse/kernels.hpp"

namespace evfuse {

// ---------------------------------------------------------------------------
// Synthetic data

void SyntheticConfig::validate() const {
  if (n_features < kClasses) {
    throw UsageError("synthetic data: n_features must be >= " + std::to_string(kClasses));
  }
  if (samples_per_class == 0) throw UsageError("synthetic data: samples_per_class must be > 0");
  for (double s : noise_sigma) {
    if (!std::isfinite(s) || s < 0.0) throw UsageError("synthetic data: noise_sigma must be >= 0");
  }
  if (!(conflict_rate >= 0.0 && conflict_rate <= 1.0)) {
    throw UsageError("synthetic data: conflict_rate must lie in [0, 1]");
  }
}

std::size_t MultiViewDataset::conflict_count() const {
  return static_cast<std::size_t>(
      std::count_if(conflict_view.begin(), conflict_view.end(), [](int v) { return v >= 0; }));
}

void MultiViewDataset::validate() const {
  const std::size_t n = labels.size();
  if (views.empty()) throw DataError("dataset has no views");
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].rows() != n) {
      throw DataError("dataset view " + std::to_string(v) + " has " +
                      std::to_string(views[v].rows()) + " rows, expected " + std::to_string(n));
    }
  }
  if (conflict_view.size() != n || conflict_source.size() != n) {
    throw DataError("dataset conflict metadata does not match sample count");
  }
}

MultiViewDataset generate_dataset(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.total_samples();
  std::mt19937_64 rng(cfg.seed);

  MultiViewDataset data;
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) data.labels[i] = i % SyntheticConfig::kClasses;
  std::shuffle(data.labels.begin(), data.labels.end(), rng);

  data.conflict_view.assign(n, -1);
  data.conflict_source = data.labels;
  // floor(rate * n); the epsilon keeps 0.3 * 1000 from rounding down to 299.
  const auto n_conflict =
      static_cast<std::size_t>(std::floor(cfg.conflict_rate * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> pick_view(0, static_cast<int>(kRawViews) - 1);
  std::uniform_int_distribution<std::size_t> pick_offset(1, SyntheticConfig::kClasses - 1);
  for (std::size_t c = 0; c < n_conflict; ++c) {
    const std::size_t i = order[c];
    data.conflict_view[i] = pick_view(rng);
    data.conflict_source[i] = (data.labels[i] + pick_offset(rng)) % SyntheticConfig::kClasses;
  }

  std::normal_distribution<double> unit_normal(0.0, 1.0);
  data.views.assign(kRawViews, Matrix(n, cfg.n_features));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < kRawViews; ++v) {
      const bool resampled = data.conflict_view[i] == static_cast<int>(v);
      const std::size_t cls = resampled ? data.conflict_source[i] : data.labels[i];
      auto row = data.views[v].row(i);
      for (std::size_t j = 0; j < cfg.n_features; ++j) {
        const double mean = j == cls ? kMeanScale : 0.0;
        row[j] = mean + cfg.noise_sigma[v] * unit_normal(rng);
      }
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Heads

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

EvidenceHead::EvidenceHead(std::size_t n_inputs, std::size_t n_classes)
    : weights_(n_inputs, n_classes), bias_(n_classes, 0.0) {}

EvidenceHead EvidenceHead::random(std::size_t n_inputs, std::size_t n_classes,
                                  std::mt19937_64& rng, double scale) {
  EvidenceHead head(n_inputs, n_classes);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& w : head.weights_.data()) w = scale * dist(rng);
  return head;
}

Evidence forward(const EvidenceHead& head, std::span<const double> features) {
  if (features.size() != head.n_inputs()) {
    throw DimensionError("forward: got " + std::to_string(features.size()) +
                         " features, head expects " + std::to_string(head.n_inputs()));
  }
  std::vector<double> e(head.n_classes());
  for (std::size_t k = 0; k < e.size(); ++k) {
    double z = head.bias()[k];
    for (std::size_t j = 0; j < features.size(); ++j) z += features[j] * head.weights()(j, k);
    e[k] = softplus(z);
  }
  return Evidence(std::move(e));
}

// ---------------------------------------------------------------------------
// Pipeline

void PipelineConfig::validate() const {
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw UsageError("pipeline: learning_rate must be >= 0");
  }
  if (!std::isfinite(momentum) || momentum < 0.0 || momentum >= 1.0) {
    throw UsageError("pipeline: momentum must lie in [0, 1)");
  }
  if (!std::isfinite(init_scale) || init_scale < 0.0) {
    throw UsageError("pipeline: init_scale must be >= 0");
  }
}

Pipeline make_pipeline(const PipelineConfig& cfg, std::size_t features_a, std::size_t features_b) {
  cfg.validate();
  Pipeline p;
  p.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    std::size_t inputs = features_a + features_b;
    if (kHeadInputs[h] == HeadInput::kViewA) inputs = features_a;
    if (kHeadInputs[h] == HeadInput::kViewB) inputs = features_b;
    p.heads[h] = EvidenceHead::random(inputs, kHeadClasses[h], rng, cfg.init_scale);
  }
  return p;
}

Matrix head_inputs(const MultiViewDataset& data, std::size_t h) {
  if (data.views.size() != kRawViews) {
    throw DataError("pipeline expects exactly " + std::to_string(kRawViews) + " views, got " +
                    std::to_string(data.views.size()));
  }
  switch (kHeadInputs[h]) {
    case HeadInput::kViewA:
      return data.views[kViewA];
    case HeadInput::kViewB:
      return data.views[kViewB];
    case HeadInput::kConcat:
      break;
  }
  return hconcat(data.views[kViewA], data.views[kViewB]);
}

std::size_t head_label(std::size_t h, std::size_t fine_class) {
  return kHeadClasses[h] == stage::kCoarseCount ? stage::coarse_of(fine_class) : fine_class;
}

namespace {

void check_pipeline_data(const Pipeline& pipeline, const MultiViewDataset& data) {
  data.validate();
  if (data.views.size() != kRawViews) {
    throw DataError("pipeline expects exactly 2 views, got " + std::to_string(data.views.size()));
  }
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    std::size_t inputs = data.views[kViewA].cols() + data.views[kViewB].cols();
    if (kHeadInputs[h] == HeadInput::kViewA) inputs = data.views[kViewA].cols();
    if (kHeadInputs[h] == HeadInput::kViewB) inputs = data.views[kViewB].cols();
    if (pipeline.heads[h].n_inputs() != inputs) {
      throw DimensionError("head f" + std::to_string(h + 1) + " expects " +
                           std::to_string(pipeline.heads[h].n_inputs()) + " inputs, data gives " +
                           std::to_string(inputs));
    }
  }
  for (std::size_t label : data.labels) {
    if (label >= stage::kFineCount) {
      throw DataError("label " + std::to_string(label) + " out of range for 5 classes");
    }
  }
}

struct HeadState {
  Matrix inputs;
  std::vector<std::size_t> labels;
  Matrix velocity_w;
  std::vector<double> velocity_b;
};

}  // namespace

TrainResult train(Pipeline& pipeline, const MultiViewDataset& data, Exec exec) {
  const PipelineConfig& cfg = pipeline.config;
  cfg.validate();
  check_pipeline_data(pipeline, data);
  const std::size_t n = data.size();
  if (n == 0) throw DataError("train: empty dataset");

  if (cfg.mapping == MappingStrategy::kDataDriven) {
    std::vector<double> counts(stage::kFineCount, 0.0);
    for (std::size_t label : data.labels) counts[label] += 1.0;
    pipeline.mapping = data_driven_mapping(counts);
  } else {
    pipeline.mapping = uniform_mapping();
  }

  const auto forward_fn = exec == Exec::kParallel ? kernels::omp::forward : kernels::serial::forward;
  const auto backward_fn =
      exec == Exec::kParallel ? kernels::omp::backward : kernels::serial::backward;
  const auto accumulate_fn =
      exec == Exec::kParallel ? kernels::omp::accumulate : kernels::serial::accumulate;

  std::array<HeadState, kHeadCount> state;
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    state[h].inputs = head_inputs(data, h);
    state[h].labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) state[h].labels[i] = head_label(h, data.labels[i]);
    state[h].velocity_w = Matrix(pipeline.heads[h].n_inputs(), pipeline.heads[h].n_classes());
    state[h].velocity_b.assign(pipeline.heads[h].n_classes(), 0.0);
  }

  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size > n) ? n : cfg.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  TrainResult result;
  result.trace.reserve(cfg.epochs);
  Matrix z, e, dz, dw;
  std::vector<double> db;
  std::vector<LossReport> per_sample;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLoss epoch_loss;
    epoch_loss.epoch = epoch;
    std::array<std::vector<LossReport>, kHeadCount> epoch_reports;

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      for (std::size_t h = 0; h < kHeadCount; ++h) {
        EvidenceHead& head = pipeline.heads[h];
        HeadState& st = state[h];
        const Matrix x = batch == n ? st.inputs : take_rows(st.inputs, rows);
        std::vector<std::size_t> labels(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = st.labels[rows[i]];

        per_sample.assign(rows.size(), LossReport{});
        try {
          forward_fn(x, head, z, e);
          backward_fn(z, e, labels, epoch, dz, per_sample);
        } catch (const DomainError& err) {
          throw NumericalError("train: epoch " + std::to_string(epoch) + ", head f" +
                               std::to_string(h + 1) + ": " + err.what());
        }
        dw.resize(head.n_inputs(), head.n_classes());
        db.assign(head.n_classes(), 0.0);
        accumulate_fn(x, dz, dw, db);

        auto w = head.weights().data();
        auto vw = st.velocity_w.data();
        const auto g = dw.data();
        for (std::size_t idx = 0; idx < w.size(); ++idx) {
          vw[idx] = cfg.momentum * vw[idx] - cfg.learning_rate * g[idx];
          w[idx] += vw[idx];
        }
        for (std::size_t k = 0; k < db.size(); ++k) {
          st.velocity_b[k] = cfg.momentum * st.velocity_b[k] - cfg.learning_rate * db[k];
          head.bias()[k] += st.velocity_b[k];
        }
        epoch_reports[h].insert(epoch_reports[h].end(), per_sample.begin(), per_sample.end());
      }
    }

    for (std::size_t h = 0; h < kHeadCount; ++h) {
      epoch_loss.views[h] = kernels::mean_report(epoch_reports[h]);
      epoch_loss.total += epoch_loss.views[h].total;
      if (!std::isfinite(epoch_loss.views[h].total)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at epoch " << epoch << " in head f" << (h + 1)
            << " (l_acc=" << epoch_loss.views[h].l_acc << ", l_kl=" << epoch_loss.views[h].l_kl
            << ")";
        throw NumericalError(msg.str());
      }
    }
    if (!result.trace.empty() && epoch_loss.total > result.trace.back().total) {
      result.monotone = false;
    }
    result.trace.push_back(epoch_loss);
  }
  return result;
}

std::vector<Evidence> view_evidences(const Pipeline& pipeline, std::span<const double> view_a,
                                     std::span<const double> view_b) {
  std::vector<double> concat(view_a.begin(), view_a.end());
  concat.insert(concat.end(), view_b.begin(), view_b.end());
  std::vector<Evidence> out;
  out.reserve(kHeadCount);
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    std::span<const double> x = concat;
    if (kHeadInputs[h] == HeadInput::kViewA) x = view_a;
    if (kHeadInputs[h] == HeadInput::kViewB) x = view_b;
    Evidence e = forward(pipeline.heads[h], x);
    if (e.size() == stage::kCoarseCount) e = map_evidence(e, pipeline.mapping);
    out.push_back(std::move(e));
  }
  return out;
}

Inference infer(const Pipeline& pipeline, std::span<const double> view_a,
                std::span<const double> view_b, FusionStrategy strategy) {
  const std::vector<Evidence> evidences = view_evidences(pipeline, view_a, view_b);
  Inference out;
  out.views.reserve(kHeadCount);
  for (const Evidence& e : evidences) out.views.push_back(evidence_to_opinion(e));
  // Fold order is the head order f1, f2, f3, f4.
  switch (strategy) {
    case FusionStrategy::kCmam:
      out.joint = cmam_fuse_many(out.views);
      break;
    case FusionStrategy::kHarmonicReference:
      out.joint = harmonic_fuse_many(out.views);
      break;
    case FusionStrategy::kAverageEvidence:
      out.joint = average_fuse(evidences);
      break;
  }
  out.predicted = predicted_class(out.joint);
  std::size_t pair = 0;
  double sum = 0.0;
  for (std::size_t a = 0; a < kHeadCount; ++a) {
    for (std::size_t b = a + 1; b < kHeadCount; ++b) {
      out.pair_conflicts[pair] = conflict_degree(out.views[a], out.views[b]).value;
      sum += out.pair_conflicts[pair];
      ++pair;
    }
  }
  out.mean_conflict = sum / static_cast<double>(kPairCount);
  return out;
}

std::vector<Inference> infer_batch(const Pipeline& pipeline, const MultiViewDataset& data,
                                   FusionStrategy strategy, Exec exec) {
  check_pipeline_data(pipeline, data);
  const std::size_t n = data.size();
  std::vector<Inference> out(n);
  const auto run = [&](std::size_t i) {
    out[i] = infer(pipeline, data.views[kViewA].row(i), data.views[kViewB].row(i), strategy);
  };
  if (exec == Exec::kSerial) {
    for (std::size_t i = 0; i < n; ++i) run(i);
    return out;
  }
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      run(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(evfuse_infer_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kMagic = "evfuse-heads";
constexpr int kFormatVersion = 1;

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << values[i];
  }
  out << '\n';
}

template <typename T>
T read_token(std::istream& in, const char* what) {
  T value;
  if (!(in >> value)) throw DataError(std::string("heads file: could not read ") + what);
  return value;
}

void expect_word(std::istream& in, const std::string& word) {
  const auto got = read_token<std::string>(in, word.c_str());
  if (got != word) throw DataError("heads file: expected '" + word + "', found '" + got + "'");
}

}  // namespace

void save_pipeline(std::ostream& out, const Pipeline& pipeline) {
  const auto old_precision = out.precision(17);
  out << kMagic << ' ' << kFormatVersion << '\n';
  const MappingMatrix& m = pipeline.mapping;
  out << "mapping " << to_string(m.strategy()) << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    write_values(out, row);
  }
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    const EvidenceHead& head = pipeline.heads[h];
    out << "head " << h << ' ' << head.n_inputs() << ' ' << head.n_classes() << '\n';
    for (std::size_t j = 0; j < head.n_inputs(); ++j) write_values(out, head.weights().row(j));
    write_values(out, head.bias());
  }
  out.precision(old_precision);
}

Pipeline load_pipeline(std::istream& in) {
  expect_word(in, kMagic);
  const int version = read_token<int>(in, "format version");
  if (version != kFormatVersion) {
    throw DataError("heads file: unsupported format version " + std::to_string(version));
  }
  Pipeline p;
  expect_word(in, "mapping");
  const MappingStrategy strategy = parse_mapping_strategy(read_token<std::string>(in, "mapping"));
  const auto rows = read_token<std::size_t>(in, "mapping rows");
  const auto cols = read_token<std::size_t>(in, "mapping cols");
  if (rows != stage::kCoarseCount || cols != stage::kFineCount) {
    throw DataError("heads file: mapping must be 3 x 5");
  }
  std::vector<double> entries(rows * cols);
  for (double& v : entries) v = read_token<double>(in, "mapping entry");
  try {
    p.mapping = MappingMatrix(rows, cols, std::move(entries), strategy);
  } catch (const DomainError& err) {
    throw DataError(std::string("heads file: ") + err.what());
  }
  p.config.mapping = strategy;

  for (std::size_t h = 0; h < kHeadCount; ++h) {
    expect_word(in, "head");
    if (read_token<std::size_t>(in, "head index") != h) {
      throw DataError("heads file: heads out of order");
    }
    const auto n_inputs = read_token<std::size_t>(in, "head inputs");
    const auto n_classes = read_token<std::size_t>(in, "head classes");
    if (n_classes != kHeadClasses[h] || n_inputs == 0) {
      throw DataError("heads file: head f" + std::to_string(h + 1) + " has wrong shape");
    }
    EvidenceHead head(n_inputs, n_classes);
    for (double& w : head.weights().data()) w = read_token<double>(in, "weight");
    for (double& b : head.bias()) b = read_token<double>(in, "bias");
    p.heads[h] = std::move(head);
  }
  return p;
}

}  // namespace evfuse
