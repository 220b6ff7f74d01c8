#include "evfuse/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

#include "evfuse/csv_io.hpp"
#include "evfuse/error.hpp"

namespace evfuse {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

// Value as printed with 9 significant digits, so JSON output matches the CSVs.
double rounded(double value) { return std::strtod(format_report(value).c_str(), nullptr); }

std::string strategy_file(const char* prefix, FusionStrategy s) {
  return std::string(prefix) + std::string(to_string(s)) + ".csv";
}

}  // namespace

DatasetPair load_datasets(const ExperimentConfig& cfg) {
  DatasetPair out;
  if (cfg.source == DataSource::kCsv) {
    const std::vector<std::filesystem::path> train = {cfg.train_a, cfg.train_b};
    const std::vector<std::filesystem::path> test = {cfg.test_a, cfg.test_b};
    out.train = ingest_features(train, stage::kFineCount);
    out.test = ingest_features(test, stage::kFineCount);
    return out;
  }
  SyntheticConfig train_cfg = cfg.synthetic;
  train_cfg.seed = cfg.train_seed();
  SyntheticConfig test_cfg = cfg.synthetic;
  test_cfg.seed = cfg.test_seed();
  test_cfg.samples_per_class = cfg.test_samples_per_class;
  out.train = generate_dataset(train_cfg);
  out.test = generate_dataset(test_cfg);
  return out;
}

StrategyEvaluation evaluate(const Pipeline& pipeline, const MultiViewDataset& data,
                            FusionStrategy strategy) {
  StrategyEvaluation ev;
  ev.strategy = strategy;
  ev.inferences = infer_batch(pipeline, data, strategy);
  std::vector<std::size_t> predictions(data.size());
  double sum = 0.0, sum_clean = 0.0, sum_injected = 0.0;
  std::size_t n_clean = 0, n_injected = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    predictions[i] = ev.inferences[i].predicted;
    const double u = ev.inferences[i].joint.uncertainty();
    sum += u;
    if (data.is_conflicting(i)) {
      sum_injected += u;
      ++n_injected;
    } else {
      sum_clean += u;
      ++n_clean;
    }
  }
  ev.metrics = compute_metrics(predictions, data.labels, stage::kFineCount);
  const auto mean = [](double s, std::size_t n) { return n ? s / static_cast<double>(n) : 0.0; };
  ev.mean_uncertainty = mean(sum, data.size());
  ev.mean_uncertainty_clean = mean(sum_clean, n_clean);
  ev.mean_uncertainty_injected = mean(sum_injected, n_injected);
  return ev;
}

void write_loss_trace(const std::filesystem::path& path, const TrainResult& training) {
  std::ofstream out = open_output(path);
  out << "epoch,lambda";
  for (std::size_t h = 0; h < kHeadCount; ++h) {
    out << ",f" << h + 1 << "_l_acc,f" << h + 1 << "_l_kl";
  }
  out << ",total\n";
  for (const EpochLoss& e : training.trace) {
    out << e.epoch << ',' << format_report(e.views[0].lambda_t);
    for (const LossReport& r : e.views) {
      out << ',' << format_report(r.l_acc) << ',' << format_report(r.l_kl);
    }
    out << ',' << format_report(e.total) << '\n';
  }
}

void write_heads(const std::filesystem::path& path, const Pipeline& pipeline) {
  std::ofstream out = open_output(path);
  save_pipeline(out, pipeline);
}

Pipeline read_heads(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_pipeline(in);
}

void write_metrics_json(const std::filesystem::path& path,
                        const std::vector<StrategyEvaluation>& evaluations) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const StrategyEvaluation& ev : evaluations) {
    nlohmann::ordered_json entry;
    entry["acc"] = rounded(ev.metrics.accuracy);
    entry["mf1"] = rounded(ev.metrics.macro_f1);
    auto f1 = nlohmann::ordered_json::array();
    for (double f : ev.metrics.per_class_f1) f1.push_back(rounded(f));
    entry["per_class_f1"] = std::move(f1);
    entry["n_samples"] = ev.metrics.n_samples;
    doc[std::string(to_string(ev.strategy))] = std::move(entry);
  }
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
}

void write_density_csv(const std::filesystem::path& path, const std::vector<DensityRow>& rows) {
  std::ofstream out = open_output(path);
  out << "bin_center,density\n";
  for (const DensityRow& r : rows) {
    out << format_report(r.bin_center) << ',' << format_report(r.density) << '\n';
  }
}

namespace {

void write_confusion(const std::filesystem::path& path, const MetricsReport& m) {
  std::ofstream out = open_output(path);
  out << "true\\pred";
  for (std::size_t k = 0; k < m.confusion.size(); ++k) out << ',' << k;
  out << '\n';
  for (std::size_t r = 0; r < m.confusion.size(); ++r) {
    out << r;
    for (std::size_t c : m.confusion[r]) out << ',' << c;
    out << '\n';
  }
}

void write_summary(const std::filesystem::path& path, const std::vector<StrategyEvaluation>& evs) {
  std::ofstream out = open_output(path);
  out << "strategy,acc,mf1,mean_uncertainty,mean_uncertainty_clean,mean_uncertainty_injected\n";
  for (const StrategyEvaluation& ev : evs) {
    out << to_string(ev.strategy) << ',' << format_report(ev.metrics.accuracy) << ','
        << format_report(ev.metrics.macro_f1) << ',' << format_report(ev.mean_uncertainty) << ','
        << format_report(ev.mean_uncertainty_clean) << ','
        << format_report(ev.mean_uncertainty_injected) << '\n';
  }
}

void write_conflict_stats(const std::filesystem::path& path, const ConflictStats& s) {
  static constexpr const char* kNames[kConflictBuckets] = {"low", "middle", "high"};
  std::ofstream out = open_output(path);
  out << "bucket,lower,upper,count,percent,clean,injected\n";
  for (std::size_t b = 0; b < kConflictBuckets; ++b) {
    out << kNames[b] << ',' << format_report(kConflictEdges[b]) << ','
        << format_report(kConflictEdges[b + 1]) << ',' << s.counts[b] << ','
        << format_report(s.percent[b]) << ',' << s.by_flag[b][0] << ',' << s.by_flag[b][1] << '\n';
  }
  out << "all,0,1," << s.total << ",100," << (s.by_flag[0][0] + s.by_flag[1][0] + s.by_flag[2][0])
      << ',' << (s.by_flag[0][1] + s.by_flag[1][1] + s.by_flag[2][1]) << '\n';
  out << "# mean_conflict," << format_report(s.mean) << '\n';
}

void write_predictions(const std::filesystem::path& path, const MultiViewDataset& data,
                       const std::vector<StrategyEvaluation>& evs) {
  std::ofstream out = open_output(path);
  out << "sample,label,injected,mean_conflict";
  for (const StrategyEvaluation& ev : evs) {
    out << ",pred_" << to_string(ev.strategy) << ",u_" << to_string(ev.strategy);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i << ',' << data.labels[i] << ',' << (data.is_conflicting(i) ? 1 : 0) << ','
        << format_report(evs.front().inferences[i].mean_conflict);
    for (const StrategyEvaluation& ev : evs) {
      out << ',' << ev.inferences[i].predicted << ','
          << format_report(ev.inferences[i].joint.uncertainty());
    }
    out << '\n';
  }
}

ExperimentResult evaluate_and_report(const ExperimentConfig& cfg, const MultiViewDataset& test,
                                     ExperimentResult result) {
  for (FusionStrategy s : cfg.strategies) result.evaluations.push_back(evaluate(result.pipeline, test, s));

  std::vector<double> conflicts(test.size());
  std::vector<bool> injected(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    conflicts[i] = result.evaluations.front().inferences[i].mean_conflict;
    injected[i] = test.is_conflicting(i);
  }
  result.conflict = conflict_statistics(conflicts, injected);

  const auto& dir = cfg.out_dir;
  auto record = [&](const std::filesystem::path& p) { result.files.push_back(p); };
  if (cfg.write_json) {
    write_metrics_json(dir / "metrics.json", result.evaluations);
    record(dir / "metrics.json");
  }
  if (cfg.write_csv) {
    write_summary(dir / "summary.csv", result.evaluations);
    record(dir / "summary.csv");
    write_conflict_stats(dir / "conflict_stats.csv", result.conflict);
    record(dir / "conflict_stats.csv");
    write_predictions(dir / "predictions.csv", test, result.evaluations);
    record(dir / "predictions.csv");
    for (const StrategyEvaluation& ev : result.evaluations) {
      const auto confusion = dir / strategy_file("confusion_", ev.strategy);
      write_confusion(confusion, ev.metrics);
      record(confusion);
      std::vector<double> u(ev.inferences.size());
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = ev.inferences[i].joint.uncertainty();
      const auto density = dir / strategy_file("uncertainty_density_", ev.strategy);
      write_density_csv(density, uncertainty_density(u, cfg.density_bins));
      record(density);
    }
  }
  return result;
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.strategies.empty()) throw UsageError("experiment.strategies is empty");
  const DatasetPair data = load_datasets(cfg);
  prepare_dir(cfg.out_dir);

  ExperimentResult result;
  result.pipeline = make_pipeline(cfg.pipeline, data.train.views[kViewA].cols(),
                                  data.train.views[kViewB].cols());
  result.training = train(result.pipeline, data.train);

  write_heads(cfg.out_dir / "heads.txt", result.pipeline);
  result.files.push_back(cfg.out_dir / "heads.txt");
  if (cfg.write_csv) {
    write_loss_trace(cfg.out_dir / "loss_trace.csv", result.training);
    result.files.push_back(cfg.out_dir / "loss_trace.csv");
  }
  return evaluate_and_report(cfg, data.test, std::move(result));
}

ExperimentResult run_evaluation(const ExperimentConfig& cfg, Pipeline pipeline) {
  if (cfg.strategies.empty()) throw UsageError("experiment.strategies is empty");
  const DatasetPair data = load_datasets(cfg);
  prepare_dir(cfg.out_dir);
  ExperimentResult result;
  result.pipeline = std::move(pipeline);
  return evaluate_and_report(cfg, data.test, std::move(result));
}

}  // namespace evfuse
