#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evfuse/config.hpp"
#include "evfuse/csv_io.hpp"
#include "evfuse/error.hpp"
#include "evfuse/experiment.hpp"
#include "evfuse/fusion.hpp"
#include "evfuse/mapping.hpp"
#include "evfuse/metrics.hpp"

namespace fs = std::filesystem;
using namespace evfuse;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
};

ExperimentConfig build_config(const GlobalOptions& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg.load_file(g.config_path);
  for (const std::string& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  cfg.finalize();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> parse_vector(const std::string& text, const std::string& origin) {
  // Accept "1,2,3", "1 2 3" or "1;2;3" and reuse the CSV reader for number parsing.
  std::string row = text;
  for (char& c : row) {
    if (c == ' ' || c == ';') c = ',';
  }
  std::string header;
  std::size_t fields = 1;
  for (char c : row) fields += c == ',';
  for (std::size_t i = 0; i < fields; ++i) header += (i ? ",e" : "e") + std::to_string(i);
  std::istringstream csv(header + "\n" + row + "\n");
  const CsvTable t = read_csv(csv, origin);
  if (t.rows.size() != 1) throw DataError(origin + ": expected one evidence vector");
  return t.rows[0];
}

void print_opinion(const char* label, const Opinion& o) {
  std::cout << label << " belief";
  for (double b : o.belief()) std::cout << ' ' << format_report(b);
  std::cout << "  u " << format_report(o.uncertainty()) << '\n';
}

int cmd_gen(const ExperimentConfig& cfg) {
  if (cfg.source != DataSource::kSynthetic) throw UsageError("gen requires data.source = synthetic");
  const DatasetPair data = load_datasets(cfg);
  ensure_dir(cfg.out_dir);
  const std::vector<fs::path> train = {cfg.out_dir / "train_a.csv", cfg.out_dir / "train_b.csv"};
  const std::vector<fs::path> test = {cfg.out_dir / "test_a.csv", cfg.out_dir / "test_b.csv"};
  export_dataset(data.train, train);
  export_dataset(data.test, test);
  export_conflict_metadata(data.train, cfg.out_dir / "train_conflicts.csv");
  export_conflict_metadata(data.test, cfg.out_dir / "test_conflicts.csv");
  std::cout << "wrote " << data.train.size() << " training and " << data.test.size()
            << " test samples to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  const DatasetPair data = load_datasets(cfg);
  ensure_dir(cfg.out_dir);
  Pipeline p = make_pipeline(cfg.pipeline, data.train.views[kViewA].cols(),
                             data.train.views[kViewB].cols());
  const TrainResult r = train(p, data.train);
  write_heads(cfg.out_dir / "heads.txt", p);
  write_loss_trace(cfg.out_dir / "loss_trace.csv", r);
  std::cout << "epochs " << r.trace.size() << "  final loss " << format_report(r.trace.back().total)
            << "  monotone " << (r.monotone ? "yes" : "no") << '\n'
            << "wrote " << (cfg.out_dir / "heads.txt").string() << '\n';
  return 0;
}

void print_summary(const ExperimentResult& r) {
  std::printf("%-10s %10s %10s %12s\n", "strategy", "acc", "mf1", "mean_u");
  for (const StrategyEvaluation& ev : r.evaluations) {
    std::printf("%-10s %10s %10s %12s\n", std::string(to_string(ev.strategy)).c_str(),
                format_report(ev.metrics.accuracy).c_str(), format_report(ev.metrics.macro_f1).c_str(),
                format_report(ev.mean_uncertainty).c_str());
  }
  std::printf("mean pairwise conflict %s\n", format_report(r.conflict.mean).c_str());
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& heads) {
  const fs::path path = heads.empty() ? cfg.out_dir / "heads.txt" : fs::path(heads);
  const ExperimentResult r = run_evaluation(cfg, read_heads(path));
  print_summary(r);
  return 0;
}

int cmd_report(const ExperimentConfig& cfg) {
  const ExperimentResult r = run_experiment(cfg);
  print_summary(r);
  std::cout << "wrote " << r.files.size() << " files to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_fuse(const std::vector<std::string>& inline_vectors, const std::string& file,
             const std::string& strategy_name, bool map_coarse) {
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < inline_vectors.size(); ++i) {
    raw.push_back(parse_vector(inline_vectors[i], "--evidence #" + std::to_string(i + 1)));
  }
  if (!file.empty()) {
    const CsvTable t = read_csv_file(file);
    for (const auto& row : t.rows) raw.push_back(row);
  }
  if (raw.empty()) throw UsageError("fuse: give evidence vectors with --evidence or --file");

  const MappingMatrix u = uniform_mapping();
  std::vector<Evidence> evidences;
  for (auto& v : raw) {
    Evidence e(std::move(v));
    if (map_coarse && e.size() == stage::kCoarseCount) e = map_evidence(e, u);
    evidences.push_back(std::move(e));
  }
  const FusionStrategy strategy = parse_fusion_strategy(strategy_name);
  std::vector<Opinion> opinions;
  for (const Evidence& e : evidences) opinions.push_back(evidence_to_opinion(e));
  for (std::size_t i = 0; i < opinions.size(); ++i) {
    print_opinion(("view " + std::to_string(i + 1) + " ").c_str(), opinions[i]);
  }
  for (std::size_t a = 0; a < opinions.size(); ++a) {
    for (std::size_t b = a + 1; b < opinions.size(); ++b) {
      std::cout << "conflict " << a + 1 << '-' << b + 1 << ' '
                << format_report(conflict_degree(opinions[a], opinions[b]).value) << '\n';
    }
  }
  const Opinion joint = fuse(strategy, evidences);
  print_opinion(("joint (" + std::string(to_string(strategy)) + ")").c_str(), joint);
  std::cout << "predicted class " << predicted_class(joint) << '\n';
  if (strategy != FusionStrategy::kAverageEvidence && opinions.size() > 2) {
    // The pairwise rule is not associative; show how much the fold order matters.
    const std::vector<Opinion> reversed(opinions.rbegin(), opinions.rend());
    const Opinion rev = strategy == FusionStrategy::kCmam ? cmam_fuse_many(reversed)
                                                          : harmonic_fuse_many(reversed);
    print_opinion("reverse-order fold", rev);
  }
  return 0;
}

int cmd_density(const std::string& input, const std::string& column, std::size_t bins,
                const std::string& output) {
  const CsvTable t = read_csv_file(input);
  std::size_t col = t.header.size();
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == column) col = c;
  }
  if (col == t.header.size()) throw DataError(input + ": no column '" + column + "'");
  std::vector<double> values;
  values.reserve(t.rows.size());
  for (const auto& row : t.rows) values.push_back(row[col]);
  const auto rows = uncertainty_density(values, bins);
  if (output.empty()) {
    std::cout << "bin_center,density\n";
    for (const DensityRow& r : rows) {
      std::cout << format_report(r.bin_center) << ',' << format_report(r.density) << '\n';
    }
  } else {
    write_density_csv(output, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential multi-view fusion: synthetic data, training, evaluation and reports."};
  app.require_subcommand(1);
  app.footer(describe_config_keys());

  GlobalOptions g;
  app.add_option("--config", g.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "overrides experiment.seed");
  app.add_option("--out", g.out_dir, "overrides output.dir");
  app.add_option("--set", g.overrides, "key=value config override (repeatable)");

  auto* gen = app.add_subcommand("gen", "write a synthetic train/test dataset as CSV");
  auto* trn = app.add_subcommand("train", "train the four evidence heads, write heads.txt");
  auto* evl = app.add_subcommand("eval", "evaluate saved heads with every configured strategy");
  std::string heads;
  evl->add_option("--heads", heads, "heads file (default <out>/heads.txt)");
  auto* rep = app.add_subcommand("report", "train, evaluate and write the full report bundle");

  auto* fus = app.add_subcommand("fuse", "fuse evidence vectors given inline or from a CSV file");
  std::vector<std::string> vectors;
  std::string fuse_file, strategy = "cmam";
  bool map_coarse = false;
  fus->add_option("-e,--evidence", vectors, "comma-separated evidence vector (repeatable)");
  fus->add_option("-f,--file", fuse_file, "CSV file, one evidence vector per row after a header")
      ->check(CLI::ExistingFile);
  fus->add_option("-s,--strategy", strategy, "cmam | average | harmonic");
  fus->add_flag("--map", map_coarse, "map 3-class (W, NREM, REM) vectors onto 5 classes");

  auto* den = app.add_subcommand("density", "histogram of a column of uncertainties");
  std::string den_input, den_column = "u_cmam", den_output;
  std::size_t bins = 20;
  den->add_option("input", den_input, "CSV file, e.g. predictions.csv")->required();
  den->add_option("-c,--column", den_column, "column holding values in [0, 1]");
  den->add_option("-b,--bins", bins, "number of bins")->check(CLI::PositiveNumber);
  den->add_option("-o,--output", den_output, "write CSV here instead of stdout");

  for (auto* sub : {gen, trn, evl, rep, fus, den}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (fus->parsed()) return cmd_fuse(vectors, fuse_file, strategy, map_coarse);
    if (den->parsed()) return cmd_density(den_input, den_column, bins, den_output);
    const ExperimentConfig cfg = build_config(g);
    if (gen->parsed()) return cmd_gen(cfg);
    if (trn->parsed()) return cmd_train(cfg);
    if (evl->parsed()) return cmd_eval(cfg, heads);
    return cmd_report(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
}
