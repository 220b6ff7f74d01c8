#include "evfuse/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "evfuse/error.hpp"

namespace evfuse {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': invalid value '" + std::string(value) +
                   "' (expected " + std::string(expected) + ")");
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a number");
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> parts;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) parts.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return parts;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"data.source", "synthetic", "synthetic | csv"},
      {"data.n_features", "5", "features per synthetic view (>= 5)"},
      {"data.samples_per_class", "200", "training samples per class (synthetic)"},
      {"data.test_samples_per_class", "200", "test samples per class (synthetic)"},
      {"data.noise_sigma", "1.0", "Gaussian noise for both views"},
      {"data.noise_sigma_a", "1.0", "Gaussian noise for view A"},
      {"data.noise_sigma_b", "1.0", "Gaussian noise for view B"},
      {"data.conflict_rate", "0.3", "fraction of samples with one view drawn from a wrong class"},
      {"data.train_a", "", "CSV features of view A, training split"},
      {"data.train_b", "", "CSV features of view B, training split"},
      {"data.test_a", "", "CSV features of view A, test split"},
      {"data.test_b", "", "CSV features of view B, test split"},
      {"pipeline.learning_rate", "0.5", "gradient descent step size"},
      {"pipeline.momentum", "0", "heavy-ball momentum in [0, 1)"},
      {"pipeline.epochs", "200", "training epochs"},
      {"pipeline.batch_size", "0", "mini-batch size, 0 = full batch"},
      {"pipeline.init_scale", "0.01", "std-dev of initial weights"},
      {"pipeline.fusion", "cmam", "default fusion strategy: cmam | average | harmonic"},
      {"mapping.strategy", "uniform", "coarse-to-fine mapping: uniform | data_driven"},
      {"experiment.seed", "1", "seed for data generation and initialisation"},
      {"experiment.strategies", "cmam,average,harmonic", "strategies evaluated on the same heads"},
      {"experiment.density_bins", "20", "bins of the uncertainty density histogram"},
      {"output.dir", "evfuse_out", "directory receiving the report files"},
      {"output.formats", "json,csv", "subset of json,csv"},
  };
  return keys;
}

std::string describe_config_keys() {
  std::ostringstream out;
  out << "Configuration keys (section.key = value):\n";
  for (const auto& k : config_keys()) {
    out << "  " << k.key << " = " << k.default_value << "\n      " << k.help << '\n';
  }
  return out.str();
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "data.source") {
    if (value == "synthetic") {
      source = DataSource::kSynthetic;
    } else if (value == "csv") {
      source = DataSource::kCsv;
    } else {
      bad_value(key, value, "synthetic or csv");
    }
  } else if (key == "data.n_features") {
    synthetic.n_features = parse_unsigned(key, value);
  } else if (key == "data.samples_per_class") {
    synthetic.samples_per_class = parse_unsigned(key, value);
  } else if (key == "data.test_samples_per_class") {
    test_samples_per_class = parse_unsigned(key, value);
  } else if (key == "data.noise_sigma") {
    const double s = parse_double(key, value);
    synthetic.noise_sigma = {s, s};
  } else if (key == "data.noise_sigma_a") {
    synthetic.noise_sigma[kViewA] = parse_double(key, value);
  } else if (key == "data.noise_sigma_b") {
    synthetic.noise_sigma[kViewB] = parse_double(key, value);
  } else if (key == "data.conflict_rate") {
    synthetic.conflict_rate = parse_double(key, value);
  } else if (key == "data.train_a") {
    train_a = std::string(value);
  } else if (key == "data.train_b") {
    train_b = std::string(value);
  } else if (key == "data.test_a") {
    test_a = std::string(value);
  } else if (key == "data.test_b") {
    test_b = std::string(value);
  } else if (key == "pipeline.learning_rate") {
    pipeline.learning_rate = parse_double(key, value);
  } else if (key == "pipeline.momentum") {
    pipeline.momentum = parse_double(key, value);
  } else if (key == "pipeline.epochs") {
    pipeline.epochs = parse_unsigned(key, value);
  } else if (key == "pipeline.batch_size") {
    pipeline.batch_size = parse_unsigned(key, value);
  } else if (key == "pipeline.init_scale") {
    pipeline.init_scale = parse_double(key, value);
  } else if (key == "pipeline.fusion") {
    pipeline.fusion = parse_fusion_strategy(value);
  } else if (key == "mapping.strategy") {
    pipeline.mapping = parse_mapping_strategy(value);
  } else if (key == "experiment.seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "experiment.strategies") {
    std::vector<FusionStrategy> parsed;
    for (auto name : split_list(value)) parsed.push_back(parse_fusion_strategy(name));
    if (parsed.empty()) bad_value(key, value, "at least one strategy");
    strategies = std::move(parsed);
  } else if (key == "experiment.density_bins") {
    density_bins = parse_unsigned(key, value);
    if (density_bins == 0) bad_value(key, value, "a positive bin count");
  } else if (key == "output.dir") {
    out_dir = std::string(value);
  } else if (key == "output.formats") {
    write_json = false;
    write_csv = false;
    for (auto fmt : split_list(value)) {
      if (fmt == "json") {
        write_json = true;
      } else if (fmt == "csv") {
        write_csv = true;
      } else {
        bad_value(key, value, "a list drawn from json,csv");
      }
    }
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::load(std::istream& in, std::string_view origin) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(std::string(origin) + ":" + std::to_string(line_no) +
                       ": expected 'section.key = value'");
    }
    try {
      set(trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const UsageError& err) {
      throw UsageError(std::string(origin) + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
}

void ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  load(in, path.string());
}

void ExperimentConfig::finalize() {
  synthetic.seed = train_seed();
  pipeline.seed = seed;
  synthetic.validate();
  pipeline.validate();
  if (source == DataSource::kCsv &&
      (train_a.empty() || train_b.empty() || test_a.empty() || test_b.empty())) {
    throw UsageError("data.source = csv requires data.train_a, data.train_b, data.test_a, data.test_b");
  }
}

}  // namespace evfuse
