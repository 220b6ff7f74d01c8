#include "evfuse/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

#include "evfuse/error.hpp"

namespace evfuse {
namespace {

std::string format_with(const char* spec, double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, spec, value);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_report(double value) { return format_with("%.9g", value); }

std::string format_exact(double value) { return format_with("%.17g", value); }

CsvTable read_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = strip(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(strip(f));
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto cell = strip(fields[c]);
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(row[c])) {
        throw DataError(origin + ":" + std::to_string(line_no) + ":" + std::to_string(c + 1) +
                        ": non-numeric cell '" + std::string(cell) + "' in column '" +
                        table.header[c] + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError(origin + ": missing header row");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in, path.string());
}

MultiViewDataset ingest_features(std::span<const std::filesystem::path> paths,
                                 std::size_t num_classes) {
  if (paths.empty()) throw DataError("ingest_features: no input files");
  MultiViewDataset data;
  for (std::size_t v = 0; v < paths.size(); ++v) {
    const CsvTable table = read_csv_file(paths[v]);
    const std::string origin = paths[v].string();
    std::size_t label_col = table.header.size();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == "label") label_col = c;
    }
    if (label_col == table.header.size()) {
      throw DataError(origin + ": missing 'label' column");
    }
    if (table.header.size() < 2) throw DataError(origin + ": no feature columns");

    if (v == 0) {
      data.labels.resize(table.rows.size());
    } else if (table.rows.size() != data.labels.size()) {
      throw DataError("row count mismatch: " + paths[0].string() + " has " +
                      std::to_string(data.labels.size()) + " rows, " + origin + " has " +
                      std::to_string(table.rows.size()) + " rows");
    }

    Matrix features(table.rows.size(), table.header.size() - 1);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double raw = table.rows[r][label_col];
      if (raw < 0.0 || raw != std::floor(raw) || raw >= static_cast<double>(num_classes)) {
        throw DataError(origin + ":" + std::to_string(r + 2) + ":" + std::to_string(label_col + 1) +
                        ": label " + format_report(raw) + " outside [0, " +
                        std::to_string(num_classes) + ")");
      }
      const auto label = static_cast<std::size_t>(raw);
      if (v == 0) {
        data.labels[r] = label;
      } else if (data.labels[r] != label) {
        throw DataError(origin + ":" + std::to_string(r + 2) + ": label " + std::to_string(label) +
                        " disagrees with " + paths[0].string() + " (" +
                        std::to_string(data.labels[r]) + ")");
      }
      std::size_t out_col = 0;
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != label_col) features(r, out_col++) = table.rows[r][c];
      }
    }
    data.views.push_back(std::move(features));
  }
  data.conflict_view.assign(data.labels.size(), -1);
  data.conflict_source = data.labels;
  return data;
}

void export_dataset(const MultiViewDataset& data, std::span<const std::filesystem::path> paths) {
  data.validate();
  if (paths.size() != data.views.size()) {
    throw DimensionError("export_dataset: " + std::to_string(data.views.size()) + " views but " +
                         std::to_string(paths.size()) + " paths");
  }
  for (std::size_t v = 0; v < paths.size(); ++v) {
    std::ofstream out = open_output(paths[v]);
    const Matrix& m = data.views[v];
    for (std::size_t c = 0; c < m.cols(); ++c) out << 'f' << c << ',';
    out << "label\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) out << format_exact(m(r, c)) << ',';
      out << data.labels[r] << '\n';
    }
  }
}

void export_conflict_metadata(const MultiViewDataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out = open_output(path);
  out << "sample,label,conflict_view,conflict_source\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i << ',' << data.labels[i] << ',' << data.conflict_view[i] << ','
        << data.conflict_source[i] << '\n';
  }
}

}  // namespace evfuse
