#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evfuse/toymodel.hpp"

namespace evfuse {

/// 9 significant digits, used by every text report.
std::string format_report(double value);
/// 17 significant digits; round-trips exactly. Used for dataset export.
std::string format_exact(double value);

/// Parsed CSV: header names plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated, '.' decimal, header row first. `origin` prefixes error locations
/// as origin:line:column. Throws DataError on malformed input.
CsvTable read_csv(std::istream& in, const std::string& origin);
CsvTable read_csv_file(const std::filesystem::path& path);

/// One CSV file per view, each with feature columns plus an integer `label` column.
/// Rows are aligned across files by order. Conflict metadata is marked clean.
MultiViewDataset ingest_features(std::span<const std::filesystem::path> paths,
                                 std::size_t num_classes);

/// Writes view v to paths[v]: columns f0..f{d-1},label with exact doubles.
void export_dataset(const MultiViewDataset& data, std::span<const std::filesystem::path> paths);

/// sample,label,conflict_view,conflict_source
void export_conflict_metadata(const MultiViewDataset& data, const std::filesystem::path& path);

}  // namespace evfuse
