#include "evfuse/mapping.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

#include "evfuse/error.hpp"

namespace evfuse {

std::size_t stage::coarse_of(std::size_t fine_class) {
  switch (fine_class) {
    case kFineW:
      return kCoarseW;
    case kFineN1:
    case kFineN2:
    case kFineN3:
      return kCoarseNrem;
    case kFineRem:
      return kCoarseRem;
    default:
      throw DomainError("coarse_of: fine class " + std::to_string(fine_class) + " out of range");
  }
}

std::string_view to_string(MappingStrategy s) {
  return s == MappingStrategy::kUniform ? "uniform" : "data_driven";
}

MappingStrategy parse_mapping_strategy(std::string_view name) {
  if (name == "uniform") return MappingStrategy::kUniform;
  if (name == "data_driven") return MappingStrategy::kDataDriven;
  throw UsageError("unknown mapping strategy '" + std::string(name) +
                   "' (expected uniform or data_driven)");
}

MappingMatrix::MappingMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries,
                             MappingStrategy strategy)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), strategy_(strategy) {
  if (rows_ == 0 || cols_ == 0 || entries_.size() != rows_ * cols_) {
    throw DimensionError("MappingMatrix: entry count does not match the stated shape");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      const double v = (*this)(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("MappingMatrix: entries must be finite and non-negative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "MappingMatrix: row " << r << " sums to " << sum << ", expected 1";
      throw DomainError(msg.str());
    }
  }
}

bool MappingMatrix::has_sleep_structure() const {
  using namespace stage;
  if (rows_ != kCoarseCount || cols_ != kFineCount) return false;
  for (std::size_t c = 0; c < cols_; ++c) {
    if ((*this)(kCoarseW, c) != (c == kFineW ? 1.0 : 0.0)) return false;
    if ((*this)(kCoarseRem, c) != (c == kFineRem ? 1.0 : 0.0)) return false;
    const bool nrem_column = c == kFineN1 || c == kFineN2 || c == kFineN3;
    if (!nrem_column && (*this)(kCoarseNrem, c) != 0.0) return false;
  }
  return true;
}

namespace {

MappingMatrix sleep_matrix(double n1, double n2, double n3, MappingStrategy strategy) {
  // clang-format off
  std::vector<double> entries = {
      1.0, 0.0, 0.0, 0.0, 0.0,
      0.0, n1,  n2,  n3,  0.0,
      0.0, 0.0, 0.0, 0.0, 1.0,
  };
  // clang-format on
  return MappingMatrix(stage::kCoarseCount, stage::kFineCount, std::move(entries), strategy);
}

}  // namespace

MappingMatrix uniform_mapping() {
  constexpr double third = 1.0 / 3.0;
  return sleep_matrix(third, third, third, MappingStrategy::kUniform);
}

MappingMatrix data_driven_mapping(std::span<const double> fine_class_counts) {
  using namespace stage;
  if (fine_class_counts.size() != kFineCount) {
    throw DimensionError("data_driven_mapping: expected " + std::to_string(kFineCount) +
                         " class counts, got " + std::to_string(fine_class_counts.size()));
  }
  for (double c : fine_class_counts) {
    if (!std::isfinite(c) || c < 0.0) {
      throw DomainError("data_driven_mapping: class counts must be finite and non-negative");
    }
  }
  const double n1 = fine_class_counts[kFineN1];
  const double n2 = fine_class_counts[kFineN2];
  const double n3 = fine_class_counts[kFineN3];
  const double total = n1 + n2 + n3;
  if (total <= 0.0) {
    std::cerr << "warning: data_driven_mapping: no N1/N2/N3 samples, using uniform mapping\n";
    return uniform_mapping();
  }
  return sleep_matrix(n1 / total, n2 / total, n3 / total, MappingStrategy::kDataDriven);
}

Evidence map_evidence(const Evidence& coarse, const MappingMatrix& u) {
  if (coarse.size() != u.rows()) {
    std::ostringstream msg;
    msg << "map_evidence: evidence has " << coarse.size() << " classes, mapping expects "
        << u.rows();
    throw DimensionError(msg.str());
  }
  std::vector<double> fine(u.cols(), 0.0);
  for (std::size_t c = 0; c < u.cols(); ++c) {
    for (std::size_t r = 0; r < u.rows(); ++r) fine[c] += coarse[r] * u(r, c);
  }
  return Evidence(std::move(fine));
}

}  // namespace evfuse
