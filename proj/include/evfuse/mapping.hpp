#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "evfuse/opinion.hpp"

namespace evfuse {

// Fixed class orders used throughout: coarse (W, NREM, REM), fine (W, N1, N2, N3, REM).
namespace stage {
inline constexpr std::size_t kCoarseCount = 3;
inline constexpr std::size_t kFineCount = 5;

inline constexpr std::size_t kCoarseW = 0;
inline constexpr std::size_t kCoarseNrem = 1;
inline constexpr std::size_t kCoarseRem = 2;

inline constexpr std::size_t kFineW = 0;
inline constexpr std::size_t kFineN1 = 1;
inline constexpr std::size_t kFineN2 = 2;
inline constexpr std::size_t kFineN3 = 3;
inline constexpr std::size_t kFineRem = 4;

/// W -> W, N1/N2/N3 -> NREM, REM -> REM.
std::size_t coarse_of(std::size_t fine_class);
}  // namespace stage

enum class MappingStrategy { kUniform, kDataDriven };

std::string_view to_string(MappingStrategy s);
// Accepts "uniform" and "data_driven".
MappingStrategy parse_mapping_strategy(std::string_view name);

/// Row-stochastic coarse-to-fine redistribution matrix, stored row-major.
class MappingMatrix {
 public:
  // Throws DomainError unless every entry is finite, non-negative and every row sums to 1
  // within 1e-12.
  MappingMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries,
                MappingStrategy strategy);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  MappingStrategy strategy() const noexcept { return strategy_; }

  /// True for the 3x5 sleep layout: W and REM rows are unit rows, NREM spreads over N1..N3 only.
  bool has_sleep_structure() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
  MappingStrategy strategy_;
};

/// NREM evidence split evenly over N1, N2, N3.
MappingMatrix uniform_mapping();

/// NREM evidence split in proportion to the N1:N2:N3 training frequencies.
/// `fine_class_counts` holds one count per fine class. All-zero NREM counts fall
/// back to the uniform matrix and log a warning to stderr.
MappingMatrix data_driven_mapping(std::span<const double> fine_class_counts);

/// Row-vector product e * U; conserves total evidence.
Evidence map_evidence(const Evidence& coarse, const MappingMatrix& u);

}  // namespace evfuse
