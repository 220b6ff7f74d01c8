#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evfuse/opinion.hpp"

namespace evfuse {

/// Degree of disagreement between two opinions, in [0, 1].
struct ConflictDegree {
  double value = 0.0;
};

enum class FusionStrategy {
  kCmam,               // conflict-aware aggregation
  kAverageEvidence,    // mean of evidence vectors, then one opinion
  kHarmonicReference,  // pairwise rule pinned at full conflict
};

std::string_view to_string(FusionStrategy s);
// Accepts "cmam", "average" / "average_evidence", "harmonic" / "harmonic_reference".
FusionStrategy parse_fusion_strategy(std::string_view name);

/// C = 1 - sum_k b^a_k b^b_k / (sum_i b^a_i * sum_j b^b_j).
///
/// Returns 0 when either opinion has no belief mass: a vacuous opinion asserts
/// nothing and is the neutral element of the pairwise rule. Clamped into [0, 1].
ConflictDegree conflict_degree(const Opinion& a, const Opinion& b);

/// Fused uncertainty for a given conflict level:
/// C * 2 u^a u^b / (u^a + u^b) + (1 - C) u^a u^b.
double fused_uncertainty(double ua, double ub, double conflict);

/// Pairwise rule evaluated at an externally supplied conflict level.
Opinion combine_at_conflict(const Opinion& a, const Opinion& b, ConflictDegree conflict);

/// Conflict-aware pairwise aggregation. Commutative; not associative.
Opinion cmam_fuse_pair(const Opinion& a, const Opinion& b);

/// Strict left fold ((M1 . M2) . M3) ... in the order given. Throws on an empty sequence.
Opinion cmam_fuse_many(std::span<const Opinion> opinions);

/// Pairwise rule with C fixed at 1 regardless of the beliefs; left fold for n > 2.
Opinion harmonic_fuse_many(std::span<const Opinion> opinions);

/// Elementwise mean of evidence vectors converted to a single opinion.
Opinion average_fuse(std::span<const Evidence> evidences);

/// Fuses same-granularity evidence vectors with the selected strategy.
Opinion fuse(FusionStrategy strategy, std::span<const Evidence> evidences);

/// argmax_k (b_k + u / K), lowest index on ties.
std::size_t predicted_class(const Opinion& o);

}  // namespace evfuse
