#include "evfuse/fusion.hpp"

#include <algorithm>
#include <sstream>

#include "evfuse/error.hpp"

namespace evfuse {
namespace {

void require_same_classes(const Opinion& a, const Opinion& b, const char* what) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << what << ": opinions have " << a.size() << " and " << b.size() << " classes";
    throw DimensionError(msg.str());
  }
}

template <typename Pair>
Opinion left_fold(std::span<const Opinion> opinions, const char* what, Pair pair) {
  if (opinions.empty()) {
    throw DimensionError(std::string(what) + ": need at least one opinion");
  }
  Opinion acc = opinions.front();
  for (std::size_t i = 1; i < opinions.size(); ++i) acc = pair(acc, opinions[i]);
  return acc;
}

}  // namespace

std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::kCmam:
      return "cmam";
    case FusionStrategy::kAverageEvidence:
      return "average";
    case FusionStrategy::kHarmonicReference:
      return "harmonic";
  }
  return "unknown";
}

FusionStrategy parse_fusion_strategy(std::string_view name) {
  if (name == "cmam") return FusionStrategy::kCmam;
  if (name == "average" || name == "average_evidence") return FusionStrategy::kAverageEvidence;
  if (name == "harmonic" || name == "harmonic_reference") return FusionStrategy::kHarmonicReference;
  throw UsageError("unknown fusion strategy '" + std::string(name) +
                   "' (expected cmam, average or harmonic)");
}

ConflictDegree conflict_degree(const Opinion& a, const Opinion& b) {
  require_same_classes(a, b, "conflict_degree");
  double agreement = 0.0;
  double mass_a = 0.0;
  double mass_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    agreement += a.belief(k) * b.belief(k);
    mass_a += a.belief(k);
    mass_b += b.belief(k);
  }
  const double denom = mass_a * mass_b;
  if (!(denom > 0.0)) return {0.0};
  return {std::clamp(1.0 - agreement / denom, 0.0, 1.0)};
}

double fused_uncertainty(double ua, double ub, double conflict) {
  const double product = ua * ub;
  return conflict * (2.0 * product / (ua + ub)) + (1.0 - conflict) * product;
}

Opinion combine_at_conflict(const Opinion& a, const Opinion& b, ConflictDegree conflict) {
  require_same_classes(a, b, "combine_at_conflict");
  const double c = conflict.value;
  const double ua = a.uncertainty();
  const double ub = b.uncertainty();
  const double denom = ua + ub;
  const double shared = (1.0 - c) * ua * ub;

  std::vector<double> belief(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    belief[k] = (ua * b.belief(k) + ub * a.belief(k) + shared * (a.belief(k) + b.belief(k))) / denom;
  }
  return Opinion(std::move(belief), fused_uncertainty(ua, ub, c));
}

Opinion cmam_fuse_pair(const Opinion& a, const Opinion& b) {
  return combine_at_conflict(a, b, conflict_degree(a, b));
}

Opinion cmam_fuse_many(std::span<const Opinion> opinions) {
  return left_fold(opinions, "cmam_fuse_many", cmam_fuse_pair);
}

Opinion harmonic_fuse_many(std::span<const Opinion> opinions) {
  return left_fold(opinions, "harmonic_fuse_many", [](const Opinion& a, const Opinion& b) {
    return combine_at_conflict(a, b, ConflictDegree{1.0});
  });
}

Opinion average_fuse(std::span<const Evidence> evidences) {
  if (evidences.empty()) throw DimensionError("average_fuse: need at least one evidence vector");
  const std::size_t k = evidences.front().size();
  std::vector<double> mean(k, 0.0);
  for (const Evidence& e : evidences) {
    if (e.size() != k) {
      std::ostringstream msg;
      msg << "average_fuse: evidence vectors have " << k << " and " << e.size() << " classes";
      throw DimensionError(msg.str());
    }
    for (std::size_t j = 0; j < k; ++j) mean[j] += e[j];
  }
  const double n = static_cast<double>(evidences.size());
  for (double& m : mean) m /= n;
  return evidence_to_opinion(Evidence(std::move(mean)));
}

Opinion fuse(FusionStrategy strategy, std::span<const Evidence> evidences) {
  if (strategy == FusionStrategy::kAverageEvidence) return average_fuse(evidences);
  std::vector<Opinion> opinions;
  opinions.reserve(evidences.size());
  for (const Evidence& e : evidences) opinions.push_back(evidence_to_opinion(e));
  return strategy == FusionStrategy::kCmam ? cmam_fuse_many(opinions)
                                           : harmonic_fuse_many(opinions);
}

std::size_t predicted_class(const Opinion& o) {
  const auto p = o.projected_probability();
  return static_cast<std::size_t>(std::distance(p.begin(), std::max_element(p.begin(), p.end())));
}

}  // namespace evfuse
