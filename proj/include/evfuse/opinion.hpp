#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evfuse {

// Tolerance for simplex and sum-to-one checks.
inline constexpr double kSimplexTolerance = 1e-9;
// Smallest uncertainty mass a stored opinion may carry.
inline constexpr double kMinUncertainty = 1e-12;

/// Non-negative per-class support produced by an evidence head.
class Evidence {
 public:
  // Throws DomainError on negative or non-finite entries, DimensionError when fewer than 2 classes.
  explicit Evidence(std::vector<double> values);

  static Evidence zeros(std::size_t num_classes);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  double total() const noexcept;

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::vector<double> values_;
};

/// Dirichlet concentration alpha = e + 1. Strength is derived from alpha at construction.
class DirichletParams {
 public:
  // Every component must be finite and >= 1.
  explicit DirichletParams(std::vector<double> alpha);

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t k) const { return alpha_[k]; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double strength() const noexcept { return strength_; }

 private:
  std::vector<double> alpha_;
  double strength_;
};

/// Subjective-logic opinion (b, u) with sum(b) + u = 1.
///
/// The constructor checks the sum-to-one constraint within kSimplexTolerance.
/// An uncertainty below kMinUncertainty is raised to that floor and the beliefs
/// are rescaled so the total stays 1; fusion divides by u^a + u^b.
class Opinion {
 public:
  Opinion(std::vector<double> belief, double uncertainty);

  /// All mass on uncertainty.
  static Opinion vacuous(std::size_t num_classes);

  std::size_t size() const noexcept { return belief_.size(); }
  std::span<const double> belief() const noexcept { return belief_; }
  double belief(std::size_t k) const { return belief_[k]; }
  double uncertainty() const noexcept { return uncertainty_; }
  double belief_mass() const noexcept;

  /// p_k = b_k + u / K, the Dirichlet mean.
  std::vector<double> projected_probability() const;

  friend bool operator==(const Opinion&, const Opinion&) = default;

 private:
  std::vector<double> belief_;
  double uncertainty_;
};

DirichletParams evidence_to_dirichlet(const Evidence& e);

Opinion dirichlet_to_opinion(const DirichletParams& d);

// Inverse of dirichlet_to_opinion: S = K / u, alpha_k = b_k S + 1.
DirichletParams opinion_to_dirichlet(const Opinion& o);

inline Opinion evidence_to_opinion(const Evidence& e) {
  return dirichlet_to_opinion(evidence_to_dirichlet(e));
}

// Log density of Dir(p | alpha). p must lie on the simplex within kSimplexTolerance;
// returns -infinity where p_k = 0 and alpha_k > 1.
double dirichlet_log_pdf(const DirichletParams& d, std::span<const double> p);

}  // namespace evfuse
