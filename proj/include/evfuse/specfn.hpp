#pragma once

#include <cstddef>
#include <span>

namespace evfuse::specfn {

// Controls the shift-then-asymptotic evaluation scheme shared by log_gamma,
// digamma and trigamma. Arguments below `recurrence_threshold` are moved up by
// unit steps before the Bernoulli series is summed with `series_terms` terms.
struct SpecFnConfig {
  double recurrence_threshold = 6.0;
  std::size_t series_terms = 10;

  // Throws DomainError when threshold < 6 or series_terms is outside [1, 10].
  void validate() const;
};

/// Natural log of the gamma function for x > 0.
double log_gamma(double x, const SpecFnConfig& cfg = {});

/// Digamma function psi(x) = d/dx log_gamma(x), x > 0.
double digamma(double x, const SpecFnConfig& cfg = {});

/// Trigamma function psi'(x), x > 0.
double trigamma(double x, const SpecFnConfig& cfg = {});

/// log B(alpha) = sum_k log_gamma(alpha_k) - log_gamma(sum_k alpha_k).
double log_multinomial_beta(std::span<const double> alpha, const SpecFnConfig& cfg = {});

}  // namespace evfuse::specfn
