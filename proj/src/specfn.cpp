#include "evfuse/specfn.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "evfuse/error.hpp"

namespace evfuse::specfn {
namespace {

// Even Bernoulli numbers B_2 .. B_20.
constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,         -1.0 / 30.0,         1.0 / 42.0,  -1.0 / 30.0,
    5.0 / 66.0,        -691.0 / 2730.0,     7.0 / 6.0,   -3617.0 / 510.0,
    43867.0 / 798.0,   -174611.0 / 330.0,
};

void check_argument(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << name << ": argument must be finite and > 0, got " << x;
    throw DomainError(msg.str());
  }
}

}  // namespace

void SpecFnConfig::validate() const {
  if (!(recurrence_threshold >= 6.0) || !std::isfinite(recurrence_threshold)) {
    throw DomainError("SpecFnConfig: recurrence_threshold must be >= 6");
  }
  if (series_terms < 1 || series_terms > kBernoulli.size()) {
    throw DomainError("SpecFnConfig: series_terms must lie in [1, 10]");
  }
}

double log_gamma(double x, const SpecFnConfig& cfg) {
  check_argument(x, "log_gamma");
  cfg.validate();
  if (x == 1.0 || x == 2.0) return 0.0;

  // log Gamma(x) = log Gamma(x + n) - log(x (x+1) ... (x+n-1))
  double shift = 1.0;
  while (x < cfg.recurrence_threshold) {
    shift *= x;
    x += 1.0;
  }

  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;  // x^-(2n-1)
  for (std::size_t n = 1; n <= cfg.series_terms; ++n) {
    const double two_n = 2.0 * static_cast<double>(n);
    series += kBernoulli[n - 1] / (two_n * (two_n - 1.0)) * power;
    power *= inv2;
  }
  const double stirling =
      (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  return stirling - std::log(shift);
}

double digamma(double x, const SpecFnConfig& cfg) {
  check_argument(x, "digamma");
  cfg.validate();

  // psi(x) = psi(x + n) - sum_{i<n} 1/(x + i)
  double shift = 0.0;
  while (x < cfg.recurrence_threshold) {
    shift += 1.0 / x;
    x += 1.0;
  }

  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double power = inv2;  // x^-2n
  for (std::size_t n = 1; n <= cfg.series_terms; ++n) {
    series += kBernoulli[n - 1] / (2.0 * static_cast<double>(n)) * power;
    power *= inv2;
  }
  return std::log(x) - 0.5 / x - series - shift;
}

double trigamma(double x, const SpecFnConfig& cfg) {
  check_argument(x, "trigamma");
  cfg.validate();

  // psi'(x) = psi'(x + n) + sum_{i<n} 1/(x + i)^2
  double shift = 0.0;
  while (x < cfg.recurrence_threshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }

  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv2 * inv;  // x^-(2n+1)
  for (std::size_t n = 1; n <= cfg.series_terms; ++n) {
    series += kBernoulli[n - 1] * power;
    power *= inv2;
  }
  return inv + 0.5 * inv2 + series + shift;
}

double log_multinomial_beta(std::span<const double> alpha, const SpecFnConfig& cfg) {
  if (alpha.empty()) throw DomainError("log_multinomial_beta: empty parameter vector");
  double sum_log = 0.0;
  double total = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      std::ostringstream msg;
      msg << "log_multinomial_beta: components must be finite and > 0, got " << a;
      throw DomainError(msg.str());
    }
    sum_log += log_gamma(a, cfg);
    total += a;
  }
  return sum_log - log_gamma(total, cfg);
}

}  // namespace evfuse::specfn
