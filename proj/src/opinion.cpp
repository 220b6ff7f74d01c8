#include "evfuse/opinion.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "evfuse/error.hpp"
#include "evfuse/specfn.hpp"

namespace evfuse {
namespace {

void require_classes(std::size_t k, const char* what) {
  if (k < 2) {
    std::ostringstream msg;
    msg << what << ": need at least 2 classes, got " << k;
    throw DimensionError(msg.str());
  }
}

}  // namespace

Evidence::Evidence(std::vector<double> values) : values_(std::move(values)) {
  require_classes(values_.size(), "Evidence");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "Evidence: component " << k << " must be finite and >= 0, got " << v;
      throw DomainError(msg.str());
    }
  }
}

Evidence Evidence::zeros(std::size_t num_classes) {
  return Evidence(std::vector<double>(num_classes, 0.0));
}

double Evidence::total() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  require_classes(alpha_.size(), "DirichletParams");
  for (std::size_t k = 0; k < alpha_.size(); ++k) {
    const double a = alpha_[k];
    if (!std::isfinite(a) || a < 1.0) {
      std::ostringstream msg;
      msg << "DirichletParams: alpha[" << k << "] must be finite and >= 1, got " << a;
      throw DomainError(msg.str());
    }
  }
  strength_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

Opinion::Opinion(std::vector<double> belief, double uncertainty)
    : belief_(std::move(belief)), uncertainty_(uncertainty) {
  require_classes(belief_.size(), "Opinion");
  if (!std::isfinite(uncertainty_) || uncertainty_ < 0.0 || uncertainty_ > 1.0 + kSimplexTolerance) {
    std::ostringstream msg;
    msg << "Opinion: uncertainty must lie in [0, 1], got " << uncertainty_;
    throw DomainError(msg.str());
  }
  double mass = 0.0;
  for (std::size_t k = 0; k < belief_.size(); ++k) {
    const double b = belief_[k];
    if (!std::isfinite(b) || b < 0.0) {
      std::ostringstream msg;
      msg << "Opinion: belief[" << k << "] must be finite and >= 0, got " << b;
      throw DomainError(msg.str());
    }
    mass += b;
  }
  if (std::abs(mass + uncertainty_ - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Opinion: belief mass + uncertainty must equal 1, got " << mass + uncertainty_;
    throw SimplexError(msg.str());
  }
  if (uncertainty_ < kMinUncertainty) {
    const double scale = mass > 0.0 ? (1.0 - kMinUncertainty) / mass : 0.0;
    for (double& b : belief_) b *= scale;
    uncertainty_ = kMinUncertainty;
  }
}

Opinion Opinion::vacuous(std::size_t num_classes) {
  return Opinion(std::vector<double>(num_classes, 0.0), 1.0);
}

double Opinion::belief_mass() const noexcept {
  return std::accumulate(belief_.begin(), belief_.end(), 0.0);
}

std::vector<double> Opinion::projected_probability() const {
  const double share = uncertainty_ / static_cast<double>(belief_.size());
  std::vector<double> p(belief_.size());
  for (std::size_t k = 0; k < belief_.size(); ++k) p[k] = belief_[k] + share;
  return p;
}

DirichletParams evidence_to_dirichlet(const Evidence& e) {
  std::vector<double> alpha(e.values().begin(), e.values().end());
  for (double& a : alpha) a += 1.0;
  return DirichletParams(std::move(alpha));
}

Opinion dirichlet_to_opinion(const DirichletParams& d) {
  const double s = d.strength();
  std::vector<double> belief(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) belief[k] = (d[k] - 1.0) / s;
  return Opinion(std::move(belief), static_cast<double>(d.size()) / s);
}

DirichletParams opinion_to_dirichlet(const Opinion& o) {
  // The constructor keeps u >= kMinUncertainty, so S is finite.
  const double s = static_cast<double>(o.size()) / o.uncertainty();
  std::vector<double> alpha(o.size());
  for (std::size_t k = 0; k < o.size(); ++k) alpha[k] = o.belief(k) * s + 1.0;
  return DirichletParams(std::move(alpha));
}

double dirichlet_log_pdf(const DirichletParams& d, std::span<const double> p) {
  if (p.size() != d.size()) {
    std::ostringstream msg;
    msg << "dirichlet_log_pdf: probability vector has " << p.size() << " components, expected "
        << d.size();
    throw DimensionError(msg.str());
  }
  double total = 0.0;
  for (double pk : p) {
    if (!std::isfinite(pk) || pk < -kSimplexTolerance || pk > 1.0 + kSimplexTolerance) {
      throw SimplexError("dirichlet_log_pdf: probability components must lie in [0, 1]");
    }
    total += pk;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "dirichlet_log_pdf: probabilities sum to " << total << ", not 1";
    throw SimplexError(msg.str());
  }

  double log_density = -specfn::log_multinomial_beta(d.alpha());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double exponent = d[k] - 1.0;
    if (exponent == 0.0) continue;
    if (p[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    log_density += exponent * std::log(p[k]);
  }
  return log_density;
}

}  // namespace evfuse
