#include "evfuse/loss.hpp"

#include <algorithm>
#include <sstream>

#include "evfuse/error.hpp"
#include "evfuse/specfn.hpp"

namespace evfuse {
namespace {

void require_match(const Evidence& e, const LabelEncoding& y, const char* what) {
  if (e.size() != y.size()) {
    std::ostringstream msg;
    msg << what << ": evidence has " << e.size() << " classes, label has " << y.size();
    throw DimensionError(msg.str());
  }
}

}  // namespace

LabelEncoding::LabelEncoding(std::vector<int> one_hot) : one_hot_(std::move(one_hot)) {
  if (one_hot_.size() < 2) throw DimensionError("LabelEncoding: need at least 2 classes");
  std::size_t ones = 0;
  for (std::size_t k = 0; k < one_hot_.size(); ++k) {
    if (one_hot_[k] == 1) {
      ++ones;
      true_class_ = k;
    } else if (one_hot_[k] != 0) {
      throw DimensionError("LabelEncoding: entries must be 0 or 1");
    }
  }
  if (ones != 1) throw DimensionError("LabelEncoding: exactly one entry must be 1");
}

LabelEncoding LabelEncoding::of_class(std::size_t true_class, std::size_t num_classes) {
  if (true_class >= num_classes) {
    std::ostringstream msg;
    msg << "LabelEncoding: class " << true_class << " out of range for " << num_classes
        << " classes";
    throw DimensionError(msg.str());
  }
  std::vector<int> one_hot(num_classes, 0);
  one_hot[true_class] = 1;
  return LabelEncoding(std::move(one_hot));
}

double l_acc(const Evidence& e, const LabelEncoding& y) {
  require_match(e, y, "l_acc");
  const double strength = e.total() + static_cast<double>(e.size());
  return specfn::digamma(strength) - specfn::digamma(e[y.true_class()] + 1.0);
}

double l_kl(const Evidence& e, const LabelEncoding& y) {
  require_match(e, y, "l_kl");
  const std::size_t k_count = e.size();
  const std::size_t truth = y.true_class();

  double misleading = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (k != truth) misleading += e[k];
  }
  if (misleading == 0.0) return 0.0;

  const double k_real = static_cast<double>(k_count);
  const double strength = misleading + k_real;
  const double psi_strength = specfn::digamma(strength);
  double kl = specfn::log_gamma(strength) - specfn::log_gamma(k_real);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (k == truth || e[k] == 0.0) continue;  // log_gamma(1) = 0 and the e~ factor vanishes
    const double alpha = e[k] + 1.0;
    kl += -specfn::log_gamma(alpha) + e[k] * (specfn::digamma(alpha) - psi_strength);
  }
  return std::max(kl, 0.0);
}

double annealing(std::size_t epoch) {
  return std::min(1.0, static_cast<double>(epoch) / 10.0);
}

LossReport view_loss(const Evidence& e, const LabelEncoding& y, std::size_t epoch) {
  LossReport r;
  r.l_acc = l_acc(e, y);
  r.l_kl = l_kl(e, y);
  r.lambda_t = annealing(epoch);
  r.total = r.l_acc + r.lambda_t * r.l_kl;
  return r;
}

JointLoss joint_loss(std::span<const Evidence> evidences, std::span<const LabelEncoding> labels,
                     std::size_t epoch) {
  if (evidences.size() != labels.size()) {
    std::ostringstream msg;
    msg << "joint_loss: " << evidences.size() << " evidence views but " << labels.size()
        << " labels";
    throw DimensionError(msg.str());
  }
  if (evidences.empty()) throw DimensionError("joint_loss: need at least one view");
  JointLoss out;
  out.views.reserve(evidences.size());
  for (std::size_t v = 0; v < evidences.size(); ++v) {
    out.views.push_back(view_loss(evidences[v], labels[v], epoch));
    out.total += out.views.back().total;
  }
  return out;
}

std::vector<double> loss_gradient(const Evidence& e, const LabelEncoding& y, std::size_t epoch) {
  require_match(e, y, "loss_gradient");
  const std::size_t k_count = e.size();
  const std::size_t truth = y.true_class();
  const double k_real = static_cast<double>(k_count);
  const double lambda = annealing(epoch);

  const double tri_strength = specfn::trigamma(e.total() + k_real);
  std::vector<double> grad(k_count, tri_strength);
  grad[truth] -= specfn::trigamma(e[truth] + 1.0);

  if (lambda == 0.0) return grad;
  double misleading = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (k != truth) misleading += e[k];
  }
  const double tri_misleading = specfn::trigamma(misleading + k_real);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (k == truth) continue;
    grad[k] += lambda * (e[k] * specfn::trigamma(e[k] + 1.0) - misleading * tri_misleading);
  }
  return grad;
}

}  // namespace evfuse
