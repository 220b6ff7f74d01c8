#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evfuse/opinion.hpp"

namespace evfuse {

/// One-hot ground-truth label.
class LabelEncoding {
 public:
  // Throws DimensionError unless exactly one entry equals 1 and the rest are 0.
  explicit LabelEncoding(std::vector<int> one_hot);

  static LabelEncoding of_class(std::size_t true_class, std::size_t num_classes);

  std::size_t size() const noexcept { return one_hot_.size(); }
  std::size_t true_class() const noexcept { return true_class_; }
  int operator[](std::size_t k) const { return one_hot_[k]; }

 private:
  std::vector<int> one_hot_;
  std::size_t true_class_ = 0;
};

struct LossReport {
  double l_acc = 0.0;
  double l_kl = 0.0;
  double lambda_t = 0.0;
  double total = 0.0;
};

struct JointLoss {
  std::vector<LossReport> views;
  double total = 0.0;
};

/// Expected cross-entropy under Dir(e + 1): psi(S) - psi(e_y + 1).
double l_acc(const Evidence& e, const LabelEncoding& y);

/// KL[Dir(e~ + 1) || Dir(1)] with e~ = (1 - y) * e, the misleading evidence.
double l_kl(const Evidence& e, const LabelEncoding& y);

/// KL weight min(1, t / 10) for zero-based epoch t.
double annealing(std::size_t epoch);

/// l_acc + lambda_t * l_kl for one view.
LossReport view_loss(const Evidence& e, const LabelEncoding& y, std::size_t epoch);

/// Per-view reports and their sum. Views may differ in class count.
JointLoss joint_loss(std::span<const Evidence> evidences, std::span<const LabelEncoding> labels,
                     std::size_t epoch);

/// d(l_acc + lambda_t l_kl) / de.
///
/// With S = sum_k e_k + K, y the true class, e~ the misleading evidence,
/// S~ = sum_k e~_k + K:
///   d l_acc / de_k = psi'(S) - [k == y] psi'(e_y + 1)
///   d l_kl  / de_k = [k != y] (e_k psi'(e_k + 1) - (S~ - K) psi'(S~))
std::vector<double> loss_gradient(const Evidence& e, const LabelEncoding& y, std::size_t epoch);

}  // namespace evfuse
