#include "evfuse/kernels.hpp"

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "evfuse/error.hpp"
#include "evfuse/toymodel.hpp"

namespace evfuse::kernels {
namespace {

void check_forward(const Matrix& x, const EvidenceHead& head) {
  if (x.cols() != head.n_inputs()) {
    throw DimensionError("forward: input has " + std::to_string(x.cols()) +
                         " features, head expects " + std::to_string(head.n_inputs()));
  }
}

void check_backward(const Matrix& z, const Matrix& e, std::span<const std::size_t> labels,
                    std::span<LossReport> per_sample) {
  if (e.rows() != z.rows() || e.cols() != z.cols() || labels.size() != z.rows() ||
      per_sample.size() != z.rows()) {
    throw DimensionError("backward: batch shapes disagree");
  }
}

void check_accumulate(const Matrix& x, const Matrix& dz, const Matrix& dw, std::span<double> db) {
  if (x.rows() != dz.rows() || dw.rows() != x.cols() || dw.cols() != dz.cols() ||
      db.size() != dz.cols()) {
    throw DimensionError("accumulate: gradient shapes disagree");
  }
}

void forward_row(std::span<const double> x, const EvidenceHead& head, std::span<double> z,
                 std::span<double> e) {
  const Matrix& w = head.weights();
  const std::size_t k_count = head.n_classes();
  for (std::size_t k = 0; k < k_count; ++k) {
    double acc = head.bias()[k];
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * w(j, k);
    z[k] = acc;
    e[k] = softplus(acc);
  }
}

void backward_row(std::span<const double> z, std::span<const double> e, std::size_t label,
                  std::size_t epoch, double inv_n, std::span<double> dz, LossReport& report) {
  const Evidence evidence(std::vector<double>(e.begin(), e.end()));
  const LabelEncoding y = LabelEncoding::of_class(label, e.size());
  report = view_loss(evidence, y, epoch);
  const std::vector<double> grad = loss_gradient(evidence, y, epoch);
  for (std::size_t k = 0; k < e.size(); ++k) dz[k] = grad[k] * sigmoid(z[k]) * inv_n;
}

// Column j of x^T dz, summed over samples in index order.
void accumulate_row(const Matrix& x, const Matrix& dz, std::size_t j, std::span<double> dw_row) {
  for (double& v : dw_row) v = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double xij = x(i, j);
    const auto g = dz.row(i);
    for (std::size_t k = 0; k < g.size(); ++k) dw_row[k] += xij * g[k];
  }
}

void accumulate_bias(const Matrix& dz, std::span<double> db) {
  for (double& v : db) v = 0.0;
  for (std::size_t i = 0; i < dz.rows(); ++i) {
    const auto g = dz.row(i);
    for (std::size_t k = 0; k < g.size(); ++k) db[k] += g[k];
  }
}

}  // namespace

namespace serial {

void forward(const Matrix& x, const EvidenceHead& head, Matrix& z, Matrix& e) {
  check_forward(x, head);
  z.resize(x.rows(), head.n_classes());
  e.resize(x.rows(), head.n_classes());
  for (std::size_t i = 0; i < x.rows(); ++i) forward_row(x.row(i), head, z.row(i), e.row(i));
}

void backward(const Matrix& z, const Matrix& e, std::span<const std::size_t> labels,
              std::size_t epoch, Matrix& dz, std::span<LossReport> per_sample) {
  check_backward(z, e, labels, per_sample);
  dz.resize(z.rows(), z.cols());
  const double inv_n = 1.0 / static_cast<double>(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    backward_row(z.row(i), e.row(i), labels[i], epoch, inv_n, dz.row(i), per_sample[i]);
  }
}

void accumulate(const Matrix& x, const Matrix& dz, Matrix& dw, std::span<double> db) {
  check_accumulate(x, dz, dw, db);
  for (std::size_t j = 0; j < x.cols(); ++j) accumulate_row(x, dz, j, dw.row(j));
  accumulate_bias(dz, db);
}

}  // namespace serial

namespace omp {

void forward(const Matrix& x, const EvidenceHead& head, Matrix& z, Matrix& e) {
  check_forward(x, head);
  z.resize(x.rows(), head.n_classes());
  e.resize(x.rows(), head.n_classes());
  const auto n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    forward_row(x.row(r), head, z.row(r), e.row(r));
  }
}

void backward(const Matrix& z, const Matrix& e, std::span<const std::size_t> labels,
              std::size_t epoch, Matrix& dz, std::span<LossReport> per_sample) {
  check_backward(z, e, labels, per_sample);
  dz.resize(z.rows(), z.cols());
  const double inv_n = 1.0 / static_cast<double>(z.rows());
  const auto n = static_cast<std::int64_t>(z.rows());
  // Exceptions may not cross the parallel region; the first one is rethrown after it.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    try {
      backward_row(z.row(r), e.row(r), labels[r], epoch, inv_n, dz.row(r), per_sample[r]);
    } catch (...) {
#pragma omp critical(evfuse_backward_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void accumulate(const Matrix& x, const Matrix& dz, Matrix& dw, std::span<double> db) {
  check_accumulate(x, dz, dw, db);
  const auto d = static_cast<std::int64_t>(x.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d; ++j) {
    const auto r = static_cast<std::size_t>(j);
    accumulate_row(x, dz, r, dw.row(r));
  }
  accumulate_bias(dz, db);
}

}  // namespace omp

LossReport mean_report(std::span<const LossReport> per_sample) {
  LossReport mean;
  if (per_sample.empty()) return mean;
  for (const LossReport& r : per_sample) {
    mean.l_acc += r.l_acc;
    mean.l_kl += r.l_kl;
    mean.total += r.total;
  }
  const double n = static_cast<double>(per_sample.size());
  mean.l_acc /= n;
  mean.l_kl /= n;
  mean.total /= n;
  mean.lambda_t = per_sample.front().lambda_t;
  return mean;
}

}  // namespace evfuse::kernels
