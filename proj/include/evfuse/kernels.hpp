#pragma once

// Batch kernels behind training and inference. Each kernel has a serial
// reference version and an OpenMP version with identical results: parallel
// loops only split independent outputs, and every reduction over samples runs
// in index order inside a single output element.

#include <cstddef>
#include <span>

#include "evfuse/loss.hpp"
#include "evfuse/matrix.hpp"

namespace evfuse {
class EvidenceHead;
}

namespace evfuse::kernels {

namespace serial {

// z = x W + b and e = softplus(z), one row per sample.
// x: n x d, W: d x K; z and e are resized to n x K.
void forward(const Matrix& x, const EvidenceHead& head, Matrix& z, Matrix& e);

// Per-sample loss terms and dL/dz divided by the batch size n. labels[i] is the
// true class of sample i for this head; per_sample has n entries.
void backward(const Matrix& z, const Matrix& e, std::span<const std::size_t> labels,
              std::size_t epoch, Matrix& dz, std::span<LossReport> per_sample);

// dw = x^T dz (d x K), db = column sums of dz.
void accumulate(const Matrix& x, const Matrix& dz, Matrix& dw, std::span<double> db);

}  // namespace serial

namespace omp {
void forward(const Matrix& x, const EvidenceHead& head, Matrix& z, Matrix& e);
void backward(const Matrix& z, const Matrix& e, std::span<const std::size_t> labels,
              std::size_t epoch, Matrix& dz, std::span<LossReport> per_sample);
void accumulate(const Matrix& x, const Matrix& dz, Matrix& dw, std::span<double> db);
}  // namespace omp

/// Sum of per-sample reports in index order, divided by n.
LossReport mean_report(std::span<const LossReport> per_sample);

}  // namespace evfuse::kernels
