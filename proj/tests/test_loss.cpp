#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evfuse/error.hpp"
#include "evfuse/loss.hpp"
#include "evfuse/specfn.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace evfuse;

namespace {

double total_loss(const std::vector<double>& e, const LabelEncoding& y, std::size_t t) {
  return view_loss(Evidence(e), y, t).total;
}

}  // namespace

TEST_CASE("label encoding") {
  const LabelEncoding y({0, 0, 1});
  CHECK(y.true_class() == 2);
  CHECK(LabelEncoding::of_class(3, 5).true_class() == 3);
  CHECK_THROWS_AS(LabelEncoding({1, 1, 0}), DimensionError);
  CHECK_THROWS_AS(LabelEncoding({0, 0, 0}), DimensionError);
  CHECK_THROWS_AS(LabelEncoding({0, 2, 0}), DimensionError);
  CHECK_THROWS_AS(LabelEncoding::of_class(5, 5), DimensionError);
}

TEST_CASE("expected cross-entropy exact values") {
  const double h4 = static_cast<double>(oracle::harmonic(4));
  const double h8 = static_cast<double>(oracle::harmonic(8));
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(std::abs(l_acc(Evidence::zeros(5), LabelEncoding::of_class(c, 5)) - h4) < 1e-10);
  }
  CHECK(std::abs(h4 - 25.0 / 12.0) < 1e-15);
  CHECK(std::abs(l_acc(Evidence({4, 0, 0, 0, 0}), LabelEncoding::of_class(0, 5)) - (h8 - h4)) < 1e-10);
  CHECK_THROWS_AS(l_acc(Evidence::zeros(3), LabelEncoding::of_class(0, 5)), DimensionError);
}

TEST_CASE("expected cross-entropy shape") {
  const LabelEncoding y = LabelEncoding::of_class(0, 5);
  double prev = l_acc(Evidence::zeros(5), y);
  for (double t : {0.5, 1.0, 4.0, 20.0, 100.0, 1e4}) {
    const double v = l_acc(Evidence({t, 0, 0, 0, 0}), y);
    CHECK(v < prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(prev < 1e-3);
  CHECK(l_acc(Evidence({1, 2, 0, 0, 0}), y) > l_acc(Evidence({1, 1, 0, 0, 0}), y));
}

TEST_CASE("KL term") {
  CHECK(l_kl(Evidence({4, 0, 0, 0, 0}), LabelEncoding::of_class(0, 5)) == 0.0);
  CHECK(l_kl(Evidence::zeros(5), LabelEncoding::of_class(2, 5)) == 0.0);
  CHECK(l_kl(Evidence({0, 4, 0, 0, 0}), LabelEncoding::of_class(0, 5)) > 0.0);
  // Invariant to true-class evidence.
  const LabelEncoding y = LabelEncoding::of_class(1, 3);
  CHECK(l_kl(Evidence({2, 0, 3}), y) == l_kl(Evidence({2, 40, 3}), y));
}

TEST_CASE("KL closed form matches simplex quadrature") {
  // K = 3, true class chosen so the remaining entries are the misleading evidence.
  const std::vector<std::vector<double>> cases = {
      {0, 4, 0}, {2, 0, 1}, {0, 0, 5}, {5, 5, 0}, {1.5, 0, 3.2}, {0.3, 0.0, 0.7}};
  const std::vector<std::size_t> truth = {0, 1, 0, 2, 1, 1};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::vector<double> alpha(3);
    for (std::size_t k = 0; k < 3; ++k) alpha[k] = (k == truth[i] ? 0.0 : cases[i][k]) + 1.0;
    const double reference = oracle::dirichlet_kl_to_uniform_k3(alpha);
    CAPTURE(i);
    CHECK(std::abs(l_kl(Evidence(cases[i]), LabelEncoding::of_class(truth[i], 3)) - reference) < 1e-4);
  }
}

TEST_CASE("annealing") {
  CHECK(annealing(0) == 0.0);
  CHECK(annealing(5) == 0.5);
  CHECK(annealing(10) == 1.0);
  CHECK(annealing(37) == 1.0);
  for (std::size_t t = 0; t < 30; ++t) CHECK(annealing(t + 1) >= annealing(t));
}

TEST_CASE("joint loss") {
  const std::vector<Evidence> ev = {Evidence::zeros(5), Evidence::zeros(5), Evidence::zeros(3),
                                    Evidence::zeros(3)};
  const std::vector<LabelEncoding> y = {LabelEncoding::of_class(2, 5), LabelEncoding::of_class(2, 5),
                                        LabelEncoding::of_class(1, 3), LabelEncoding::of_class(1, 3)};
  const JointLoss j = joint_loss(ev, y, 0);
  CHECK(j.views.size() == 4);
  CHECK(std::abs(j.total - 43.0 / 6.0) < 1e-10);

  const std::vector<Evidence> one = {Evidence({0, 3, 1})};
  const std::vector<LabelEncoding> y1 = {LabelEncoding::of_class(0, 3)};
  CHECK(joint_loss(one, y1, 0).total == l_acc(one[0], y1[0]));
  const std::vector<Evidence> right = {Evidence({6, 0, 0})};
  CHECK(joint_loss(right, y1, 20).total == l_acc(right[0], y1[0]));

  const LossReport r = view_loss(Evidence({1, 2, 3}), LabelEncoding::of_class(0, 3), 4);
  CHECK(std::abs(r.total - (r.l_acc + r.lambda_t * r.l_kl)) < 1e-12);
  CHECK(r.lambda_t == 0.4);

  const std::vector<LabelEncoding> too_few = {LabelEncoding::of_class(0, 5)};
  CHECK_THROWS_AS(joint_loss(ev, too_few, 0), DimensionError);
}

TEST_CASE("gradient at zero evidence") {
  const auto g = loss_gradient(Evidence::zeros(5), LabelEncoding::of_class(0, 5), 0);
  CHECK(std::abs(g[0] - (specfn::trigamma(5) - specfn::trigamma(1))) < 1e-14);
  for (std::size_t k = 1; k < 5; ++k) CHECK(std::abs(g[k] - specfn::trigamma(5)) < 1e-14);
}

TEST_CASE("KL gradient ignores the true class") {
  const LabelEncoding y = LabelEncoding::of_class(1, 3);
  const Evidence e({2, 5, 1});
  const auto g_late = loss_gradient(e, y, 30);
  const auto g_early = loss_gradient(e, y, 0);
  CHECK(g_late[1] == g_early[1]);
  CHECK(g_late[0] != g_early[0]);
}

TEST_CASE("analytic gradient matches central differences") {
  gen::Rng rng(41);
  std::uniform_int_distribution<std::size_t> epoch(0, 15);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = gen::class_count(rng);
    auto e = gen::evidence_values(rng, k, 20.0);
    // Central differences need room on both sides of each component.
    for (double& v : e) v = std::max(v, 2 * h);
    const LabelEncoding y = LabelEncoding::of_class(static_cast<std::size_t>(i) % k, k);
    const std::size_t t = epoch(rng);
    const auto g = loss_gradient(Evidence(e), y, t);
    for (std::size_t c = 0; c < k; ++c) {
      auto up = e, down = e;
      up[c] += h;
      down[c] -= h;
      const double fd = (total_loss(up, y, t) - total_loss(down, y, t)) / (2 * h);
      const double rel = std::abs(fd - g[c]) / std::max(std::abs(g[c]), 1e-3);
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-5);
}
