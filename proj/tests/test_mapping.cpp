#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "evfuse/error.hpp"
#include "evfuse/mapping.hpp"
#include "generators.hpp"

using namespace evfuse;
using namespace evfuse::stage;

TEST_CASE("uniform matrix layout") {
  const MappingMatrix u = uniform_mapping();
  CHECK(u.rows() == 3);
  CHECK(u.cols() == 5);
  CHECK(u.strategy() == MappingStrategy::kUniform);
  CHECK(u.has_sleep_structure());
  CHECK(u(kCoarseNrem, kFineN2) == 1.0 / 3.0);
  CHECK(u(kCoarseW, kFineN1) == 0.0);
  CHECK(u(kCoarseW, kFineW) == 1.0);
  CHECK(u(kCoarseRem, kFineRem) == 1.0);
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 5; ++c) s += u(r, c);
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("worked mapping examples") {
  const MappingMatrix u = uniform_mapping();
  const Evidence m = map_evidence(Evidence({3, 6, 9}), u);
  const std::vector<double> expected = {3, 2, 2, 2, 9};
  for (std::size_t k = 0; k < 5; ++k) CHECK(m[k] == doctest::Approx(expected[k]).epsilon(1e-15));
  CHECK(map_evidence(Evidence::zeros(3), u) == Evidence::zeros(5));
  CHECK(map_evidence(Evidence({5, 0, 0}), u) == Evidence({5, 0, 0, 0, 0}));
  CHECK_THROWS_AS(map_evidence(Evidence::zeros(5), u), DimensionError);
}

TEST_CASE("conservation, W/REM equivalence, NREM partition") {
  gen::Rng rng(31);
  const std::vector<double> counts = {0, 3, 11, 5, 0};
  const MappingMatrix matrices[] = {uniform_mapping(), data_driven_mapping(counts)};
  for (const MappingMatrix& u : matrices) {
    for (int i = 0; i < 1000; ++i) {
      const Evidence e = gen::evidence(rng, 3, 1000.0);
      const Evidence m = map_evidence(e, u);
      REQUIRE(std::abs(m.total() - e.total()) <= 1e-12 * std::max(1.0, e.total()));
      REQUIRE(m[kFineW] == e[kCoarseW]);
      REQUIRE(m[kFineRem] == e[kCoarseRem]);
      REQUIRE(std::abs(m[kFineN1] + m[kFineN2] + m[kFineN3] - e[kCoarseNrem]) <=
              1e-12 * std::max(1.0, e[kCoarseNrem]));
      for (double v : m.values()) REQUIRE(v >= 0.0);
    }
  }
}

TEST_CASE("data-driven mapping") {
  const std::vector<double> equal = {7, 1, 1, 1, 2};
  const MappingMatrix a = data_driven_mapping(equal);
  const MappingMatrix u = uniform_mapping();
  for (std::size_t c = 0; c < 5; ++c) CHECK(a(kCoarseNrem, c) == u(kCoarseNrem, c));
  CHECK(a.strategy() == MappingStrategy::kDataDriven);

  const std::vector<double> skew = {0, 1, 2, 1, 0};
  const MappingMatrix b = data_driven_mapping(skew);
  CHECK(b(kCoarseNrem, kFineN1) == 0.25);
  CHECK(b(kCoarseNrem, kFineN2) == 0.5);
  CHECK(b(kCoarseNrem, kFineN3) == 0.25);
  CHECK(b(kCoarseW, kFineW) == 1.0);
  CHECK(b.has_sleep_structure());

  const std::vector<double> none = {4, 0, 0, 0, 9};
  const MappingMatrix c = data_driven_mapping(none);
  for (std::size_t k = 0; k < 5; ++k) CHECK(c(kCoarseNrem, k) == u(kCoarseNrem, k));
  CHECK(c.strategy() == MappingStrategy::kUniform);

  const std::vector<double> short_counts = {1, 1, 1};
  CHECK_THROWS_AS(data_driven_mapping(short_counts), DimensionError);
  const std::vector<double> negative = {1, -1, 1, 1, 1};
  CHECK_THROWS_AS(data_driven_mapping(negative), DomainError);
}

TEST_CASE("matrix validation") {
  CHECK_THROWS_AS(MappingMatrix(1, 2, {0.5, 0.6}, MappingStrategy::kUniform), DomainError);
  CHECK_THROWS_AS(MappingMatrix(1, 2, {1.5, -0.5}, MappingStrategy::kUniform), DomainError);
  CHECK_THROWS_AS(MappingMatrix(2, 2, {1.0, 0.0}, MappingStrategy::kUniform), DimensionError);
  const MappingMatrix leaky(3, 5, {1, 0, 0, 0, 0, 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 1},
                            MappingStrategy::kUniform);
  CHECK_FALSE(leaky.has_sleep_structure());
}

TEST_CASE("coarse classes and names") {
  CHECK(coarse_of(kFineW) == kCoarseW);
  CHECK(coarse_of(kFineN1) == kCoarseNrem);
  CHECK(coarse_of(kFineN3) == kCoarseNrem);
  CHECK(coarse_of(kFineRem) == kCoarseRem);
  CHECK_THROWS_AS(coarse_of(5), DomainError);
  CHECK(parse_mapping_strategy("uniform") == MappingStrategy::kUniform);
  CHECK(parse_mapping_strategy("data_driven") == MappingStrategy::kDataDriven);
  CHECK(to_string(MappingStrategy::kDataDriven) == "data_driven");
  CHECK_THROWS_AS(parse_mapping_strategy("learnable"), UsageError);
}
