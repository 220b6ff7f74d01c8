// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "evfuse/experiment.hpp"
#include "evfuse/fusion.hpp"
#include "evfuse/loss.hpp"
#include "evfuse/mapping.hpp"
#include "evfuse/specfn.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace evfuse;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// 1. Fused opinions stay on the simplex.
Outcome sum_to_one() {
  gen::Rng rng(1001);
  double worst = 0.0;
  std::size_t negative = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = gen::class_count(rng);
    const Opinion f = cmam_fuse_pair(gen::opinion(rng, k), gen::opinion(rng, k));
    worst = std::max(worst, std::abs(f.belief_mass() + f.uncertainty() - 1.0));
    for (double b : f.belief()) negative += b < 0.0;
    negative += f.uncertainty() < 0.0;
  }
  return {worst <= 1e-9 && negative == 0,
          "max |sum-1| = " + fmt("%.2e", worst) + ", negative components = " + std::to_string(negative)};
}

// 2. Agreement lowers uncertainty.
Outcome consistent_pairs() {
  gen::Rng rng(1002);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = gen::class_count(rng);
    const std::size_t c = static_cast<std::size_t>(i) % k;
    const double ua = gen::uncertainty(rng), ub = gen::uncertainty(rng);
    const Opinion a = gen::one_hot_opinion(k, c, ua), b = gen::one_hot_opinion(k, c, ub);
    if (!(conflict_degree(a, b).value < 1e-6)) return {false, "generator produced C >= 1e-6"};
    violations += !(cmam_fuse_pair(a, b).uncertainty() < std::min(ua, ub));
  }
  return {violations == 0, std::to_string(violations) + " violations in 1000 pairs"};
}

// 3. Full conflict raises uncertainty above the more certain operand.
Outcome conflicting_pairs() {
  gen::Rng rng(1003);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = gen::class_count(rng);
    const std::size_t c = static_cast<std::size_t>(i) % k;
    double uo = gen::uncertainty(rng), ub = gen::uncertainty(rng);
    if (ub < uo) std::swap(ub, uo);
    if (ub == uo) continue;
    const Opinion o = gen::one_hot_opinion(k, c, uo), b = gen::one_hot_opinion(k, (c + 1) % k, ub);
    if (!(conflict_degree(o, b).value > 1.0 - 1e-6)) return {false, "generator produced C <= 1-1e-6"};
    violations += !(cmam_fuse_pair(o, b).uncertainty() > uo);
  }
  return {violations == 0, std::to_string(violations) + " violations in 1000 pairs"};
}

// 4. Aligned beliefs at u = (0.3, 0.8).
Outcome harmonic_contrast() {
  const Opinion a = gen::one_hot_opinion(5, 0, 0.3), b = gen::one_hot_opinion(5, 0, 0.8);
  const std::vector<Opinion> pair = {a, b};
  const double cmam = cmam_fuse_pair(a, b).uncertainty();
  const double harmonic = harmonic_fuse_many(pair).uncertainty();
  return {std::abs(cmam - 0.24) < 1e-15 && std::abs(harmonic - 0.436) <= 1e-3,
          "cmam u = " + fmt("%.17g", cmam) + ", harmonic u = " + fmt("%.6f", harmonic)};
}

// 5. Fused uncertainty is non-decreasing in C, with the stated endpoints.
Outcome monotone_in_conflict() {
  gen::Rng rng(1005);
  std::size_t drops = 0;
  double endpoint = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ua = gen::uncertainty(rng), ub = gen::uncertainty(rng);
    double prev = -1.0;
    for (int j = 0; j <= 100; ++j) {
      const double u = fused_uncertainty(ua, ub, j / 100.0);
      drops += u < prev;
      prev = u;
    }
    endpoint = std::max(endpoint, std::abs(fused_uncertainty(ua, ub, 0.0) - ua * ub));
    endpoint = std::max(endpoint, std::abs(fused_uncertainty(ua, ub, 1.0) - 2 * ua * ub / (ua + ub)));
  }
  return {drops == 0 && endpoint <= 1e-12,
          std::to_string(drops) + " decreases, max endpoint error " + fmt("%.2e", endpoint)};
}

// 6. Coarse-to-fine evidence mapping.
Outcome mapping() {
  const MappingMatrix u = uniform_mapping();
  const Evidence m = map_evidence(Evidence({3, 6, 9}), u);
  const std::vector<double> expected = {3, 2, 2, 2, 9};
  double example = 0.0;
  for (std::size_t k = 0; k < 5; ++k) example = std::max(example, std::abs(m[k] - expected[k]));

  gen::Rng rng(1006);
  double worst = 0.0;
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Evidence e = gen::evidence(rng, 3, 100.0);
    const Evidence f = map_evidence(e, u);
    worst = std::max(worst, std::abs(f.total() - e.total()));
    worst = std::max(worst, std::abs(f[1] + f[2] + f[3] - e[1]));
    mismatches += f[0] != e[0] || f[4] != e[2];
  }
  return {example <= 1e-12 && worst <= 1e-12 && mismatches == 0,
          "example error " + fmt("%.1e", example) + ", max conservation error " + fmt("%.2e", worst) +
              ", W/REM mismatches " + std::to_string(mismatches)};
}

// 7. Loss values against harmonic numbers and quadrature.
Outcome loss_exactness() {
  const double h4 = static_cast<double>(oracle::harmonic(4));
  const double h8 = static_cast<double>(oracle::harmonic(8));
  double worst = 0.0;
  for (std::size_t c = 0; c < 5; ++c) {
    worst = std::max(worst, std::abs(l_acc(Evidence::zeros(5), LabelEncoding::of_class(c, 5)) - 25.0 / 12.0));
  }
  worst = std::max(worst, std::abs(h4 - 25.0 / 12.0));
  worst = std::max(
      worst, std::abs(l_acc(Evidence({4, 0, 0, 0, 0}), LabelEncoding::of_class(0, 5)) - (h8 - h4)));

  gen::Rng rng(1007);
  std::size_t kl_nonzero = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = gen::class_count(rng);
    const std::size_t y = static_cast<std::size_t>(i) % k;
    std::vector<double> e(k, 0.0);
    e[y] = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    kl_nonzero += l_kl(Evidence(e), LabelEncoding::of_class(y, k)) != 0.0;
  }

  const std::vector<std::vector<double>> cases = {{0, 4, 0}, {2, 0, 1}, {0, 0, 5}, {5, 5, 0}, {1.5, 0, 3.2}};
  const std::vector<std::size_t> truth = {0, 1, 0, 2, 1};
  double kl_err = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::vector<double> alpha(3);
    for (std::size_t k = 0; k < 3; ++k) alpha[k] = (k == truth[i] ? 0.0 : cases[i][k]) + 1.0;
    kl_err = std::max(kl_err, std::abs(l_kl(Evidence(cases[i]), LabelEncoding::of_class(truth[i], 3)) -
                                       oracle::dirichlet_kl_to_uniform_k3(alpha)));
  }
  return {worst <= 1e-10 && kl_nonzero == 0 && kl_err <= 1e-4,
          "L_acc error " + fmt("%.1e", worst) + ", nonzero KL without misleading evidence " +
              std::to_string(kl_nonzero) + ", KL vs quadrature " + fmt("%.1e", kl_err)};
}

// 8. Analytic gradients against central differences.
Outcome gradients() {
  gen::Rng rng(1008);
  std::uniform_int_distribution<std::size_t> epoch(0, 15);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = gen::class_count(rng);
    auto e = gen::evidence_values(rng, k, 20.0);
    for (double& v : e) v = std::max(v, 2 * h);
    const LabelEncoding y = LabelEncoding::of_class(static_cast<std::size_t>(i) % k, k);
    const std::size_t t = epoch(rng);
    const auto g = loss_gradient(Evidence(e), y, t);
    for (std::size_t c = 0; c < k; ++c) {
      auto up = e, down = e;
      up[c] += h;
      down[c] -= h;
      const double fd =
          (view_loss(Evidence(up), y, t).total - view_loss(Evidence(down), y, t).total) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[c]) / std::max(std::abs(g[c]), 1e-3));
    }
  }
  return {worst < 1e-5, "max relative error " + fmt("%.2e", worst)};
}

// 9. Special functions.
Outcome special_functions() {
  double rec = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.5 + 99.5 * i / 999.0;
    rec = std::max(rec, std::abs(specfn::digamma(x + 1) - specfn::digamma(x) - 1.0 / x));
    rec = std::max(rec, std::abs(specfn::trigamma(x + 1) - specfn::trigamma(x) + 1.0 / (x * x)));
    rec = std::max(rec, std::abs(specfn::log_gamma(x + 1) - specfn::log_gamma(x) - std::log(x)));
  }
  const double psi1 = std::abs(specfn::digamma(1.0) - static_cast<double>(oracle::digamma(1.0L)));
  const double tri1 = std::abs(specfn::trigamma(1.0) - static_cast<double>(oracle::trigamma(1.0L)));
  const double lg5 = std::abs(specfn::log_gamma(5.0) -
                              static_cast<double>(oracle::log_gamma_euler_product(5.0L)));
  return {rec <= 1e-12 && psi1 <= 1e-10 && tri1 <= 1e-9 && lg5 <= 1e-12,
          "recurrence " + fmt("%.1e", rec) + ", psi(1) " + fmt("%.1e", psi1) + ", psi'(1) " +
              fmt("%.1e", tri1) + ", lgamma(5) " + fmt("%.1e", lg5)};
}

ExperimentConfig default_config(std::uint64_t seed, double sigma = 1.0) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.synthetic.noise_sigma = {sigma, sigma};
  cfg.finalize();
  return cfg;
}

// 10. CMAM against evidence averaging on the default synthetic setup.
Outcome ablation_direction() {
  std::string detail;
  double diff_sum = 0.0;
  bool every_seed = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ExperimentConfig cfg = default_config(seed);
    const DatasetPair data = load_datasets(cfg);
    Pipeline p = make_pipeline(cfg.pipeline, cfg.synthetic.n_features, cfg.synthetic.n_features);
    train(p, data.train);
    const double cmam = evaluate(p, data.test, FusionStrategy::kCmam).metrics.accuracy;
    const double avg = evaluate(p, data.test, FusionStrategy::kAverageEvidence).metrics.accuracy;
    every_seed = every_seed && cmam >= avg;
    diff_sum += cmam - avg;
    detail += "seed " + std::to_string(seed) + ": " + fmt("%.3f", cmam) + " vs " + fmt("%.3f", avg) + "; ";
  }
  detail += "mean diff " + fmt("%+.4f", diff_sum / 3);
  return {every_seed && diff_sum > 0.0, detail};
}

// 11. Mean joint uncertainty grows with the noise level; heads retrained at each level.
Outcome uncertainty_under_noise() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    double prev = -1.0;
    detail += "seed " + std::to_string(seed) + ":";
    for (double sigma : {0.1, 0.5, 1.0, 10.0}) {
      const ExperimentConfig cfg = default_config(seed, sigma);
      const DatasetPair data = load_datasets(cfg);
      Pipeline p = make_pipeline(cfg.pipeline, cfg.synthetic.n_features, cfg.synthetic.n_features);
      train(p, data.train);
      const double u = evaluate(p, data.test, FusionStrategy::kCmam).mean_uncertainty;
      ok = ok && u > prev;
      prev = u;
      detail += " " + fmt("%.3f", u);
    }
    detail += "; ";
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 12. Reruns are byte-identical.
Outcome determinism() {
  const std::filesystem::path root = std::filesystem::path(EVFUSE_TEST_TMP) / "acceptance";
  std::string docs[2];
  for (int run = 0; run < 2; ++run) {
    ExperimentConfig cfg = default_config(1);
    cfg.out_dir = root / ("run" + std::to_string(run));
    std::filesystem::remove_all(cfg.out_dir);
    run_experiment(cfg);
    docs[run] = slurp(cfg.out_dir / "metrics.json");
  }
  return {!docs[0].empty() && docs[0] == docs[1],
          "metrics.json " + std::to_string(docs[0].size()) + " bytes, " +
              (docs[0] == docs[1] ? "identical" : "different")};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fused opinions satisfy sum(b) + u = 1", 1.0, sum_to_one},
      {2, "consistent pairs lower uncertainty", 0.0, consistent_pairs},
      {3, "conflicting pairs raise uncertainty", 0.0, conflicting_pairs},
      {4, "aligned u = (0.3, 0.8): cmam 0.24, harmonic 0.436", 0.0, harmonic_contrast},
      {5, "fused uncertainty monotone in conflict", 0.0, monotone_in_conflict},
      {6, "evidence mapping conserves and partitions", 0.0, mapping},
      {7, "loss exact values", 0.0, loss_exactness},
      {8, "loss gradients match finite differences", 5.0, gradients},
      {9, "special functions", 0.0, special_functions},
      {10, "cmam accuracy >= average accuracy on 3 seeds", 120.0, ablation_direction},
      {11, "joint uncertainty increases with noise", 0.0, uncertainty_under_noise},
      {12, "identical configs give identical metrics.json", 0.0, determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      out.pass = false;
      out.detail += "; exceeded " + fmt("%.0f", c.time_limit) + " s";
    }
    failures += !out.pass;
    std::printf("%s  %2d  %-50s %8.3f s  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
