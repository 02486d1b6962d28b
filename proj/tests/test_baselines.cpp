#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "raker/baselines.hpp"
#include "raker/errors.hpp"
#include "raker/learner.hpp"
#include "test_util.hpp"

using namespace raker;
using raker::testing::normal_vector;
using raker::testing::uniform_vector;

TEST_CASE("exact predict examples") {
  const KernelSpec spec{KernelFamily::Gaussian, 1.0, 2};
  SupportSet set(spec);
  const std::vector<double> x0{0.0, 0.0}, x1{1.0, 0.0}, q{0.5, 0.5};
  CHECK(set.predict(q) == 0.0);

  const LossSpec ls{LossKind::SquaredError, 0.0};
  set.step(ls, x0, 0.5, 1.0);  // alpha = -1 * 2 * (0 - 0.5) = 1
  REQUIRE(set.size() == 1);
  CHECK(set.alphas()[0] == doctest::Approx(1.0));
  CHECK(set.predict(x0) == doctest::Approx(1.0));

  // Second center: f(x1) = exp(-1/2); alpha = -0.5 * 2 * (exp(-1/2) - 2).
  set.step(ls, x1, 2.0, 0.5);
  const double a1 = -(std::exp(-0.5) - 2.0);
  CHECK(set.alphas()[1] == doctest::Approx(a1));
  // Hand sum at q: |q - x0|^2 = 0.5, |q - x1|^2 = 0.5.
  CHECK(set.predict(q) == doctest::Approx(std::exp(-0.25) * (1.0 + a1)));
  CHECK_THROWS_AS(set.predict(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("exact step examples") {
  const KernelSpec spec{KernelFamily::Gaussian, 1.0, 1};
  const LossSpec ls{LossKind::SquaredError, 0.0};
  SUBCASE("first step: alpha = 0.2") {
    SupportSet set(spec);
    set.step(ls, std::vector<double>{0.3}, 1.0, 0.1);
    REQUIRE(set.size() == 1);
    CHECK(set.alphas()[0] == doctest::Approx(0.2));
  }
  SUBCASE("zero residual adds nothing") {
    SupportSet set(spec);
    set.step(ls, std::vector<double>{0.3}, 1.0, 0.1);
    const std::vector<double> x{0.8};
    set.step(ls, x, set.predict(x), 0.1);
    CHECK(set.size() == 1);
    CHECK(set.alphas()[0] == doctest::Approx(0.2));
  }
  SUBCASE("regularizer shrinks coefficients") {
    SupportSet set(spec);
    const LossSpec reg{LossKind::SquaredError, 0.5};
    set.step(reg, std::vector<double>{0.3}, 1.0, 0.1);
    const std::vector<double> x{0.8};
    set.step(reg, x, set.predict(x), 0.1);
    CHECK(set.alphas()[0] == doctest::Approx(0.2 * (1 - 2 * 0.1 * 0.5)));
  }
}

TEST_CASE("budget: FIFO eviction, never exceeded") {
  const KernelSpec spec{KernelFamily::Laplacian, 1.0, 2};
  const LossSpec ls{LossKind::SquaredError, 0.01};
  SupportSet set(spec, 2);
  std::mt19937_64 rng(1);
  for (std::size_t i = 0; i < 50; ++i) {
    set.step(ls, uniform_vector(rng, 2), 1.0 + static_cast<double>(i), 0.1);
    CHECK(set.size() <= 2);
    const auto ids = set.insertion_ids();
    if (set.size() == 2) CHECK(ids[0] + 1 == ids[1]);
    CHECK(ids.back() == i);
  }
  CHECK_THROWS(SupportSet(spec, 0));
}

TEST_CASE("incremental RKHS norm tracks the exact quadratic form") {
  const KernelSpec spec{KernelFamily::Gaussian, 0.5, 3};
  const LossSpec ls{LossKind::SquaredError, 0.05};
  for (std::optional<std::size_t> budget : {std::optional<std::size_t>{}, std::optional<std::size_t>{7}}) {
    SupportSet set(spec, budget);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 60; ++i) {
      set.step(ls, uniform_vector(rng, 3), uniform_vector(rng, 1)[0], 0.2);
      CHECK(set.sq_norm() == doctest::Approx(set.sq_norm_exact()).epsilon(1e-9));
    }
  }
}

TEST_CASE("OMKL: uniform start, symmetry and single-kernel reduction") {
  const std::size_t d = 2;
  const std::vector<KernelSpec> kernels{{KernelFamily::Gaussian, 1.0, d}};
  Omkl single(kernels, {.eta_theta = 0.1});
  SupportSet reference(kernels[0]);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto x = uniform_vector(rng, d);
    const double y = uniform_vector(rng, 1)[0];
    CHECK(single.predict(x).prediction == reference.predict(x));
    single.update(x, y);
    reference.step(LossSpec{}, x, y, 0.1);
  }
  CHECK(single.normalized_weights() == std::vector<double>{1.0});

  // Two copies of the same kernel always have equal losses.
  const std::vector<KernelSpec> twins{kernels[0], kernels[0]};
  Omkl pair(twins, {.eta_theta = 0.1});
  for (int t = 0; t < 30; ++t) pair.update(uniform_vector(rng, d), uniform_vector(rng, 1)[0]);
  CHECK(pair.normalized_weights()[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("OMKL reports satisfy the simplex and Jensen bounds") {
  const std::size_t d = 3;
  const std::vector<KernelSpec> kernels{{KernelFamily::Gaussian, 0.1, d},
                                        {KernelFamily::Laplacian, 1.0, d},
                                        {KernelFamily::Cauchy, 1.0, d}};
  Omkl omkl(kernels, {.eta_theta = 0.1, .loss = {LossKind::SquaredError, 0.01}, .budget = 20});
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto x = uniform_vector(rng, d);
    const auto report = omkl.update(x, x[0] * x[1]);
    double avg = 0.0, s = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      avg += report.normalized_weights[p] * report.per_kernel_losses[p];
      s += report.normalized_weights[p];
    }
    CHECK(report.combined_loss <= avg + 1e-9);
    CHECK(std::abs(s - 1.0) <= 1e-12);
    for (const auto& set : omkl.support_sets()) CHECK(set.size() <= 20);
  }
}

TEST_CASE("RF learner converges to the exact-kernel learner as D grows") {
  const std::size_t d = 2, n = 200;
  const KernelSpec spec{KernelFamily::Gaussian, 1.0, d};
  const LossSpec ls{LossKind::SquaredError, 0.01};
  const double eta = 0.1;
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> xs(n);
  std::vector<double> ys(n);
  for (std::size_t t = 0; t < n; ++t) {
    xs[t] = uniform_vector(rng, d);
    ys[t] = std::sin(3 * xs[t][0]) + xs[t][1];
  }
  SupportSet exact(spec);
  std::vector<double> exact_preds(n);
  for (std::size_t t = 0; t < n; ++t) {
    exact_preds[t] = exact.predict(xs[t]);
    exact.step(ls, xs[t], ys[t], eta);
  }
  // Average the max deviation over a few feature-map seeds to smooth out
  // single-draw noise.
  double previous = INFINITY;
  for (std::size_t num : {100u, 400u, 1600u}) {
    double gap = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto map = std::make_shared<const FeatureMap>(FeatureMap::sample(spec, num, FeatureVariant::RF, seed));
      KernelLearner rf(map, {.eta = eta, .loss = ls});
      double worst = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const auto z = map->map(xs[t]);
        worst = std::max(worst, std::abs(rf.predict(z) - exact_preds[t]));
        rf.step(z, ys[t]);
      }
      gap += worst / 5.0;
    }
    CAPTURE(num);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("unbudgeted per-step cost grows with t") {
  const std::size_t d = 10;
  const KernelSpec spec{KernelFamily::Gaussian, 1.0, d};
  SupportSet set(spec);
  std::mt19937_64 rng(6);
  const auto xs = normal_vector(rng, 2200 * d);
  const LossSpec ls{};
  const auto time_steps = [&](std::size_t from, std::size_t count) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = from; i < from + count; ++i) {
      set.step(ls, std::span<const double>(xs).subspan(i * d, d), 1.0, 0.01);
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  time_steps(0, 180);
  const double early = time_steps(180, 40);
  time_steps(220, 1760);
  const double late = time_steps(1980, 40);
  CHECK(set.size() > 2000);
  CHECK(late > 2.0 * early);
}
