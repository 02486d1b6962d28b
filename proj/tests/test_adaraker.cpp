#include <doctest.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "raker/adaraker.hpp"
#include "raker/errors.hpp"
#include "test_util.hpp"

using namespace raker;
using raker::testing::uniform_vector;

namespace {

std::vector<KernelSpec> dictionary(std::size_t d) {
  return {{KernelFamily::Gaussian, 0.1, d}, {KernelFamily::Gaussian, 1.0, d},
          {KernelFamily::Gaussian, 10.0, d}};
}

// Every block of every level on [1, horizon]: level j covers
// [2^j, 2^(j+1) - 1], [2^(j+1), ...], ... with length 2^j.
std::vector<Interval> brute_force_grid(std::uint64_t horizon) {
  std::vector<Interval> all;
  for (unsigned j = 0; (std::uint64_t{1} << j) <= horizon; ++j) {
    const std::uint64_t len = std::uint64_t{1} << j;
    for (std::uint64_t s = len; s <= horizon; s += len) all.push_back({s, s + len - 1, j});
  }
  return all;
}

}  // namespace

TEST_CASE("active_intervals examples") {
  CHECK(active_intervals(1) == std::vector<Interval>{{1, 1, 0}});
  CHECK(active_intervals(7) == std::vector<Interval>{{7, 7, 0}, {6, 7, 1}, {4, 7, 2}});
  CHECK(active_intervals(8) ==
        std::vector<Interval>{{8, 8, 0}, {8, 9, 1}, {8, 11, 2}, {8, 15, 3}});
  CHECK_THROWS(active_intervals(0));
}

TEST_CASE("property: active_intervals matches brute-force enumeration up to 2^10") {
  const std::uint64_t horizon = 1 << 10;
  const auto grid = brute_force_grid(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    std::vector<Interval> expected;
    for (const auto& interval : grid) {
      if (interval.contains(t)) expected.push_back(interval);
    }
    std::sort(expected.begin(), expected.end(),
              [](const Interval& a, const Interval& b) { return a.level < b.level; });
    const auto got = active_intervals(t);
    CHECK(got == expected);
    CHECK(got.size() == static_cast<std::size_t>(std::bit_width(t)));
    for (const auto& interval : got) CHECK(std::has_single_bit(interval.length()));
  }
}

TEST_CASE("interval_rate") {
  CHECK(interval_rate(1.0, {1, 1, 0}) == 0.5);
  CHECK(interval_rate(1.0, {16, 31, 4}) == doctest::Approx(0.25));
  CHECK(interval_rate(10.0, {256, 511, 8}) == 0.5);
  CHECK(interval_rate(10.0, {1024, 2047, 10}) == doctest::Approx(10.0 / 32.0));
}

TEST_CASE("an instance votes with h = eta_I from its second slot") {
  const std::size_t d = 2;
  const auto kernels = dictionary(d);
  AdaRaker ada(kernels, {.num_features = 8, .eta0 = 1.0, .seed = 1});
  std::mt19937_64 rng(2);
  for (std::uint64_t t = 1; t <= 16; ++t) ada.update(uniform_vector(rng, d), uniform_vector(rng, 1)[0]);
  REQUIRE(ada.now() == 17);
  const auto live = ada.live_intervals();
  REQUIRE(live == active_intervals(17));
  const auto log_h = ada.log_ensemble_weights();
  const auto hbar = ada.normalized_weights();
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (live[i].start == 17) {
      CHECK(std::isinf(log_h[i]));
      CHECK(hbar[i] == 0.0);
    } else {
      REQUIRE(live[i].start == 16);
      CHECK(std::exp(log_h[i]) == doctest::Approx(std::min(0.5, 1.0 / std::sqrt(live[i].length()))));
      CHECK(ada.instance_rate(i) == doctest::Approx(interval_rate(1.0, live[i])));
    }
  }
}

TEST_CASE("predict: singleton and uniform mixtures") {
  const std::size_t d = 2;
  const auto kernels = dictionary(d);
  AdaRaker ada(kernels, {.num_features = 8, .seed = 3});
  const std::vector<double> x{0.3, 0.6};
  const auto first = ada.predict(x);
  REQUIRE(first.instance_predictions.size() == 1);
  CHECK(first.prediction == first.instance_predictions[0]);
  CHECK(first.normalized_weights == std::vector<double>{1.0});

  // At t = 2 the fresh instances [2,2] and [2,3] both start at h = 1/2.
  ada.update(x, 1.0);
  const auto second = ada.predict(x);
  REQUIRE(second.instance_predictions.size() == 2);
  CHECK(second.normalized_weights == std::vector<double>{0.5, 0.5});
  CHECK(second.prediction == doctest::Approx((second.instance_predictions[0] +
                                              second.instance_predictions[1]) / 2.0));
}

TEST_CASE("property: weights normalized and instance count bounded over 1000 slots") {
  const std::size_t d = 3;
  const auto kernels = dictionary(d);
  AdaRaker ada(kernels, {.num_features = 10, .eta0 = 10.0, .seed = 4});
  std::mt19937_64 rng(5);
  for (std::uint64_t t = 1; t <= 1000; ++t) {
    const auto x = uniform_vector(rng, d);
    const double y = std::sin(4 * x[0]) * 0.5 + 0.5;
    const auto live = ada.live_intervals();
    CHECK(live == active_intervals(t));
    const auto report = ada.update(x, y);
    CHECK(report.t == t);
    const double s = std::accumulate(report.normalized_weights.begin(), report.normalized_weights.end(), 0.0);
    CHECK(std::abs(s - 1.0) <= 1e-12);
    CHECK(report.intervals.size() == static_cast<std::size_t>(std::bit_width(t)));
    // Only instances on their first slot carry h = 0.
    const auto after = ada.live_intervals();
    const auto log_h = ada.log_ensemble_weights();
    for (std::size_t i = 0; i < after.size(); ++i) {
      CHECK(std::isfinite(log_h[i]) == (after[i].start != t + 1));
    }
    double mix = 0.0;
    for (std::size_t i = 0; i < report.intervals.size(); ++i) {
      mix += report.normalized_weights[i] * report.instance_predictions[i];
    }
    CHECK(report.prediction == doctest::Approx(mix).epsilon(1e-12));
  }
}

TEST_CASE("lifecycle: an instance sees exactly the slots of its interval") {
  // The level-2 instance [4, 7] is created at t = 4 and has taken 4 steps
  // when it is dropped; at t = 7 it has seen slots 4..6.
  const std::size_t d = 2;
  const auto kernels = dictionary(d);
  AdaRaker ada(kernels, {.num_features = 6, .seed = 6});
  std::mt19937_64 rng(7);
  for (std::uint64_t t = 1; t <= 6; ++t) ada.update(uniform_vector(rng, d), 0.5);
  const auto live = ada.live_intervals();
  REQUIRE(live == active_intervals(7));
  for (std::size_t i = 0; i < live.size(); ++i) {
    CHECK(ada.instance(i).t() == 7 - live[i].start);
  }
}

TEST_CASE("degenerate single interval equals a plain Raker bit for bit") {
  const std::size_t d = 3;
  const std::uint64_t horizon = 400;
  const auto kernels = dictionary(d);
  const auto maps = make_feature_maps(kernels, 12, FeatureVariant::RF, 8);
  AdaRaker ada(maps, {.eta0 = 1.0, .loss = {LossKind::SquaredError, 0.01},
                      .single_interval_horizon = horizon});
  const double eta = interval_rate(1.0, {1, horizon, 0});
  Raker raker(maps, {.eta_theta = eta, .eta_weight = eta, .loss = {LossKind::SquaredError, 0.01}});
  std::mt19937_64 rng(9);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const auto x = uniform_vector(rng, d);
    const double y = x[1] * x[2];
    CHECK(ada.predict(x).prediction == raker.predict(x).prediction);
    ada.update(x, y);
    raker.update(x, y);
  }
}

TEST_CASE("equal instance losses leave h unchanged") {
  // With every learner frozen at theta = 0 (y = 0 and lambda = 0), every
  // instance predicts 0 and incurs the ensemble's loss, so r = 0. Track
  // [4, 7]: it votes from slot 5 on and is index 2 at slots 5 and 6.
  const std::size_t d = 2;
  const auto kernels = dictionary(d);
  AdaRaker ada(kernels, {.num_features = 5, .seed = 10});
  std::mt19937_64 rng(11);
  for (int t = 1; t <= 4; ++t) ada.update(uniform_vector(rng, d), 0.0);
  REQUIRE(ada.live_intervals()[2] == Interval{4, 7, 2});
  const double before = ada.log_ensemble_weights()[2];
  CHECK(before == std::log(0.5));
  ada.update(uniform_vector(rng, d), 0.0);
  REQUIRE(ada.live_intervals()[2] == Interval{4, 7, 2});
  CHECK(ada.log_ensemble_weights()[2] == before);
}

TEST_CASE("first slot: a fresh instance trains but does not vote") {
  const std::vector<KernelSpec> kernels{{KernelFamily::Gaussian, 1.0, 1}};
  AdaRaker ada(kernels, {.num_features = 10, .seed = 13});
  const std::vector<double> x{0.5};
  ada.update(x, 1.0);  // t = 1
  ada.update(x, 1.0);  // t = 2
  // t = 3: [3,3] is fresh, [2,3] voted nothing yet but has h = eta_I now.
  const auto pred = ada.predict(x);
  REQUIRE(pred.intervals == std::vector<Interval>{{3, 3, 0}, {2, 3, 1}});
  CHECK(pred.normalized_weights == std::vector<double>{0.0, 1.0});
  CHECK(pred.prediction == pred.instance_predictions[1]);
  CHECK(pred.prediction != 0.0);
}

TEST_CASE("relative-loss sign: literal rule shrinks h of a better-than-ensemble instance") {
  // Constant (x, y = 1), one kernel. At t = 9 the voters [8,9], [8,11] and
  // [8,15] have each taken one step; the first two (rate 1/2) predict y
  // exactly while [8,15] (rate 1/sqrt(8)) undershoots. So [8,11] beats the
  // ensemble: the literal rule lowers its h and the flipped rule raises it.
  const std::vector<KernelSpec> kernels{{KernelFamily::Gaussian, 1.0, 1}};
  const std::vector<double> x{0.5};
  for (bool flip : {false, true}) {
    AdaRaker ada(kernels, {.num_features = 20, .eta0 = 1.0, .seed = 12, .flip_relative_loss = flip});
    for (int t = 1; t <= 8; ++t) ada.update(x, 1.0);
    REQUIRE(ada.live_intervals()[2] == Interval{8, 11, 2});
    const double before = ada.log_ensemble_weights()[2];
    const auto report = ada.update(x, 1.0);
    REQUIRE(report.instance_losses[2] < report.overall_loss);
    REQUIRE(ada.live_intervals()[2] == Interval{8, 11, 2});
    const double after = ada.log_ensemble_weights()[2];
    const double r = report.overall_loss - report.instance_losses[2];
    CHECK(after == doctest::Approx(before - 0.5 * (flip ? -r : r)).epsilon(1e-14));
    if (flip) {
      CHECK(after > before);
    } else {
      CHECK(after < before);
    }
  }
}

TEST_CASE("invalid inputs raise") {
  const auto kernels = dictionary(2);
  AdaRaker ada(kernels, {.num_features = 4});
  CHECK_THROWS_AS(ada.predict(std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS(AdaRaker(kernels, {.eta0 = 0.0}));
}
