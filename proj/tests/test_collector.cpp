//
// Copyright 2026 The hdldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "hdldp/collector.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "hdldp/framework.hpp"
#include "oracles.hpp"

using namespace hdldp;

namespace {

// Deterministic pass-through used to test the pipeline plumbing without
// perturbation noise.
class IdentityMechanism final : public Mechanism {
 public:
  MechanismKind kind() const override { return MechanismKind::kLaplace; }
  double eps_per_dim() const override { return 1.0; }
  double input_min() const override { return -1.0; }
  double input_max() const override { return 1.0; }
  double output_min() const override { return -1.0; }
  double output_max() const override { return 1.0; }
  double perturb(double t, Rng&) const override { return t; }
  PerturbationStats stats(double) const override { return {0.0, 1e-300}; }
  double density(double, double) const override { return 0.0; }
  std::vector<double> output_breakpoints(double) const override { return {}; }
};

}  // namespace

TEST_CASE("sample_dimensions basics") {
  Rng rng(1);
  // m = d forces the full index set
  auto all = sample_dimensions(5, 5, rng);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::uint32_t>{0, 1, 2, 3, 4});

  auto some = sample_dimensions(100, 10, rng);
  CHECK(some.size() == 10);
  CHECK(std::set<std::uint32_t>(some.begin(), some.end()).size() == 10);
  for (auto j : some) CHECK(j < 100);

  CHECK_THROWS_AS(sample_dimensions(10, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_dimensions(10, 11, rng), std::invalid_argument);
}

TEST_CASE("sample_dimensions is uniform (chi-square at 1%)") {
  const std::size_t d = 100;
  const std::size_t draws = 1000000;
  Rng rng(1234);
  DimensionSampler sampler(d);
  std::vector<std::uint32_t> out;
  std::vector<double> counts(d, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    sampler.sample(1, rng, out);
    counts[out[0]] += 1.0;
  }
  const double expected = static_cast<double>(draws) / d;
  double chi2 = 0.0;
  for (double c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
    CHECK(std::fabs(c / draws - 0.01) < 0.0005);
  }
  CHECK(chi2 < oracle::kChiSquare99Dof1Pct);
}

TEST_CASE("sampler matches the one-shot function and restores state") {
  DimensionSampler sampler(50);
  std::vector<std::uint32_t> a, b;
  Rng r1(5), r2(5);
  sampler.sample(7, r1, a);
  b = sample_dimensions(50, 7, r2);
  CHECK(a == b);
  // a second draw from the same sampler matches a fresh one
  Rng r3(6), r4(6);
  sampler.sample(7, r3, a);
  b = sample_dimensions(50, 7, r4);
  CHECK(a == b);
}

TEST_CASE("perturb_record emits m distinct in-range reports") {
  std::vector<double> record(20);
  for (std::size_t j = 0; j < record.size(); ++j) {
    record[j] = -1.0 + 2.0 * static_cast<double>(j) / 19.0;
  }
  const MechanismSpec spec = MechanismSpec::make(MechanismKind::kPiecewise, 0.5);
  auto mech = make_mechanism(spec);
  Rng rng(3);
  const auto reports = perturb_record(record, *mech, 8, rng);
  CHECK(reports.size() == 8);
  std::set<std::uint32_t> dims;
  for (const auto& r : reports) {
    dims.insert(r.dim_index);
    CHECK(std::fabs(r.value) <= spec.bound);
  }
  CHECK(dims.size() == 8);

  CHECK_THROWS_AS(perturb_record(record, *mech, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(perturb_record(record, *mech, 21, rng), std::invalid_argument);
}

TEST_CASE("square wave reports stay within the mapped data-domain bound") {
  std::vector<double> record{-1.0, -0.2, 0.4, 1.0};
  const MechanismSpec spec =
      MechanismSpec::make(MechanismKind::kSquareWave, 0.3);
  auto mech = make_mechanism(spec);
  Rng rng(8);
  for (int rep = 0; rep < 5000; ++rep) {
    for (const auto& r : perturb_record(record, *mech, 4, rng)) {
      CHECK(std::fabs(r.value) <= spec.bound);
    }
  }
}

TEST_CASE("perturb_record is reproducible with a fixed stream") {
  std::vector<double> record{0.1, -0.5, 0.9};
  auto mech = make_mechanism(MechanismKind::kLaplace, 1.0);
  Rng a(21), b(21);
  const auto ra = perturb_record(record, *mech, 2, a);
  const auto rb = perturb_record(record, *mech, 2, b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i].dim_index == rb[i].dim_index);
    CHECK(ra[i].value == rb[i].value);
  }
}

TEST_CASE("aggregate means, counts and missing dimensions") {
  std::vector<Report> reports{{0, 1.0}, {0, -1.0}, {2, 0.5}};
  const AggregateResult res = aggregate(reports, 4);
  CHECK(res.theta_hat[0] == 0.0);
  CHECK(res.counts[0] == 2);
  CHECK(res.counts[1] == 0);
  CHECK(res.theta_hat[2] == 0.5);
  CHECK(res.missing == std::vector<std::size_t>{1, 3});

  AggregateState state(2);
  CHECK_THROWS_AS(state.accept(Report{5, 1.0}), std::out_of_range);
}

TEST_CASE("aggregation is order- and grouping-invariant bitwise") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::uniform_int_distribution<std::uint32_t> dim(0, 9);
  std::vector<Report> reports(20000);
  for (auto& r : reports) r = {dim(gen), value(gen)};

  const AggregateResult base = aggregate(reports, 10);
  CHECK(base.theta_hat.size() == 10);

  std::shuffle(reports.begin(), reports.end(), gen);
  const AggregateResult shuffled = aggregate(reports, 10);
  CHECK(base.theta_hat == shuffled.theta_hat);
  CHECK(base.counts == shuffled.counts);

  AggregateState left(10), mid(10), right(10);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    (i % 3 == 0 ? left : (i % 3 == 1 ? mid : right)).accept(reports[i]);
  }
  mid.merge(right);
  left.merge(mid);
  const AggregateResult merged = aggregate(left);
  CHECK(base.theta_hat == merged.theta_hat);

  // total reports add up
  CHECK(left.total_reports() == static_cast<std::int64_t>(reports.size()));
}

TEST_CASE("identity mechanism with m=d recovers the column means exactly") {
  const std::size_t n = 200, d = 6;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<std::vector<double>> data(n, std::vector<double>(d));
  for (auto& row : data) {
    for (auto& v : row) v = value(gen);
  }
  IdentityMechanism identity;
  AggregateState state(d);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(77, {i});
    for (const auto& r : perturb_record(data[i], identity, d, rng)) {
      state.accept(r);
    }
  }
  const AggregateResult res = aggregate(state);
  for (std::size_t j = 0; j < d; ++j) {
    ExactSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(data[i][j]);
    CHECK(res.theta_hat[j] == acc.value() / static_cast<double>(n));
    CHECK(res.counts[j] == static_cast<std::int64_t>(n));
  }
}

TEST_CASE("full laplace pipeline deviation obeys the variance bound") {
  // uniform data, eps = 1 split over all m = d = 10 dimensions, n = 1e5
  const std::size_t n = 100000, d = 10;
  Rng data_rng(2);
  std::vector<double> record(d);
  std::vector<double> col_sum(d, 0.0);
  auto mech = make_mechanism(MechanismKind::kLaplace, 1.0 / 10.0);
  AggregateState state(d);
  std::vector<ExactSum> truth(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      record[j] = data_rng.uniform(-1.0, 1.0);
      truth[j].add(record[j]);
    }
    Rng rng(3000, {i});
    for (const auto& r : perturb_record(record, *mech, d, rng)) state.accept(r);
  }
  const AggregateResult res = aggregate(state);
  const double lambda = 2.0 * 10.0 / 1.0;  // 2m/eps
  const double bound = 4.0 * std::sqrt(2.0 * lambda * lambda /
                                       static_cast<double>(n));
  for (std::size_t j = 0; j < d; ++j) {
    const double theta_bar = truth[j].value() / static_cast<double>(n);
    CHECK(std::fabs(res.theta_hat[j] - theta_bar) <= bound);
  }
}

TEST_CASE("expected report count per dimension is n*m/d") {
  const std::size_t n = 20000, d = 40, m = 8;
  DimensionSampler sampler(d);
  std::vector<std::uint32_t> out;
  std::vector<std::int64_t> counts(d, 0);
  Rng rng(6);
  for (std::size_t i = 0; i < n; ++i) {
    sampler.sample(m, rng, out);
    for (auto j : out) ++counts[j];
  }
  std::int64_t total = 0;
  const double expected = static_cast<double>(n * m) / d;
  for (auto c : counts) {
    total += c;
    // 5-sigma band around nm/d under binomial sampling
    const double sd = std::sqrt(expected * (1.0 - static_cast<double>(m) / d));
    CHECK(std::fabs(static_cast<double>(c) - expected) < 5.0 * sd);
  }
  CHECK(total == static_cast<std::int64_t>(n * m));
}

TEST_CASE("calibration") {
  const MechanismSpec lap = MechanismSpec::make(MechanismKind::kLaplace, 1.0);
  const std::vector<double> theta{0.1, -0.2, 0.3};
  CHECK(calibrate(theta, lap) == theta);

  // piecewise is unbiased: prior-averaged bias is zero, calibration is a
  // no-op even with a prior
  const MechanismSpec pw = MechanismSpec::make(MechanismKind::kPiecewise, 0.001);
  ValueDistribution tenths;
  for (int k = 1; k <= 10; ++k) {
    tenths.values.push_back(0.1 * k);
    tenths.probs.push_back(0.1);
  }
  CHECK(prior_mean_bias(pw, tenths) == 0.0);
  std::vector<ValueDistribution> priors{tenths, tenths, tenths};
  CHECK(calibrate(theta, pw, &priors) == theta);

  // square wave under the case-study prior: native bias -0.0499.., doubled
  // in the data domain and subtracted
  const MechanismSpec sw =
      MechanismSpec::make(MechanismKind::kSquareWave, 0.001);
  const double bias = prior_mean_bias(sw, tenths);
  CHECK(bias / 2.0 == doctest::Approx(-0.049975008331250535).epsilon(1e-12));
  const auto calibrated = calibrate(theta, sw, &priors);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    CHECK(calibrated[j] == doctest::Approx(theta[j] - bias).epsilon(1e-15));
  }

  // without a prior the bounded estimate passes through unchanged
  CHECK(calibrate(theta, sw) == theta);
  std::vector<ValueDistribution> short_priors{tenths};
  CHECK_THROWS_AS(calibrate(theta, sw, &short_priors), std::invalid_argument);
}

TEST_CASE("report stream csv round-trip") {
  std::vector<Report> reports{{0, 0.5}, {3, -1.25}, {2, 1e-17}};
  const auto path =
      (std::filesystem::temp_directory_path() / "hdldp_reports.csv").string();
  save_reports_csv(reports, path);
  const auto back = load_reports_csv(path);
  REQUIRE(back.size() == reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(back[i].dim_index == reports[i].dim_index);
    CHECK(back[i].value == reports[i].value);
  }
  std::filesystem::remove(path);
}
