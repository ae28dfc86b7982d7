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

#ifndef HDLDP_COLLECTOR_HPP_
#define HDLDP_COLLECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdldp/exact_sum.hpp"
#include "hdldp/framework_types.hpp"
#include "hdldp/mechanisms.hpp"
#include "hdldp/rng.hpp"
#include "json.hpp"

namespace hdldp {

/// One perturbed value reported for one dimension. Values live in the [-1,1]
/// data domain: Square Wave reports are mapped back from the unit interval
/// before they are emitted, so |value| <= spec.bound for bounded mechanisms.
struct Report {
  std::uint32_t dim_index = 0;
  double value = 0.0;
};

/// Uniformly random m-subset of {0,...,d-1}. Each index has marginal
/// probability m/d.
std::vector<std::uint32_t> sample_dimensions(std::size_t d, std::size_t m,
                                             Rng& rng);

/// Repeated-use sampler that avoids reallocating per call. Draws are
/// identical to sample_dimensions given the same rng stream.
class DimensionSampler {
 public:
  explicit DimensionSampler(std::size_t d);
  void sample(std::size_t m, Rng& rng, std::vector<std::uint32_t>& out);

 private:
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> touched_;
};

/// Client-side step: samples m distinct dimensions of `record` and perturbs
/// each with the mechanism. `record` must lie in [-1,1]^d and the spec's
/// eps_per_dim must already be the per-dimension share of the total budget.
std::vector<Report> perturb_record(std::span<const double> record,
                                   const Mechanism& mechanism, std::size_t m,
                                   Rng& rng);

/// Collector-side accumulation of reports. Sums are exact, so aggregation is
/// a commutative monoid: any report order and any merge grouping produce the
/// same estimate bitwise.
class AggregateState {
 public:
  explicit AggregateState(std::size_t d);

  void accept(const Report& report);
  void accept(std::span<const Report> reports);
  void merge(const AggregateState& other);

  std::size_t dimensions() const { return sums_.size(); }
  std::int64_t count(std::size_t dim) const { return counts_[dim]; }
  std::int64_t total_reports() const;

  /// Mean of dimension `dim`; empty when no report arrived there.
  std::optional<double> mean(std::size_t dim) const;

 private:
  std::vector<ExactSum> sums_;
  std::vector<std::int64_t> counts_;
};

/// Estimated mean with per-dimension report counts. Dimensions that received
/// no report are listed in `missing` and their theta_hat entry is 0.
struct AggregateResult {
  std::vector<double> theta_hat;
  std::vector<std::int64_t> counts;
  std::vector<std::size_t> missing;

  nlohmann::json to_json() const;
  static AggregateResult from_json(const nlohmann::json& j);
};

AggregateResult aggregate(const AggregateState& state);
AggregateResult aggregate(std::span<const Report> reports, std::size_t d);

/// Mean bias of one report in the [-1,1] data domain under the given prior
/// over original values (prior in the mechanism's native input domain).
double prior_mean_bias(const MechanismSpec& spec,
                       const ValueDistribution& prior);

/// Collector-side calibration. Unbounded mechanisms subtract the (zero-mean)
/// noise expectation, i.e. the estimate is unchanged. Bounded mechanisms
/// subtract the prior-averaged bias per dimension when a prior is supplied
/// and are left untouched otherwise.
std::vector<double> calibrate(
    const std::vector<double>& theta_hat, const MechanismSpec& spec,
    const std::vector<ValueDistribution>* priors = nullptr);

/// Report stream CSV: header `dim_index,value`, one report per line.
void save_reports_csv(std::span<const Report> reports,
                      const std::string& path);
std::vector<Report> load_reports_csv(const std::string& path);

}  // namespace hdldp

#endif  // HDLDP_COLLECTOR_HPP_
