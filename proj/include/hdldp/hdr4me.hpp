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

#ifndef HDLDP_HDR4ME_HPP_
#define HDLDP_HDR4ME_HPP_

#include <span>
#include <string>
#include <vector>

#include "hdldp/framework_types.hpp"
#include "json.hpp"

namespace hdldp {

// HDR4ME: one-off re-calibration of an aggregated mean. The regularization
// weights come from the deviation model; the solvers are the closed-form
// proximal steps, so no iteration happens at the collector.

enum class Regularizer { kNone, kL1, kL2 };

std::string to_string(Regularizer reg);
Regularizer regularizer_from_string(const std::string& name);

struct RecalibrationConfig {
  Regularizer regularizer = Regularizer::kNone;
  // Multiplier on sigma in the operational deviation bound |delta| + kappa *
  // sigma. The Gaussian model has unbounded support, so the tolerated
  // supremum is a chosen quantile rather than a literal maximum.
  double kappa = 3.0;
  // Skip re-calibration in dimensions whose deviation bound cannot clear the
  // enhancement threshold (1 for L1, 2 for L2); there re-calibration is
  // known to be capable of hurting.
  bool apply_threshold = true;
  // Floor for |theta| in the L2 weight denominator.
  double clamp = 0.05;

  nlohmann::json to_json() const;
  static RecalibrationConfig from_json(const nlohmann::json& j);
};

/// Operational stand-in for sup|deviation|: |delta| + kappa * sigma.
double operational_sup(const DimensionDeviation& dim, double kappa);

/// Per-dimension L1 weights: the operational deviation bound, gated to 0
/// (pass-through) when it cannot exceed 1.
std::vector<double> l1_weights(const DeviationModel& model, double kappa,
                               bool apply_threshold = true);

/// Per-dimension L2 weights: bound / (2 * max(|proxy|, clamp)), gated to 0
/// when the bound cannot exceed 2. The proxy approximates the unknown true
/// mean, typically the bias-corrected estimate.
std::vector<double> l2_weights(const DeviationModel& model,
                               std::span<const double> theta_bar_proxy,
                               double kappa, double clamp,
                               bool apply_threshold = true);

/// Exact soft-thresholding: theta_j - lambda_j, 0, or theta_j + lambda_j
/// depending on where theta_j sits relative to +-lambda_j.
std::vector<double> recalibrate_l1(std::span<const double> theta_hat,
                                   std::span<const double> weights);

/// Coordinatewise shrinkage theta_j / (2 lambda_j + 1).
std::vector<double> recalibrate_l2(std::span<const double> theta_hat,
                                   std::span<const double> weights);

/// Lower bound on the probability that re-calibration improves the Euclidean
/// deviation: 1 - P(every |deviation_j| <= c), with c = 1 for L1 and c = 2
/// for L2.
double improvement_probability(const DeviationModel& model, Regularizer reg);

/// The minimized objective, used by tests as the optimality oracle:
/// 0.5 * ||theta - theta_hat||^2 plus sum_j lambda_j |theta_j| (L1) or
/// sum_j lambda_j theta_j^2 (L2).
double objective(std::span<const double> theta, std::span<const double> theta_hat,
                 std::span<const double> weights, Regularizer reg);

/// Weights plus the recalibrated estimate for one configuration; `gated`
/// flags dimensions passed through untouched.
struct RecalibrationResult {
  std::vector<double> theta_star;
  std::vector<double> weights;
  std::vector<bool> gated;

  nlohmann::json to_json() const;
};

RecalibrationResult recalibrate(std::span<const double> theta_hat,
                                const DeviationModel& model,
                                const RecalibrationConfig& config);

}  // namespace hdldp

#endif  // HDLDP_HDR4ME_HPP_
