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

#ifndef HDLDP_FRAMEWORK_HPP_
#define HDLDP_FRAMEWORK_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "hdldp/framework_types.hpp"
#include "hdldp/mechanisms.hpp"

namespace hdldp {

/// Standard normal CDF via erfc; absolute error well below 1e-15.
double normal_cdf(double x);

/// P(a <= Z <= b) for standard normal Z, stable in both tails.
double normal_interval_mass(double a, double b);

/// Gaussian model of the per-report estimation deviation for one dimension
/// at expected report count r.
///
/// Unbounded mechanisms: delta = E(noise) = 0 and sigma2 = Var(noise)/r; the
/// value distribution is ignored. Bounded mechanisms: bias and variance
/// depend on the original value, so delta and sigma2 are averaged over the
/// supplied distribution of original values (mandatory in that case).
///
/// The result lives in the mechanism's native domain; use to_data_space()
/// for estimates carried in [-1,1].
DimensionDeviation deviation_model(const MechanismSpec& spec,
                                   const ValueDistribution* value_dist,
                                   double r);
DimensionDeviation deviation_model(const MechanismSpec& spec,
                                   const ValueDistribution& value_dist,
                                   double r);

/// d-dimensional model with one value distribution per dimension (pass an
/// empty span for unbounded mechanisms).
DeviationModel build_deviation_model(
    const MechanismSpec& spec, std::span<const ValueDistribution> value_dists,
    std::size_t d, double r);

/// Rescales a native-domain model into the [-1,1] data domain (bias doubles,
/// variance quadruples for unit-interval mechanisms; identity otherwise).
DimensionDeviation to_data_space(const DimensionDeviation& dim,
                                 const MechanismSpec& spec);
DeviationModel to_data_space(const DeviationModel& model,
                             const MechanismSpec& spec);

/// Joint density of the deviation vector at x (product of per-dimension
/// Gaussians). Computed in log space internally; the log variant is exposed
/// for high dimension counts where the density itself underflows.
double deviation_pdf(const DeviationModel& model, std::span<const double> x);
double log_deviation_pdf(const DeviationModel& model,
                         std::span<const double> x);

/// Probability that |deviation_j| <= xi_j holds simultaneously in every
/// dimension.
double supremum_probability(const DeviationModel& model,
                            std::span<const double> xi);
double supremum_probability(const DimensionDeviation& dim, double xi);

/// Upper bound on the gap between the true deviation CDF and its Gaussian
/// approximation at report count r (Berry-Esseen form). The third absolute
/// moment is closed-form for Laplace and integrated from the output density
/// for bounded mechanisms.
double berry_esseen_bound(const MechanismSpec& spec,
                          const ValueDistribution* value_dist, double r);

/// Equal-width histogram of samples as a discrete value distribution: bin
/// midpoints with empirical frequencies. Identical samples collapse to a
/// single atom.
ValueDistribution discretize(std::span<const double> samples,
                             std::size_t bins);

}  // namespace hdldp

#endif  // HDLDP_FRAMEWORK_HPP_
