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

#include "hdldp/framework.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdldp/exact_sum.hpp"

namespace hdldp {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

// Exact single-interval Simpson; the integrands below are piecewise cubic.
template <typename F>
double simpson(const F& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

// Third absolute moment E|t* - center|^3 of one bounded perturbation,
// integrated segment by segment between density breakpoints. Including
// `center` as a breakpoint makes every segment a cubic polynomial, which
// Simpson integrates exactly.
double third_abs_moment(const Mechanism& mechanism, double t, double center) {
  std::vector<double> cuts = mechanism.output_breakpoints(t);
  cuts.push_back(center);
  cuts.push_back(mechanism.output_min());
  cuts.push_back(mechanism.output_max());
  std::sort(cuts.begin(), cuts.end());

  const auto abs_cubed = [&](double x) {
    const double u = x - center;
    return std::fabs(u * u * u);
  };
  ExactSum acc;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = std::max(cuts[k], mechanism.output_min());
    const double b = std::min(cuts[k + 1], mechanism.output_max());
    if (b <= a) continue;
    // The density is constant between breakpoints; sampling it at the
    // midpoint stays off the jumps.
    const double level = mechanism.density(t, 0.5 * (a + b));
    acc.add(level * simpson(abs_cubed, a, b));
  }
  return acc.value();
}

}  // namespace

void ValueDistribution::validate() const {
  if (values.empty() || values.size() != probs.size()) {
    throw std::invalid_argument(
        "value distribution needs matching, non-empty support and probs");
  }
  ExactSum total;
  for (std::size_t z = 0; z < values.size(); ++z) {
    if (!std::isfinite(values[z])) {
      throw std::invalid_argument("value distribution support must be finite");
    }
    if (probs[z] < 0.0) {
      throw std::invalid_argument("value distribution probs must be >= 0");
    }
    total.add(probs[z]);
  }
  if (std::fabs(total.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("value distribution probs must sum to 1");
  }
}

nlohmann::json ValueDistribution::to_json() const {
  return {{"values", values}, {"probs", probs}};
}

ValueDistribution ValueDistribution::from_json(const nlohmann::json& j) {
  ValueDistribution vd;
  vd.values = j.at("values").get<std::vector<double>>();
  vd.probs = j.at("probs").get<std::vector<double>>();
  vd.validate();
  return vd;
}

ValueDistribution ValueDistribution::point(double value) {
  return {{value}, {1.0}};
}

nlohmann::json DeviationModel::to_json() const {
  std::vector<double> delta, sigma2, r;
  for (const auto& dim : dims) {
    delta.push_back(dim.delta);
    sigma2.push_back(dim.sigma2);
    r.push_back(dim.r);
  }
  return {{"delta", delta}, {"sigma2", sigma2}, {"r", r}};
}

DeviationModel DeviationModel::from_json(const nlohmann::json& j) {
  const auto delta = j.at("delta").get<std::vector<double>>();
  const auto sigma2 = j.at("sigma2").get<std::vector<double>>();
  const auto r = j.at("r").get<std::vector<double>>();
  if (delta.size() != sigma2.size() || delta.size() != r.size()) {
    throw std::invalid_argument("deviation model arrays must align");
  }
  DeviationModel model;
  for (std::size_t jdx = 0; jdx < delta.size(); ++jdx) {
    model.dims.push_back({delta[jdx], sigma2[jdx], r[jdx]});
  }
  return model;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_interval_mass(double a, double b) {
  if (a > b) return 0.0;
  // Work in the right tail, where erfc keeps full precision.
  if (a + b < 0.0) {
    const double tmp = a;
    a = -b;
    b = -tmp;
  }
  return 0.5 * (std::erfc(a / kSqrt2) - std::erfc(b / kSqrt2));
}

DimensionDeviation deviation_model(const MechanismSpec& spec,
                                   const ValueDistribution* value_dist,
                                   double r) {
  if (!(r > 0.0)) throw std::invalid_argument("report count r must be > 0");
  if (!spec.bounded) {
    const double lambda = 2.0 / spec.eps_per_dim;
    return {0.0, 2.0 * lambda * lambda / r, r};
  }
  if (value_dist == nullptr) {
    throw std::invalid_argument(
        "bounded mechanisms need a value distribution for the deviation "
        "model");
  }
  value_dist->validate();
  auto mechanism = make_mechanism(spec);
  ExactSum bias_acc;
  ExactSum var_acc;
  for (std::size_t z = 0; z < value_dist->values.size(); ++z) {
    const PerturbationStats st = mechanism->stats(value_dist->values[z]);
    bias_acc.add(value_dist->probs[z] * st.bias);
    var_acc.add(value_dist->probs[z] * st.variance);
  }
  return {bias_acc.value(), var_acc.value() / r, r};
}

DimensionDeviation deviation_model(const MechanismSpec& spec,
                                   const ValueDistribution& value_dist,
                                   double r) {
  return deviation_model(spec, &value_dist, r);
}

DeviationModel build_deviation_model(
    const MechanismSpec& spec, std::span<const ValueDistribution> value_dists,
    std::size_t d, double r) {
  if (spec.bounded && value_dists.size() != d) {
    throw std::invalid_argument("need one value distribution per dimension");
  }
  DeviationModel model;
  model.dims.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    const ValueDistribution* vd =
        value_dists.empty() ? nullptr : &value_dists[j];
    model.dims.push_back(deviation_model(spec, vd, r));
  }
  return model;
}

DimensionDeviation to_data_space(const DimensionDeviation& dim,
                                 const MechanismSpec& spec) {
  if (spec.kind != MechanismKind::kSquareWave) return dim;
  return {2.0 * dim.delta, 4.0 * dim.sigma2, dim.r};
}

DeviationModel to_data_space(const DeviationModel& model,
                             const MechanismSpec& spec) {
  DeviationModel out;
  out.dims.reserve(model.dims.size());
  for (const auto& dim : model.dims) out.dims.push_back(to_data_space(dim, spec));
  return out;
}

double log_deviation_pdf(const DeviationModel& model,
                         std::span<const double> x) {
  if (x.size() != model.dims.size()) {
    throw std::invalid_argument("point dimension does not match model");
  }
  ExactSum acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& dim = model.dims[j];
    if (!(dim.sigma2 > 0.0)) {
      throw std::invalid_argument("model variance must be positive");
    }
    const double sigma = std::sqrt(dim.sigma2);
    const double z = (x[j] - dim.delta) / sigma;
    acc.add(-0.5 * z * z - std::log(sigma) - kLogSqrt2Pi);
  }
  return acc.value();
}

double deviation_pdf(const DeviationModel& model, std::span<const double> x) {
  return std::exp(log_deviation_pdf(model, x));
}

double supremum_probability(const DimensionDeviation& dim, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
  const double sigma = std::sqrt(dim.sigma2);
  return normal_interval_mass((-xi - dim.delta) / sigma,
                              (xi - dim.delta) / sigma);
}

double supremum_probability(const DeviationModel& model,
                            std::span<const double> xi) {
  if (xi.size() != model.dims.size()) {
    throw std::invalid_argument("xi dimension does not match model");
  }
  ExactSum log_acc;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const double mass = supremum_probability(model.dims[j], xi[j]);
    if (mass <= 0.0) return 0.0;
    log_acc.add(std::log(mass));
  }
  return std::exp(log_acc.value());
}

double berry_esseen_bound(const MechanismSpec& spec,
                          const ValueDistribution* value_dist, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("report count r must be > 0");
  double rho = 0.0;
  double noise_var = 0.0;
  if (!spec.bounded) {
    const double lambda = 2.0 / spec.eps_per_dim;
    rho = 3.0 * lambda * lambda * lambda;
    noise_var = 2.0 * lambda * lambda;
  } else {
    if (value_dist == nullptr) {
      throw std::invalid_argument(
          "bounded mechanisms need a value distribution for the bound");
    }
    value_dist->validate();
    auto mechanism = make_mechanism(spec);
    ExactSum rho_acc;
    ExactSum var_acc;
    for (std::size_t z = 0; z < value_dist->values.size(); ++z) {
      const double v = value_dist->values[z];
      const PerturbationStats st = mechanism->stats(v);
      rho_acc.add(value_dist->probs[z] *
                  third_abs_moment(*mechanism, v, v + st.bias));
      var_acc.add(value_dist->probs[z] * st.variance);
    }
    rho = rho_acc.value();
    noise_var = var_acc.value();
  }
  const double s3 = std::pow(noise_var, 1.5);  // (per-report std)^3
  return 0.33554 * (rho + 0.415 * s3) / (s3 * std::sqrt(r));
}

ValueDistribution discretize(std::span<const double> samples,
                             std::size_t bins) {
  if (samples.empty()) throw std::invalid_argument("no samples to discretize");
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) return ValueDistribution::point(lo);

  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= bins) idx = bins - 1;
    counts[idx] += 1.0;
  }
  ValueDistribution vd;
  vd.values.resize(bins);
  vd.probs.resize(bins);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (std::size_t k = 0; k < bins; ++k) {
    vd.values[k] = lo + (static_cast<double>(k) + 0.5) * width;
    vd.probs[k] = counts[k] * inv_n;
  }
  return vd;
}

}  // namespace hdldp
