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

#include "hdldp/hdr4me.hpp"

#include <cmath>
#include <stdexcept>

#include "hdldp/exact_sum.hpp"
#include "hdldp/framework.hpp"

namespace hdldp {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch");
  }
}

void check_weights(std::span<const double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("weights must be nonnegative");
    }
  }
}

}  // namespace

std::string to_string(Regularizer reg) {
  switch (reg) {
    case Regularizer::kNone:
      return "none";
    case Regularizer::kL1:
      return "l1";
    case Regularizer::kL2:
      return "l2";
  }
  return "unknown";
}

Regularizer regularizer_from_string(const std::string& name) {
  if (name == "none") return Regularizer::kNone;
  if (name == "l1") return Regularizer::kL1;
  if (name == "l2") return Regularizer::kL2;
  throw std::invalid_argument("unknown regularizer: " + name);
}

nlohmann::json RecalibrationConfig::to_json() const {
  return {{"regularizer", to_string(regularizer)},
          {"kappa", kappa},
          {"apply_threshold", apply_threshold},
          {"clamp", clamp}};
}

RecalibrationConfig RecalibrationConfig::from_json(const nlohmann::json& j) {
  RecalibrationConfig cfg;
  cfg.regularizer =
      regularizer_from_string(j.at("regularizer").get<std::string>());
  if (j.contains("kappa")) cfg.kappa = j["kappa"].get<double>();
  if (j.contains("apply_threshold")) {
    cfg.apply_threshold = j["apply_threshold"].get<bool>();
  }
  if (j.contains("clamp")) cfg.clamp = j["clamp"].get<double>();
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!(cfg.clamp > 0.0)) throw std::invalid_argument("clamp must be > 0");
  return cfg;
}

double operational_sup(const DimensionDeviation& dim, double kappa) {
  return std::fabs(dim.delta) + kappa * std::sqrt(dim.sigma2);
}

std::vector<double> l1_weights(const DeviationModel& model, double kappa,
                               bool apply_threshold) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  std::vector<double> weights(model.dims.size());
  for (std::size_t j = 0; j < model.dims.size(); ++j) {
    const double sup = operational_sup(model.dims[j], kappa);
    // Improvement needs the deviation to exceed 1; below that the weight is
    // dropped and the dimension passes through.
    weights[j] = (apply_threshold && sup <= 1.0) ? 0.0 : sup;
  }
  return weights;
}

std::vector<double> l2_weights(const DeviationModel& model,
                               std::span<const double> theta_bar_proxy,
                               double kappa, double clamp,
                               bool apply_threshold) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!(clamp > 0.0)) throw std::invalid_argument("clamp must be > 0");
  check_lengths(model.dims.size(), theta_bar_proxy.size(), "l2_weights");
  std::vector<double> weights(model.dims.size());
  for (std::size_t j = 0; j < model.dims.size(); ++j) {
    const double sup = operational_sup(model.dims[j], kappa);
    if (apply_threshold && sup <= 2.0) {
      weights[j] = 0.0;
      continue;
    }
    const double denom = 2.0 * std::max(std::fabs(theta_bar_proxy[j]), clamp);
    weights[j] = sup / denom;
  }
  return weights;
}

std::vector<double> recalibrate_l1(std::span<const double> theta_hat,
                                   std::span<const double> weights) {
  check_lengths(theta_hat.size(), weights.size(), "recalibrate_l1");
  check_weights(weights);
  std::vector<double> out(theta_hat.size());
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    const double t = theta_hat[j];
    const double w = weights[j];
    if (t > w) {
      out[j] = t - w;
    } else if (t < -w) {
      out[j] = t + w;
    } else {
      out[j] = 0.0;
    }
  }
  return out;
}

std::vector<double> recalibrate_l2(std::span<const double> theta_hat,
                                   std::span<const double> weights) {
  check_lengths(theta_hat.size(), weights.size(), "recalibrate_l2");
  check_weights(weights);
  std::vector<double> out(theta_hat.size());
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    out[j] = theta_hat[j] / (2.0 * weights[j] + 1.0);
  }
  return out;
}

double improvement_probability(const DeviationModel& model, Regularizer reg) {
  double c = 0.0;
  switch (reg) {
    case Regularizer::kL1:
      c = 1.0;
      break;
    case Regularizer::kL2:
      c = 2.0;
      break;
    case Regularizer::kNone:
      throw std::invalid_argument("improvement bound needs l1 or l2");
  }
  ExactSum log_acc;
  for (const auto& dim : model.dims) {
    const double mass = supremum_probability(dim, c);
    if (mass <= 0.0) return 1.0;
    log_acc.add(std::log(mass));
  }
  return 1.0 - std::exp(log_acc.value());
}

double objective(std::span<const double> theta,
                 std::span<const double> theta_hat,
                 std::span<const double> weights, Regularizer reg) {
  check_lengths(theta.size(), theta_hat.size(), "objective");
  check_lengths(theta.size(), weights.size(), "objective");
  ExactSum acc;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double diff = theta[j] - theta_hat[j];
    acc.add(0.5 * diff * diff);
    switch (reg) {
      case Regularizer::kL1:
        acc.add(weights[j] * std::fabs(theta[j]));
        break;
      case Regularizer::kL2:
        // The L2 penalty weights the squared coordinate linearly; that is
        // the function whose proximal step is theta / (2 lambda + 1).
        acc.add(weights[j] * theta[j] * theta[j]);
        break;
      case Regularizer::kNone:
        break;
    }
  }
  return acc.value();
}

RecalibrationResult recalibrate(std::span<const double> theta_hat,
                                const DeviationModel& model,
                                const RecalibrationConfig& config) {
  check_lengths(theta_hat.size(), model.dims.size(), "recalibrate");
  RecalibrationResult result;
  if (config.regularizer == Regularizer::kNone) {
    result.theta_star.assign(theta_hat.begin(), theta_hat.end());
    result.weights.assign(theta_hat.size(), 0.0);
    result.gated.assign(theta_hat.size(), true);
    return result;
  }

  if (config.regularizer == Regularizer::kL1) {
    result.weights = l1_weights(model, config.kappa, config.apply_threshold);
    result.theta_star = recalibrate_l1(theta_hat, result.weights);
  } else {
    // The true mean is unknown at re-calibration time; the bias-corrected
    // estimate stands in for it.
    std::vector<double> proxy(theta_hat.size());
    for (std::size_t j = 0; j < theta_hat.size(); ++j) {
      proxy[j] = theta_hat[j] - model.dims[j].delta;
    }
    result.weights = l2_weights(model, proxy, config.kappa, config.clamp,
                                config.apply_threshold);
    result.theta_star = recalibrate_l2(theta_hat, result.weights);
  }
  result.gated.resize(theta_hat.size());
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    result.gated[j] = result.weights[j] == 0.0;
  }
  return result;
}

nlohmann::json RecalibrationResult::to_json() const {
  return {{"theta_star", theta_star},
          {"weights", weights},
          {"gated", std::vector<int>(gated.begin(), gated.end())}};
}

}  // namespace hdldp
