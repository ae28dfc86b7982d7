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

#include "hdldp/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hdldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Above this per-dimension budget exp(eps) overflows intermediate terms of
// the bounded mechanisms; such budgets provide no meaningful privacy anyway.
constexpr double kMaxEps = 700.0;

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps_per_dim must be positive and finite");
  }
  if (eps > kMaxEps) {
    throw std::invalid_argument("eps_per_dim too large (max 700)");
  }
}

// ---------------------------------------------------------------------------
// Laplace: t* = t + Lap(2/eps), t in [-1,1].
// ---------------------------------------------------------------------------
class LaplaceMechanism final : public Mechanism {
 public:
  explicit LaplaceMechanism(double eps) : eps_(eps), lambda_(2.0 / eps) {}

  MechanismKind kind() const override { return MechanismKind::kLaplace; }
  double eps_per_dim() const override { return eps_; }
  double input_min() const override { return -1.0; }
  double input_max() const override { return 1.0; }
  double output_min() const override { return -kInf; }
  double output_max() const override { return kInf; }

  double perturb(double t, Rng& rng) const override {
    check_input(t);
    const double u = rng.uniform_open();
    const double noise = u < 0.5 ? lambda_ * std::log(2.0 * u)
                                 : -lambda_ * std::log(2.0 * (1.0 - u));
    return t + noise;
  }

  PerturbationStats stats(double t) const override {
    check_input(t);
    return {0.0, 2.0 * lambda_ * lambda_};
  }

  double density(double t, double t_star) const override {
    check_input(t);
    return std::exp(-std::fabs(t_star - t) / lambda_) / (2.0 * lambda_);
  }

  std::vector<double> output_breakpoints(double t) const override {
    check_input(t);
    return {t};
  }

  double lambda() const { return lambda_; }

 private:
  double eps_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Piecewise: for t in [-1,1] the output lands in [-Q,Q], with a high-density
// band [l(t), r(t)] of width Q-1 and low-density tails. The two density
// levels have ratio exactly exp(eps).
// ---------------------------------------------------------------------------
class PiecewiseMechanism final : public Mechanism {
 public:
  explicit PiecewiseMechanism(double eps) : eps_(eps) {
    const double s = std::exp(eps / 2.0);
    const double em_half = std::expm1(eps / 2.0);  // s - 1, stable
    q_ = (std::exp(eps) + s) / (s * em_half);
    p_high_ = s * em_half / (2.0 * s + 2.0);
    p_low_ = -std::expm1(-eps / 2.0) / (2.0 * s + 2.0);
    s_minus_1_ = em_half;
    s_ = s;
    band_ = q_ - 1.0;
  }

  MechanismKind kind() const override { return MechanismKind::kPiecewise; }
  double eps_per_dim() const override { return eps_; }
  double input_min() const override { return -1.0; }
  double input_max() const override { return 1.0; }
  double output_min() const override { return -q_; }
  double output_max() const override { return q_; }

  double perturb(double t, Rng& rng) const override {
    check_input(t);
    const double l = left_edge(t);
    const double u = rng.uniform01();
    const double mass_left = (l + q_) * p_low_;
    const double mass_center = band_ * p_high_;
    double out;
    if (u < mass_left) {
      out = -q_ + u / p_low_;
    } else if (u < mass_left + mass_center) {
      out = l + (u - mass_left) / p_high_;
    } else {
      out = l + band_ + (u - mass_left - mass_center) / p_low_;
    }
    return std::clamp(out, -q_, q_);
  }

  PerturbationStats stats(double t) const override {
    check_input(t);
    const double variance =
        t * t / s_minus_1_ + (s_ + 3.0) / (3.0 * s_minus_1_ * s_minus_1_);
    return {0.0, variance};
  }

  double density(double t, double t_star) const override {
    check_input(t);
    if (t_star < -q_ || t_star > q_) return 0.0;
    const double l = left_edge(t);
    return (t_star >= l && t_star <= l + band_) ? p_high_ : p_low_;
  }

  std::vector<double> output_breakpoints(double t) const override {
    check_input(t);
    const double l = left_edge(t);
    return {l, l + band_};
  }

  double q() const { return q_; }

 private:
  double left_edge(double t) const {
    return (q_ + 1.0) / 2.0 * t - (q_ - 1.0) / 2.0;
  }

  double eps_;
  double q_;
  double p_high_;
  double p_low_;
  double s_;
  double s_minus_1_;
  double band_;
};

// ---------------------------------------------------------------------------
// Square Wave: for t in [0,1] the output lands in [-b, 1+b]; the band
// [t-b, t+b] carries density exp(eps)/(2b exp(eps)+1), everything else
// 1/(2b exp(eps)+1).
// ---------------------------------------------------------------------------
class SquareWaveMechanism final : public Mechanism {
 public:
  explicit SquareWaveMechanism(double eps) : eps_(eps) {
    // b = (eps e^eps - e^eps + 1) / (2 e^eps (e^eps - 1 - eps)). Both the
    // numerator and e^eps - 1 - eps vanish like eps^2/2, so small budgets use
    // the series expansion of their ratio instead of the raw formula.
    if (eps < 1e-4) {
      const double num = 0.5 + eps / 3.0 + eps * eps / 8.0 + eps * eps * eps / 30.0;
      const double den = 0.5 + eps / 6.0 + eps * eps / 24.0 + eps * eps * eps / 120.0;
      b_ = num / (den * 2.0 * std::exp(eps));
    } else {
      const double e = std::exp(eps);
      const double num = eps * e - std::expm1(eps);
      const double den = 2.0 * e * (std::expm1(eps) - eps);
      b_ = num / den;
    }
    be_ = b_ * std::exp(eps);
    d_ = 2.0 * be_ + 1.0;
    p_high_ = std::exp(eps) / d_;
    p_low_ = 1.0 / d_;
    // 2b(e^eps - 1) without cancellation for tiny eps.
    two_b_em1_ = 2.0 * be_ * -std::expm1(-eps);
  }

  MechanismKind kind() const override { return MechanismKind::kSquareWave; }
  double eps_per_dim() const override { return eps_; }
  double input_min() const override { return 0.0; }
  double input_max() const override { return 1.0; }
  double output_min() const override { return -b_; }
  double output_max() const override { return 1.0 + b_; }

  double perturb(double t, Rng& rng) const override {
    check_input(t);
    // Segment masses: left tail width t, band width 2b, right tail 1 - t.
    const double w = rng.uniform01() * d_;
    double out;
    if (w < t) {
      out = -b_ + w;
    } else if (w < t + 2.0 * be_) {
      out = (t - b_) + (w - t) / std::exp(eps_);
    } else {
      out = (t + b_) + (w - t - 2.0 * be_);
    }
    return std::clamp(out, -b_, 1.0 + b_);
  }

  PerturbationStats stats(double t) const override {
    check_input(t);
    const double delta = bias(t);
    const double variance = b_ * b_ / 3.0 +
                            (2.0 * b_ + 1.0) * (b_ + 1.0 - 3.0 * t * t) /
                                (3.0 * d_) -
                            delta * delta - 2.0 * delta * t;
    return {delta, variance};
  }

  double density(double t, double t_star) const override {
    check_input(t);
    if (t_star < -b_ || t_star > 1.0 + b_) return 0.0;
    return std::fabs(t - t_star) < b_ ? p_high_ : p_low_;
  }

  std::vector<double> output_breakpoints(double t) const override {
    check_input(t);
    return {t - b_, t + b_};
  }

  double b() const { return b_; }

 private:
  double bias(double t) const {
    return two_b_em1_ * t / d_ + (1.0 + 2.0 * b_) / (2.0 * d_) - t;
  }

  double eps_;
  double b_;
  double be_;  // b * exp(eps)
  double d_;   // 2 b exp(eps) + 1
  double p_high_;
  double p_low_;
  double two_b_em1_;
};

}  // namespace

void Mechanism::check_input(double t) const {
  if (!(t >= input_min() && t <= input_max())) {
    throw std::invalid_argument("original value " + std::to_string(t) +
                                " outside mechanism input domain [" +
                                std::to_string(input_min()) + ", " +
                                std::to_string(input_max()) + "]");
  }
}

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kPiecewise:
      return "piecewise";
    case MechanismKind::kSquareWave:
      return "squarewave";
  }
  return "unknown";
}

MechanismKind mechanism_kind_from_string(const std::string& name) {
  if (name == "laplace") return MechanismKind::kLaplace;
  if (name == "piecewise") return MechanismKind::kPiecewise;
  if (name == "squarewave") return MechanismKind::kSquareWave;
  throw std::invalid_argument("unknown mechanism kind: " + name);
}

MechanismSpec MechanismSpec::make(MechanismKind kind, double eps_per_dim) {
  check_eps(eps_per_dim);
  MechanismSpec spec;
  spec.kind = kind;
  spec.eps_per_dim = eps_per_dim;
  switch (kind) {
    case MechanismKind::kLaplace:
      spec.bounded = false;
      spec.bound = kInf;
      break;
    case MechanismKind::kPiecewise: {
      spec.bounded = true;
      spec.bound = PiecewiseMechanism(eps_per_dim).q();
      break;
    }
    case MechanismKind::kSquareWave: {
      // Reports are mapped back to the [-1,1] data domain, where the native
      // [-b, 1+b] support becomes [-(2b+1), 2b+1].
      spec.bounded = true;
      spec.bound = 2.0 * SquareWaveMechanism(eps_per_dim).b() + 1.0;
      break;
    }
  }
  return spec;
}

nlohmann::json MechanismSpec::to_json() const {
  return {{"kind", to_string(kind)}, {"eps_per_dim", eps_per_dim}};
}

MechanismSpec MechanismSpec::from_json(const nlohmann::json& j) {
  return make(mechanism_kind_from_string(j.at("kind").get<std::string>()),
              j.at("eps_per_dim").get<double>());
}

std::unique_ptr<Mechanism> make_mechanism(MechanismKind kind,
                                          double eps_per_dim) {
  check_eps(eps_per_dim);
  switch (kind) {
    case MechanismKind::kLaplace:
      return std::make_unique<LaplaceMechanism>(eps_per_dim);
    case MechanismKind::kPiecewise:
      return std::make_unique<PiecewiseMechanism>(eps_per_dim);
    case MechanismKind::kSquareWave:
      return std::make_unique<SquareWaveMechanism>(eps_per_dim);
  }
  throw std::invalid_argument("unknown mechanism kind");
}

std::unique_ptr<Mechanism> make_mechanism(const MechanismSpec& spec) {
  return make_mechanism(spec.kind, spec.eps_per_dim);
}

double ldp_ratio(const Mechanism& mechanism, int input_grid, int output_grid) {
  const double in_lo = mechanism.input_min();
  const double in_hi = mechanism.input_max();
  double out_lo = mechanism.output_min();
  double out_hi = mechanism.output_max();
  if (!std::isfinite(out_lo) || !std::isfinite(out_hi)) {
    // Unbounded support: the ratio of additive-noise densities is maximal for
    // outputs outside the input interval, so a modest widening suffices.
    const double pad = 4.0 / mechanism.eps_per_dim();
    out_lo = in_lo - pad;
    out_hi = in_hi + pad;
  }

  std::vector<double> inputs(input_grid);
  for (int i = 0; i < input_grid; ++i) {
    inputs[i] = in_lo + (in_hi - in_lo) * i / (input_grid - 1);
  }
  std::vector<double> outputs(output_grid);
  for (int i = 0; i < output_grid; ++i) {
    outputs[i] = out_lo + (out_hi - out_lo) * i / (output_grid - 1);
  }

  double worst = 0.0;
  for (double ta : inputs) {
    for (double tb : inputs) {
      for (double x : outputs) {
        const double fa = mechanism.density(ta, x);
        const double fb = mechanism.density(tb, x);
        if (fa > 0.0 && fb > 0.0) worst = std::max(worst, fa / fb);
      }
    }
  }
  return worst;
}

double ldp_ratio(const MechanismSpec& spec, int input_grid, int output_grid) {
  return ldp_ratio(*make_mechanism(spec), input_grid, output_grid);
}

}  // namespace hdldp
