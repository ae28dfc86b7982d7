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

#ifndef HDLDP_MECHANISMS_HPP_
#define HDLDP_MECHANISMS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "hdldp/rng.hpp"
#include "json.hpp"

namespace hdldp {

enum class MechanismKind { kLaplace, kPiecewise, kSquareWave };

std::string to_string(MechanismKind kind);
MechanismKind mechanism_kind_from_string(const std::string& name);

/// Which perturbation runs on a dimension and with how much budget.
///
/// `eps_per_dim` is the per-dimension budget, i.e. the total budget already
/// divided by the number of sampled dimensions. `bound` is the largest
/// absolute report value the mechanism can emit in the [-1,1] data domain
/// (+infinity for additive-noise mechanisms).
struct MechanismSpec {
  MechanismKind kind = MechanismKind::kLaplace;
  double eps_per_dim = 0.0;
  bool bounded = false;
  double bound = 0.0;

  static MechanismSpec make(MechanismKind kind, double eps_per_dim);

  nlohmann::json to_json() const;
  static MechanismSpec from_json(const nlohmann::json& j);
};

/// Bias and variance of a single perturbed report for a given original value.
struct PerturbationStats {
  double bias = 0.0;
  double variance = 0.0;
};

/// A perturbation mechanism in its native domain. Laplace and Piecewise take
/// inputs in [-1,1]; Square Wave takes inputs in [0,1] and callers working in
/// [-1,1] go through to_unit_interval()/from_unit_interval().
///
/// All sampling is inverse-transform from the exact output density, so
/// perturb(), stats() and density() describe the same distribution and can be
/// cross-checked against each other by quadrature.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual MechanismKind kind() const = 0;
  virtual double eps_per_dim() const = 0;

  virtual double input_min() const = 0;
  virtual double input_max() const = 0;
  // Support of the perturbed output; +-infinity when unbounded.
  virtual double output_min() const = 0;
  virtual double output_max() const = 0;

  /// Draws one perturbed report for original value t.
  virtual double perturb(double t, Rng& rng) const = 0;

  /// Closed-form bias and variance of the report distribution at t.
  virtual PerturbationStats stats(double t) const = 0;

  /// Output density f(t_star | t); zero outside the output support.
  virtual double density(double t, double t_star) const = 0;

  /// Interior points where the output density jumps or kinks; between two
  /// consecutive breakpoints the density is smooth.
  virtual std::vector<double> output_breakpoints(double t) const = 0;

 protected:
  void check_input(double t) const;
};

std::unique_ptr<Mechanism> make_mechanism(const MechanismSpec& spec);
std::unique_ptr<Mechanism> make_mechanism(MechanismKind kind,
                                          double eps_per_dim);

/// Affine bridge between the [-1,1] data domain and the unit interval.
/// Under the inverse map a bias transforms as 2*delta and a variance as
/// 4*sigma^2.
inline double to_unit_interval(double t) { return (t + 1.0) / 2.0; }
inline double from_unit_interval(double x) { return 2.0 * x - 1.0; }

/// Empirical privacy ratio: max over a grid of input pairs (t_a, t_b) and
/// output points of density(t_a, .) / density(t_b, .). For an eps-LDP
/// mechanism this never exceeds exp(eps_per_dim).
double ldp_ratio(const Mechanism& mechanism, int input_grid = 33,
                 int output_grid = 129);
double ldp_ratio(const MechanismSpec& spec, int input_grid = 33,
                 int output_grid = 129);

}  // namespace hdldp

#endif  // HDLDP_MECHANISMS_HPP_
