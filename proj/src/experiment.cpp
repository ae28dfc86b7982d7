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

#include "hdldp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "hdldp/exact_sum.hpp"

namespace hdldp {

namespace {

// Stream domain separator; keeps trial randomness disjoint from the dataset
// generator's streams under the same seed.
constexpr std::uint64_t kTrialTag = 0x7269616cULL;

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch");
  }
}

std::size_t resolve_m(std::size_t m, std::size_t d) {
  if (m == 0) return d;
  if (m > d) throw std::invalid_argument("m exceeds dimension count");
  return m;
}

// Runs fn(trial) for every trial index, optionally on several threads.
// Results must be written into per-trial slots, so scheduling cannot change
// anything observable.
void for_each_trial(std::size_t trials, int threads,
                    const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || trials <= 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  const int workers = std::min<int>(threads, static_cast<int>(trials));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t t = w; t < trials; t += workers) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

// One pipeline pass: every user samples m dimensions and reports perturbed
// values; returns the aggregated estimate in the [-1,1] data domain.
AggregateResult run_trial(const Dataset& data, const Mechanism& mechanism,
                          std::size_t m, std::uint64_t seed,
                          std::size_t trial) {
  const bool unit_native = mechanism.input_min() == 0.0;
  AggregateState state(data.d);
  DimensionSampler sampler(data.d);
  std::vector<std::uint32_t> dims;
  for (std::size_t i = 0; i < data.n; ++i) {
    Rng rng(seed, {kTrialTag, trial, i});
    sampler.sample(m, rng, dims);
    for (std::uint32_t j : dims) {
      double t = data.at(i, j);
      if (unit_native) t = to_unit_interval(t);
      double value = mechanism.perturb(t, rng);
      if (unit_native) value = from_unit_interval(value);
      state.accept(Report{j, value});
    }
  }
  return aggregate(state);
}

// Discretized per-column value distributions in the mechanism's native input
// domain; empty for unbounded mechanisms.
std::vector<ValueDistribution> column_value_dists(const Dataset& data,
                                                  const MechanismSpec& spec,
                                                  std::size_t bins) {
  if (!spec.bounded) return {};
  const bool unit_native = spec.kind == MechanismKind::kSquareWave;
  std::vector<ValueDistribution> dists(data.d);
  std::vector<double> column(data.n);
  for (std::size_t j = 0; j < data.d; ++j) {
    for (std::size_t i = 0; i < data.n; ++i) {
      column[i] = unit_native ? to_unit_interval(data.at(i, j)) : data.at(i, j);
    }
    dists[j] = discretize(column, bins);
  }
  return dists;
}

double sample_std(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  ExactSum acc;
  for (double x : xs) acc.add((x - mean) * (x - mean));
  return std::sqrt(acc.value() / static_cast<double>(xs.size() - 1));
}

}  // namespace

double mse(std::span<const double> estimate, std::span<const double> truth) {
  check_same_length(estimate.size(), truth.size(), "mse");
  if (estimate.empty()) throw std::invalid_argument("mse of empty vectors");
  ExactSum acc;
  for (std::size_t j = 0; j < estimate.size(); ++j) {
    const double diff = estimate[j] - truth[j];
    acc.add(diff * diff);
  }
  return acc.value() / static_cast<double>(estimate.size());
}

double euclidean_deviation(std::span<const double> estimate,
                           std::span<const double> truth) {
  check_same_length(estimate.size(), truth.size(), "euclidean_deviation");
  ExactSum acc;
  for (std::size_t j = 0; j < estimate.size(); ++j) {
    const double diff = estimate[j] - truth[j];
    acc.add(diff * diff);
  }
  return std::sqrt(acc.value());
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks of empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    worst = std::max({worst, lo, hi});
  }
  return worst;
}

Dataset DatasetSource::load() const {
  if (generator.has_value() == csv_path.has_value()) {
    throw std::invalid_argument(
        "dataset source needs exactly one of generator or csv");
  }
  if (generator) return generate(*generator);
  Dataset raw = load_csv(*csv_path);
  return normalize(raw);
}

nlohmann::json DatasetSource::to_json() const {
  if (generator) return {{"generator", generator->to_json()}};
  return {{"csv", *csv_path}};
}

DatasetSource DatasetSource::from_json(const nlohmann::json& j) {
  DatasetSource src;
  if (j.contains("generator")) {
    src.generator = GeneratorConfig::from_json(j["generator"]);
  }
  if (j.contains("csv")) src.csv_path = j["csv"].get<std::string>();
  return src;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json recals = nlohmann::json::array();
  for (const auto& r : recalibrations) recals.push_back(r.to_json());
  return {{"dataset", source.to_json()},
          {"mechanism", to_string(mechanism)},
          {"eps", total_eps},
          {"m", m},
          {"trials", trials},
          {"seed", seed},
          {"recalibrations", recals},
          {"calibrate_with_prior", calibrate_with_prior},
          {"discretize_bins", discretize_bins},
          {"threads", threads}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.source = DatasetSource::from_json(j.at("dataset"));
  cfg.mechanism =
      mechanism_kind_from_string(j.at("mechanism").get<std::string>());
  cfg.total_eps = j.at("eps").get<double>();
  if (j.contains("m")) cfg.m = j["m"].get<std::size_t>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("recalibrations")) {
    for (const auto& r : j["recalibrations"]) {
      cfg.recalibrations.push_back(RecalibrationConfig::from_json(r));
    }
  }
  if (j.contains("calibrate_with_prior")) {
    cfg.calibrate_with_prior = j["calibrate_with_prior"].get<bool>();
  }
  if (j.contains("discretize_bins")) {
    cfg.discretize_bins = j["discretize_bins"].get<std::size_t>();
  }
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(cfg.total_eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  return cfg;
}

const MethodResult& ExperimentReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no method named " + name);
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : methods) {
    ms.push_back({{"name", m.name},
                  {"mse_mean", m.mse_mean},
                  {"mse_std", m.mse_std},
                  {"per_trial_mse", m.per_trial_mse},
                  {"last_theta", m.last_theta}});
  }
  return {{"methods", ms},
          {"theta_bar", theta_bar},
          {"model", model.to_json()},
          {"seed", seed},
          {"wall_ms", wall_ms},
          {"config", config_echo}};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");

  const Dataset data = config.source.load();
  const std::size_t m = resolve_m(config.m, data.d);
  const double eps_per_dim = config.total_eps / static_cast<double>(m);
  const MechanismSpec spec = MechanismSpec::make(config.mechanism, eps_per_dim);
  const auto mechanism = make_mechanism(spec);

  const std::vector<double> theta_bar = data.column_means();
  const std::vector<ValueDistribution> value_dists =
      column_value_dists(data, spec, config.discretize_bins);
  const double expected_r = static_cast<double>(data.n) *
                            static_cast<double>(m) /
                            static_cast<double>(data.d);
  const DeviationModel model_native =
      build_deviation_model(spec, value_dists, data.d, expected_r);
  const DeviationModel model = to_data_space(model_native, spec);

  // methods[0] = baseline aggregate, then one method per re-calibration.
  const std::size_t n_methods = 1 + config.recalibrations.size();
  std::vector<std::vector<double>> trial_mse(
      n_methods, std::vector<double>(config.trials, 0.0));
  std::vector<std::vector<double>> last_theta(n_methods);

  for_each_trial(config.trials, config.threads, [&](std::size_t trial) {
    AggregateResult agg =
        run_trial(data, *mechanism, m, config.seed, trial);
    std::vector<double> theta_hat = agg.theta_hat;
    if (config.calibrate_with_prior && spec.bounded) {
      theta_hat = calibrate(theta_hat, spec, &value_dists);
    }
    trial_mse[0][trial] = mse(theta_hat, theta_bar);
    if (trial == config.trials - 1) last_theta[0] = theta_hat;
    for (std::size_t k = 0; k < config.recalibrations.size(); ++k) {
      const std::vector<double> theta_star =
          recalibrate(theta_hat, model, config.recalibrations[k]).theta_star;
      trial_mse[1 + k][trial] = mse(theta_star, theta_bar);
      if (trial == config.trials - 1) last_theta[1 + k] = theta_star;
    }
  });

  ExperimentReport report;
  report.theta_bar = theta_bar;
  report.model = model;
  report.seed = config.seed;
  report.config_echo = config.to_json();
  for (std::size_t k = 0; k < n_methods; ++k) {
    MethodResult method;
    method.name =
        k == 0 ? "baseline" : to_string(config.recalibrations[k - 1].regularizer);
    method.per_trial_mse = trial_mse[k];
    method.mse_mean = exact_sum(trial_mse[k].begin(), trial_mse[k].end()) /
                      static_cast<double>(config.trials);
    method.mse_std = sample_std(trial_mse[k], method.mse_mean);
    method.last_theta = last_theta[k];
    report.methods.push_back(std::move(method));
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

nlohmann::json ValidationConfig::to_json() const {
  return {{"dataset", source.to_json()},
          {"mechanism", to_string(mechanism)},
          {"eps", total_eps},
          {"m", m},
          {"trials", trials},
          {"seed", seed},
          {"track_dim", track_dim},
          {"histogram_bins", histogram_bins},
          {"discretize_bins", discretize_bins},
          {"threads", threads}};
}

ValidationConfig ValidationConfig::from_json(const nlohmann::json& j) {
  ValidationConfig cfg;
  cfg.source = DatasetSource::from_json(j.at("dataset"));
  cfg.mechanism =
      mechanism_kind_from_string(j.at("mechanism").get<std::string>());
  cfg.total_eps = j.at("eps").get<double>();
  if (j.contains("m")) cfg.m = j["m"].get<std::size_t>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("track_dim")) cfg.track_dim = j["track_dim"].get<std::size_t>();
  if (j.contains("histogram_bins")) {
    cfg.histogram_bins = j["histogram_bins"].get<std::size_t>();
  }
  if (j.contains("discretize_bins")) {
    cfg.discretize_bins = j["discretize_bins"].get<std::size_t>();
  }
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  return cfg;
}

ValidationReport validate_framework(const ValidationConfig& config) {
  if (config.trials < 200) {
    throw std::invalid_argument("validation needs at least 200 trials");
  }
  const Dataset data = config.source.load();
  if (config.track_dim >= data.d) {
    throw std::invalid_argument("tracked dimension out of range");
  }
  const std::size_t m = resolve_m(config.m, data.d);
  const double eps_per_dim = config.total_eps / static_cast<double>(m);
  const MechanismSpec spec = MechanismSpec::make(config.mechanism, eps_per_dim);
  const auto mechanism = make_mechanism(spec);

  const double theta_bar_j = data.column_mean(config.track_dim);
  const double expected_r = static_cast<double>(data.n) *
                            static_cast<double>(m) /
                            static_cast<double>(data.d);

  // Deviation model of the tracked dimension, in the data domain.
  ValueDistribution vd;
  double berry_esseen = 0.0;
  {
    const bool unit_native = spec.kind == MechanismKind::kSquareWave;
    std::vector<double> column(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
      const double t = data.at(i, config.track_dim);
      column[i] = unit_native ? to_unit_interval(t) : t;
    }
    vd = discretize(column, config.discretize_bins);
    berry_esseen = berry_esseen_bound(spec, spec.bounded ? &vd : nullptr,
                                      expected_r);
  }
  const DimensionDeviation model = to_data_space(
      deviation_model(spec, spec.bounded ? &vd : nullptr, expected_r), spec);

  std::vector<double> deviations(config.trials, 0.0);
  for_each_trial(config.trials, config.threads, [&](std::size_t trial) {
    const AggregateResult agg =
        run_trial(data, *mechanism, m, config.seed, trial);
    if (agg.counts[config.track_dim] == 0) {
      throw std::runtime_error("tracked dimension received no report");
    }
    deviations[trial] = agg.theta_hat[config.track_dim] - theta_bar_j;
  });

  ValidationReport report;
  report.model = model;
  report.berry_esseen = berry_esseen;
  report.config_echo = config.to_json();
  const double sigma = std::sqrt(model.sigma2);
  report.ks = ks_statistic(deviations, [&](double x) {
    return normal_cdf((x - model.delta) / sigma);
  });

  std::sort(deviations.begin(), deviations.end());
  report.deviations = deviations;
  const double lo = deviations.front();
  const double hi = deviations.back();
  const std::size_t bins = std::max<std::size_t>(config.histogram_bins, 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  report.bin_mid.resize(bins);
  report.bin_mass.assign(bins, 0.0);
  report.model_density.resize(bins);
  for (double x : deviations) {
    auto idx = width > 0.0 ? static_cast<std::size_t>((x - lo) / width)
                           : std::size_t{0};
    if (idx >= bins) idx = bins - 1;
    report.bin_mass[idx] += 1.0 / static_cast<double>(config.trials);
  }
  for (std::size_t k = 0; k < bins; ++k) {
    report.bin_mid[k] = lo + (static_cast<double>(k) + 0.5) * width;
    const double z = (report.bin_mid[k] - model.delta) / sigma;
    report.model_density[k] = std::exp(-0.5 * z * z) /
                              (sigma * std::sqrt(2.0 * std::numbers::pi));
  }
  return report;
}

nlohmann::json ValidationReport::to_json() const {
  return {{"model",
           {{"delta", model.delta}, {"sigma2", model.sigma2}, {"r", model.r}}},
          {"ks", ks},
          {"berry_esseen", berry_esseen},
          {"bin_mid", bin_mid},
          {"bin_mass", bin_mass},
          {"model_density", model_density},
          {"config", config_echo}};
}

void ValidationReport::save_histogram_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "bin_mid,bin_mass,model_density\n";
  for (std::size_t k = 0; k < bin_mid.size(); ++k) {
    out << bin_mid[k] << ',' << bin_mass[k] << ',' << model_density[k] << '\n';
  }
}

nlohmann::json BenchmarkConfig::to_json() const {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : mechanisms) kinds.push_back(to_string(k));
  return {{"mechanisms", kinds},
          {"values", values.to_json()},
          {"eps", total_eps},
          {"m", m},
          {"r", r},
          {"xi", xi}};
}

BenchmarkConfig BenchmarkConfig::from_json(const nlohmann::json& j) {
  BenchmarkConfig cfg;
  for (const auto& k : j.at("mechanisms")) {
    cfg.mechanisms.push_back(
        mechanism_kind_from_string(k.get<std::string>()));
  }
  cfg.values = ValueDistribution::from_json(j.at("values"));
  cfg.total_eps = j.at("eps").get<double>();
  cfg.m = j.at("m").get<std::size_t>();
  cfg.r = j.at("r").get<double>();
  cfg.xi = j.at("xi").get<std::vector<double>>();
  return cfg;
}

BenchmarkTable benchmark_mechanisms(const BenchmarkConfig& config) {
  if (config.xi.empty()) throw std::invalid_argument("xi grid is empty");
  if (config.mechanisms.empty()) {
    throw std::invalid_argument("no mechanisms to benchmark");
  }
  config.values.validate();
  const double eps_per_dim =
      config.total_eps / static_cast<double>(config.m);

  BenchmarkTable table;
  table.mechanisms = config.mechanisms;
  table.xi = config.xi;
  for (MechanismKind kind : config.mechanisms) {
    const MechanismSpec spec = MechanismSpec::make(kind, eps_per_dim);
    table.models.push_back(deviation_model(
        spec, spec.bounded ? &config.values : nullptr, config.r));
  }
  table.probabilities.resize(config.xi.size());
  for (std::size_t i = 0; i < config.xi.size(); ++i) {
    table.probabilities[i].resize(config.mechanisms.size());
    for (std::size_t k = 0; k < config.mechanisms.size(); ++k) {
      table.probabilities[i][k] =
          supremum_probability(table.models[k], config.xi[i]);
    }
  }
  return table;
}

nlohmann::json BenchmarkTable::to_json() const {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : mechanisms) kinds.push_back(to_string(k));
  nlohmann::json model_list = nlohmann::json::array();
  for (const auto& m : models) {
    model_list.push_back(
        {{"delta", m.delta}, {"sigma2", m.sigma2}, {"r", m.r}});
  }
  return {{"mechanisms", kinds},
          {"xi", xi},
          {"probabilities", probabilities},
          {"models", model_list}};
}

void BenchmarkTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "xi";
  for (auto k : mechanisms) out << ',' << to_string(k);
  out << '\n';
  for (std::size_t i = 0; i < xi.size(); ++i) {
    out << xi[i];
    for (double p : probabilities[i]) out << ',' << p;
    out << '\n';
  }
}

}  // namespace hdldp
