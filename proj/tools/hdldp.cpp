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

// Command-line harness for the hdldp library: dataset generation, the
// perturb/aggregate pipeline, deviation analysis, re-calibration, supremum
// benchmarking, framework validation and frequency estimation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdldp/collector.hpp"
#include "hdldp/dataset.hpp"
#include "hdldp/experiment.hpp"
#include "hdldp/framework.hpp"
#include "hdldp/frequency.hpp"
#include "hdldp/hdr4me.hpp"
#include "hdldp/mechanisms.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << std::endl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Value distributions arrive either as one object or as a per-dimension
// array.
std::vector<hdldp::ValueDistribution> load_value_dists(const std::string& path) {
  const json j = load_json(path);
  std::vector<hdldp::ValueDistribution> dists;
  if (j.is_array()) {
    for (const auto& item : j) {
      dists.push_back(hdldp::ValueDistribution::from_json(item));
    }
  } else {
    dists.push_back(hdldp::ValueDistribution::from_json(j));
  }
  return dists;
}

struct MechanismFlags {
  std::string spec_path;
  std::string kind = "laplace";
  double eps = 1.0;
  std::size_t m = 1;

  hdldp::MechanismSpec resolve() const {
    if (!spec_path.empty()) {
      return hdldp::MechanismSpec::from_json(load_json(spec_path));
    }
    return hdldp::MechanismSpec::make(
        hdldp::mechanism_kind_from_string(kind),
        eps / static_cast<double>(m));
  }
};

void add_mechanism_flags(CLI::App* cmd, MechanismFlags& flags) {
  cmd->add_option("--spec", flags.spec_path,
                  "mechanism spec JSON file {kind, eps_per_dim}");
  cmd->add_option("--mechanism", flags.kind,
                  "laplace | piecewise | squarewave");
  cmd->add_option("--eps", flags.eps, "total privacy budget");
  cmd->add_option("--m", flags.m, "sampled dimensions per user");
}

int run_gen_data(const std::string& config_path,
                 std::optional<std::uint64_t> seed, const std::string& out) {
  hdldp::GeneratorConfig cfg =
      hdldp::GeneratorConfig::from_json(load_json(config_path));
  if (seed) cfg.seed = *seed;
  const hdldp::Dataset data = hdldp::generate(cfg);
  hdldp::save_csv(data, out);
  const json meta{{"n", data.n},
                  {"d", data.d},
                  {"seed", cfg.seed},
                  {"config", cfg.to_json()},
                  {"out", out}};
  std::cout << meta.dump(2) << std::endl;
  return 0;
}

int run_perturb(const std::string& data_path, const MechanismFlags& flags,
                std::uint64_t seed, const std::string& out) {
  const hdldp::Dataset data = hdldp::normalize(hdldp::load_csv(data_path));
  const hdldp::MechanismSpec spec = flags.resolve();
  const auto mechanism = hdldp::make_mechanism(spec);
  std::vector<hdldp::Report> reports;
  reports.reserve(data.n * flags.m);
  std::vector<double> record(data.d);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.d; ++j) record[j] = data.at(i, j);
    hdldp::Rng rng(seed, {0x70657274ULL, i});
    for (const auto& r :
         hdldp::perturb_record(record, *mechanism, flags.m, rng)) {
      reports.push_back(r);
    }
  }
  hdldp::save_reports_csv(reports, out);
  const json meta{{"reports", reports.size()},
                  {"eps_per_dim", spec.eps_per_dim},
                  {"out", out}};
  std::cout << meta.dump(2) << std::endl;
  return 0;
}

int run_aggregate(const std::string& reports_path, std::size_t d,
                  const std::string& out) {
  const auto reports = hdldp::load_reports_csv(reports_path);
  const hdldp::AggregateResult res = hdldp::aggregate(reports, d);
  write_json(res.to_json(), out);
  return 0;
}

int run_analyze(const MechanismFlags& flags, const std::string& dist_path,
                double r, const std::vector<double>& xi,
                const std::string& out) {
  const hdldp::MechanismSpec spec = flags.resolve();
  std::vector<hdldp::ValueDistribution> dists;
  if (!dist_path.empty()) dists = load_value_dists(dist_path);
  if (spec.bounded && dists.empty()) {
    throw std::invalid_argument(
        "bounded mechanisms need --value-dist for the deviation model");
  }

  const std::size_t d = dists.empty() ? 1 : dists.size();
  const hdldp::DeviationModel model =
      hdldp::build_deviation_model(spec, dists, d, r);
  json delta = json::array(), sigma2 = json::array();
  for (const auto& dim : model.dims) {
    delta.push_back(dim.delta);
    sigma2.push_back(dim.sigma2);
  }
  json result{{"mechanism", hdldp::to_string(spec.kind)},
              {"eps_per_dim", spec.eps_per_dim},
              {"r", r},
              {"delta", delta},
              {"sigma2", sigma2}};
  result["berry_esseen"] = hdldp::berry_esseen_bound(
      spec, dists.empty() ? nullptr : &dists[0], r);
  if (!xi.empty()) {
    json sup = json::array();
    for (double x : xi) {
      const std::vector<double> grid(model.dims.size(), x);
      sup.push_back({{"xi", x},
                     {"probability", hdldp::supremum_probability(model, grid)}});
    }
    result["sup_prob"] = sup;
  }
  write_json(result, out);
  return 0;
}

int run_recalibrate(const std::string& estimate_path,
                    const std::string& model_path, const std::string& reg,
                    double kappa, bool no_threshold, double clamp,
                    const std::string& out) {
  const json est_json = load_json(estimate_path);
  std::vector<double> theta_hat;
  if (est_json.is_array()) {
    theta_hat = est_json.get<std::vector<double>>();
  } else {
    theta_hat = est_json.at("theta_hat").get<std::vector<double>>();
  }
  const hdldp::DeviationModel model =
      hdldp::DeviationModel::from_json(load_json(model_path));
  hdldp::RecalibrationConfig cfg;
  cfg.regularizer = hdldp::regularizer_from_string(reg);
  cfg.kappa = kappa;
  cfg.apply_threshold = !no_threshold;
  cfg.clamp = clamp;
  const hdldp::RecalibrationResult res =
      hdldp::recalibrate(theta_hat, model, cfg);
  json j = res.to_json();
  j["config"] = cfg.to_json();
  write_json(j, out);
  return 0;
}

int run_bench(const std::string& config_path, const std::string& out_csv,
              const std::string& out_json) {
  const hdldp::BenchmarkConfig cfg =
      hdldp::BenchmarkConfig::from_json(load_json(config_path));
  const hdldp::BenchmarkTable table = hdldp::benchmark_mechanisms(cfg);
  if (!out_csv.empty()) table.save_csv(out_csv);
  write_json(table.to_json(), out_json);
  return 0;
}

int run_validate(const std::string& config_path, std::optional<double> eps,
                 std::optional<std::size_t> m,
                 std::optional<std::size_t> trials,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::string> mechanism,
                 const std::string& hist_csv, const std::string& out) {
  hdldp::ValidationConfig cfg =
      hdldp::ValidationConfig::from_json(load_json(config_path));
  if (eps) cfg.total_eps = *eps;
  if (m) cfg.m = *m;
  if (trials) cfg.trials = *trials;
  if (seed) cfg.seed = *seed;
  if (mechanism) cfg.mechanism = hdldp::mechanism_kind_from_string(*mechanism);
  const hdldp::ValidationReport report = hdldp::validate_framework(cfg);
  if (!hist_csv.empty()) report.save_histogram_csv(hist_csv);
  write_json(report.to_json(), out);
  return 0;
}

int run_experiment_cmd(const std::string& config_path,
                       std::optional<double> eps, std::optional<std::size_t> m,
                       std::optional<std::size_t> trials,
                       std::optional<std::uint64_t> seed,
                       std::optional<std::string> mechanism,
                       const std::vector<double>& sweep_eps,
                       const std::string& sweep_csv, const std::string& out) {
  hdldp::ExperimentConfig cfg =
      hdldp::ExperimentConfig::from_json(load_json(config_path));
  if (eps) cfg.total_eps = *eps;
  if (m) cfg.m = *m;
  if (trials) cfg.trials = *trials;
  if (seed) cfg.seed = *seed;
  if (mechanism) cfg.mechanism = hdldp::mechanism_kind_from_string(*mechanism);

  if (sweep_eps.empty()) {
    const hdldp::ExperimentReport report = hdldp::run_experiment(cfg);
    write_json(report.to_json(), out);
    return 0;
  }

  // MSE-vs-eps sweep: one full experiment per budget, plot-ready CSV.
  json runs = json::array();
  std::ofstream csv;
  if (!sweep_csv.empty()) {
    csv.open(sweep_csv);
    if (!csv) throw std::runtime_error("cannot write " + sweep_csv);
    csv << "eps,method,mse_mean,mse_std\n";
  }
  for (double budget : sweep_eps) {
    cfg.total_eps = budget;
    const hdldp::ExperimentReport report = hdldp::run_experiment(cfg);
    for (const auto& method : report.methods) {
      if (csv.is_open()) {
        csv << budget << ',' << method.name << ',' << method.mse_mean << ','
            << method.mse_std << '\n';
      }
    }
    runs.push_back(report.to_json());
  }
  write_json(json{{"sweep_eps", sweep_eps}, {"runs", runs}}, out);
  return 0;
}

int run_freq(const std::string& data_path, const std::string& schema_path,
             const std::string& kind, double eps, std::size_t m,
             std::uint64_t seed, const std::string& recal,
             const std::string& out) {
  const hdldp::CategoricalDataset data =
      hdldp::load_categorical_csv(data_path);
  const hdldp::CategoricalSchema schema =
      hdldp::CategoricalSchema::from_json(load_json(schema_path));
  std::optional<hdldp::RecalibrationConfig> recal_cfg;
  if (!recal.empty() && recal != "none") {
    hdldp::RecalibrationConfig c;
    c.regularizer = hdldp::regularizer_from_string(recal);
    recal_cfg = c;
  }
  const hdldp::FrequencyEstimate est = hdldp::estimate_frequencies(
      data, schema, hdldp::mechanism_kind_from_string(kind), eps, m, seed,
      recal_cfg ? &*recal_cfg : nullptr);
  json j = est.to_json();
  j["seed"] = seed;
  j["eps"] = eps;
  j["m"] = m;
  write_json(j, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-dimensional local-differential-privacy mean and "
               "frequency estimation harness"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  std::string gen_config, gen_out = "data.csv";
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "generator config JSON")->required();
  gen->add_option("--seed", gen_seed, "seed override");
  gen->add_option("--out", gen_out, "output CSV path");

  auto* pert = app.add_subcommand("perturb", "perturb a dataset into reports");
  std::string pert_data, pert_out = "reports.csv";
  MechanismFlags pert_mech;
  std::uint64_t pert_seed = 1;
  pert->add_option("--data", pert_data, "dataset CSV")->required();
  add_mechanism_flags(pert, pert_mech);
  pert->add_option("--seed", pert_seed, "seed");
  pert->add_option("--out", pert_out, "report stream CSV");

  auto* agg = app.add_subcommand("aggregate", "aggregate a report stream");
  std::string agg_reports, agg_out;
  std::size_t agg_d = 0;
  agg->add_option("--reports", agg_reports, "report stream CSV")->required();
  agg->add_option("--d", agg_d, "dimension count")->required();
  agg->add_option("--out", agg_out, "output JSON (default stdout)");

  auto* ana = app.add_subcommand("analyze", "deviation model and bounds");
  MechanismFlags ana_mech;
  std::string ana_dist, ana_out;
  double ana_r = 10000.0;
  std::vector<double> ana_xi;
  add_mechanism_flags(ana, ana_mech);
  ana->add_option("--value-dist", ana_dist,
                  "value distribution JSON (object or per-dimension array)");
  ana->add_option("--r", ana_r, "reports per dimension");
  ana->add_option("--xi", ana_xi, "supremum tolerances to evaluate");
  ana->add_option("--out", ana_out, "output JSON (default stdout)");

  auto* rec = app.add_subcommand("recalibrate", "re-calibrate an estimate");
  std::string rec_est, rec_model, rec_reg = "l1", rec_out;
  double rec_kappa = 3.0, rec_clamp = 0.05;
  bool rec_no_threshold = false;
  rec->add_option("--estimate", rec_est,
                  "aggregate JSON ({theta_hat: [...]}) or plain array")
      ->required();
  rec->add_option("--model", rec_model, "deviation model JSON")->required();
  rec->add_option("--regularizer", rec_reg, "l1 | l2 | none");
  rec->add_option("--kappa", rec_kappa, "sup multiplier");
  rec->add_flag("--no-threshold", rec_no_threshold,
                "apply weights even below the enhancement thresholds");
  rec->add_option("--clamp", rec_clamp, "denominator floor for l2 weights");
  rec->add_option("--out", rec_out, "output JSON (default stdout)");

  auto* bench = app.add_subcommand("bench", "supremum-probability benchmark");
  std::string bench_config, bench_csv, bench_out;
  bench->add_option("--config", bench_config, "benchmark config JSON")
      ->required();
  bench->add_option("--csv", bench_csv, "table CSV path");
  bench->add_option("--out", bench_out, "output JSON (default stdout)");

  auto* val = app.add_subcommand("validate", "empirical framework validation");
  std::string val_config, val_hist, val_out;
  std::optional<double> val_eps;
  std::optional<std::size_t> val_m, val_trials;
  std::optional<std::uint64_t> val_seed;
  std::optional<std::string> val_mech;
  val->add_option("--config", val_config, "validation config JSON")->required();
  val->add_option("--eps", val_eps, "budget override");
  val->add_option("--m", val_m, "sampled dimensions override");
  val->add_option("--trials", val_trials, "trials override");
  val->add_option("--seed", val_seed, "seed override");
  val->add_option("--mechanism", val_mech, "mechanism override");
  val->add_option("--histogram", val_hist, "histogram CSV path");
  val->add_option("--out", val_out, "output JSON (default stdout)");

  auto* run = app.add_subcommand("run", "end-to-end MSE experiment");
  std::string run_config, run_out;
  std::optional<double> run_eps;
  std::optional<std::size_t> run_m, run_trials;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_mech;
  std::vector<double> run_sweep;
  std::string run_sweep_csv;
  run->add_option("--config", run_config, "experiment config JSON")->required();
  run->add_option("--eps", run_eps, "budget override");
  run->add_option("--m", run_m, "sampled dimensions override");
  run->add_option("--trials", run_trials, "trials override");
  run->add_option("--seed", run_seed, "seed override");
  run->add_option("--mechanism", run_mech, "mechanism override");
  run->add_option("--sweep-eps", run_sweep,
                  "run once per budget and emit an MSE-vs-eps table");
  run->add_option("--sweep-csv", run_sweep_csv, "sweep table CSV path");
  run->add_option("--out", run_out, "output JSON (default stdout)");

  auto* freq = app.add_subcommand("freq", "categorical frequency estimation");
  std::string freq_data, freq_schema, freq_kind = "laplace", freq_recal,
                                      freq_out;
  double freq_eps = 1.0;
  std::size_t freq_m = 1;
  std::uint64_t freq_seed = 1;
  freq->add_option("--data", freq_data, "categorical CSV")->required();
  freq->add_option("--schema", freq_schema, "schema JSON")->required();
  freq->add_option("--mechanism", freq_kind, "laplace | piecewise | squarewave");
  freq->add_option("--eps", freq_eps, "total budget");
  freq->add_option("--m", freq_m, "sampled dimensions per user");
  freq->add_option("--seed", freq_seed, "seed");
  freq->add_option("--recalibrate", freq_recal, "none | l1 | l2");
  freq->add_option("--out", freq_out, "output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen_data(gen_config, gen_seed, gen_out);
    if (pert->parsed()) {
      return run_perturb(pert_data, pert_mech, pert_seed, pert_out);
    }
    if (agg->parsed()) return run_aggregate(agg_reports, agg_d, agg_out);
    if (ana->parsed()) {
      return run_analyze(ana_mech, ana_dist, ana_r, ana_xi, ana_out);
    }
    if (rec->parsed()) {
      return run_recalibrate(rec_est, rec_model, rec_reg, rec_kappa,
                             rec_no_threshold, rec_clamp, rec_out);
    }
    if (bench->parsed()) return run_bench(bench_config, bench_csv, bench_out);
    if (val->parsed()) {
      return run_validate(val_config, val_eps, val_m, val_trials, val_seed,
                          val_mech, val_hist, val_out);
    }
    if (run->parsed()) {
      return run_experiment_cmd(run_config, run_eps, run_m, run_trials,
                                run_seed, run_mech, run_sweep, run_sweep_csv,
                                run_out);
    }
    if (freq->parsed()) {
      return run_freq(freq_data, freq_schema, freq_kind, freq_eps, freq_m,
                      freq_seed, freq_recal, freq_out);
    }
  } catch (const std::exception& e) {
    const char* type = "error";
    if (dynamic_cast<const std::invalid_argument*>(&e)) {
      type = "invalid_argument";
    } else if (dynamic_cast<const std::out_of_range*>(&e)) {
      type = "out_of_range";
    } else if (dynamic_cast<const std::runtime_error*>(&e)) {
      type = "runtime_error";
    }
    const json err{{"error", {{"type", type}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
