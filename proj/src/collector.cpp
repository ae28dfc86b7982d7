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
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hdldp {

DimensionSampler::DimensionSampler(std::size_t d) : perm_(d) {
  std::iota(perm_.begin(), perm_.end(), 0u);
}

void DimensionSampler::sample(std::size_t m, Rng& rng,
                              std::vector<std::uint32_t>& out) {
  const std::size_t d = perm_.size();
  if (m < 1 || m > d) {
    throw std::invalid_argument("m must satisfy 1 <= m <= d");
  }
  // Partial Fisher-Yates over a persistent permutation buffer; touched slots
  // are swapped back afterwards so the buffer stays the identity.
  touched_.resize(m);
  out.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(d - k));
    touched_[k] = static_cast<std::uint32_t>(j);
    std::swap(perm_[k], perm_[j]);
    out[k] = perm_[k];
  }
  for (std::size_t k = m; k-- > 0;) {
    std::swap(perm_[k], perm_[touched_[k]]);
  }
}

std::vector<std::uint32_t> sample_dimensions(std::size_t d, std::size_t m,
                                             Rng& rng) {
  DimensionSampler sampler(d);
  std::vector<std::uint32_t> out;
  sampler.sample(m, rng, out);
  return out;
}

std::vector<Report> perturb_record(std::span<const double> record,
                                   const Mechanism& mechanism, std::size_t m,
                                   Rng& rng) {
  const std::size_t d = record.size();
  if (m < 1 || m > d) {
    throw std::invalid_argument("m must satisfy 1 <= m <= d");
  }
  const bool unit_native = mechanism.input_min() == 0.0;

  std::vector<std::uint32_t> dims = sample_dimensions(d, m, rng);
  std::vector<Report> reports(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::uint32_t j = dims[k];
    double t = record[j];
    if (unit_native) t = to_unit_interval(t);
    double value = mechanism.perturb(t, rng);
    if (unit_native) value = from_unit_interval(value);
    reports[k] = {j, value};
  }
  return reports;
}

AggregateState::AggregateState(std::size_t d) : sums_(d), counts_(d, 0) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
}

void AggregateState::accept(const Report& report) {
  if (report.dim_index >= sums_.size()) {
    throw std::out_of_range("report dimension " +
                            std::to_string(report.dim_index) +
                            " out of range");
  }
  sums_[report.dim_index].add(report.value);
  ++counts_[report.dim_index];
}

void AggregateState::accept(std::span<const Report> reports) {
  for (const Report& r : reports) accept(r);
}

void AggregateState::merge(const AggregateState& other) {
  if (other.sums_.size() != sums_.size()) {
    throw std::invalid_argument("cannot merge states of different width");
  }
  for (std::size_t j = 0; j < sums_.size(); ++j) {
    sums_[j].merge(other.sums_[j]);
    counts_[j] += other.counts_[j];
  }
}

std::int64_t AggregateState::total_reports() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::optional<double> AggregateState::mean(std::size_t dim) const {
  if (counts_[dim] == 0) return std::nullopt;
  return sums_[dim].value() / static_cast<double>(counts_[dim]);
}

AggregateResult aggregate(const AggregateState& state) {
  AggregateResult result;
  const std::size_t d = state.dimensions();
  result.theta_hat.resize(d, 0.0);
  result.counts.resize(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    result.counts[j] = state.count(j);
    if (auto mean = state.mean(j)) {
      result.theta_hat[j] = *mean;
    } else {
      result.missing.push_back(j);
    }
  }
  return result;
}

AggregateResult aggregate(std::span<const Report> reports, std::size_t d) {
  AggregateState state(d);
  state.accept(reports);
  return aggregate(state);
}

nlohmann::json AggregateResult::to_json() const {
  return {{"theta_hat", theta_hat}, {"counts", counts}, {"missing", missing}};
}

AggregateResult AggregateResult::from_json(const nlohmann::json& j) {
  AggregateResult r;
  r.theta_hat = j.at("theta_hat").get<std::vector<double>>();
  r.counts = j.at("counts").get<std::vector<std::int64_t>>();
  r.missing = j.at("missing").get<std::vector<std::size_t>>();
  return r;
}

double prior_mean_bias(const MechanismSpec& spec,
                       const ValueDistribution& prior) {
  prior.validate();
  auto mechanism = make_mechanism(spec);
  ExactSum acc;
  for (std::size_t z = 0; z < prior.values.size(); ++z) {
    acc.add(prior.probs[z] * mechanism->stats(prior.values[z]).bias);
  }
  double bias = acc.value();
  // Square Wave biases are native to [0,1]; the report stream lives in the
  // [-1,1] data domain where they count double.
  if (spec.kind == MechanismKind::kSquareWave) bias *= 2.0;
  return bias;
}

std::vector<double> calibrate(const std::vector<double>& theta_hat,
                              const MechanismSpec& spec,
                              const std::vector<ValueDistribution>* priors) {
  if (!spec.bounded || priors == nullptr) {
    // Additive noise is zero-mean; without a prior the estimate of a bounded
    // mechanism is reported as-is.
    return theta_hat;
  }
  if (priors->size() != theta_hat.size()) {
    throw std::invalid_argument("one prior per dimension required");
  }
  std::vector<double> out(theta_hat.size());
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    out[j] = theta_hat[j] - prior_mean_bias(spec, (*priors)[j]);
  }
  return out;
}

void save_reports_csv(std::span<const Report> reports,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "dim_index,value\n";
  char buf[48];
  for (const Report& r : reports) {
    std::snprintf(buf, sizeof(buf), "%u,%.17g\n", r.dim_index, r.value);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Report> load_reports_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim_index", 0) != 0) {
    throw std::runtime_error(path + ": missing dim_index,value header");
  }
  std::vector<Report> reports;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const char* p = line.data();
    const char* end = p + line.size();
    const char* comma = std::find(p, end, ',');
    Report r;
    auto [p1, ec1] = std::from_chars(p, comma, r.dim_index);
    if (ec1 != std::errc() || p1 != comma || comma == end) {
      throw std::runtime_error(path + ": row " + std::to_string(row) +
                               ": bad dim_index");
    }
    auto [p2, ec2] = std::from_chars(comma + 1, end, r.value);
    if (ec2 != std::errc() || p2 != end) {
      throw std::runtime_error(path + ": row " + std::to_string(row) +
                               ": bad value");
    }
    reports.push_back(r);
  }
  return reports;
}

}  // namespace hdldp
