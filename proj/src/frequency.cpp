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

#include "hdldp/frequency.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hdldp/collector.hpp"
#include "hdldp/exact_sum.hpp"
#include "hdldp/framework.hpp"

namespace hdldp {

void CategoricalSchema::validate() const {
  if (categories.empty()) {
    throw std::invalid_argument("schema needs at least one dimension");
  }
  for (std::uint32_t v : categories) {
    if (v < 2) {
      throw std::invalid_argument("every dimension needs >= 2 categories");
    }
  }
}

nlohmann::json CategoricalSchema::to_json() const {
  return {{"categories", categories}};
}

CategoricalSchema CategoricalSchema::from_json(const nlohmann::json& j) {
  CategoricalSchema schema;
  schema.categories = j.at("categories").get<std::vector<std::uint32_t>>();
  schema.validate();
  return schema;
}

std::vector<double> encode(std::uint32_t category_index, std::uint32_t v) {
  if (category_index >= v) {
    throw std::out_of_range("category index " +
                            std::to_string(category_index) +
                            " out of range for " + std::to_string(v) +
                            " categories");
  }
  std::vector<double> one_hot(v, 0.0);
  one_hot[category_index] = 1.0;
  return one_hot;
}

std::vector<double> postprocess(std::span<const double> frequencies) {
  std::vector<double> out(frequencies.begin(), frequencies.end());
  for (double& f : out) f = std::max(f, 0.0);
  ExactSum total;
  for (double f : out) total.add(f);
  const double sum = total.value();
  if (sum <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& f : out) f /= sum;
  return out;
}

FrequencyEstimate estimate_frequencies_with(
    const CategoricalDataset& data, const CategoricalSchema& schema,
    const Mechanism& mechanism, double eps_per_entry, std::size_t m,
    std::uint64_t seed, const RecalibrationConfig* recalibration) {
  schema.validate();
  if (data.d != schema.dimensions()) {
    throw std::invalid_argument("dataset and schema dimensions differ");
  }
  if (m < 1 || m > data.d) {
    throw std::invalid_argument("m must satisfy 1 <= m <= d");
  }
  const bool unit_native = mechanism.input_min() == 0.0;

  // One accumulator per (dimension, category) entry.
  std::vector<std::vector<ExactSum>> sums(data.d);
  std::vector<std::int64_t> counts(data.d, 0);
  for (std::size_t j = 0; j < data.d; ++j) {
    sums[j].assign(schema.categories[j], ExactSum{});
  }

  // Stream domain separator for the frequency pipeline's user streams.
  constexpr std::uint64_t kFrequencyTag = 0x66726571ULL;
  DimensionSampler sampler(data.d);
  std::vector<std::uint32_t> dims;
  for (std::size_t i = 0; i < data.n; ++i) {
    Rng rng(seed, {kFrequencyTag, i});
    sampler.sample(m, rng, dims);
    for (std::uint32_t j : dims) {
      const std::uint32_t v = schema.categories[j];
      const std::uint32_t category = data.at(i, j);
      if (category >= v) {
        throw std::out_of_range("category index out of schema range at row " +
                                std::to_string(i));
      }
      ++counts[j];
      for (std::uint32_t entry = 0; entry < v; ++entry) {
        double t = entry == category ? 1.0 : 0.0;
        if (!unit_native) t = from_unit_interval(t);  // one-hots live in [0,1]
        sums[j][entry].add(mechanism.perturb(t, rng));
      }
    }
  }

  // Per-entry means in the mechanism's estimation space.
  std::vector<std::vector<double>> means(data.d);
  for (std::size_t j = 0; j < data.d; ++j) {
    means[j].resize(schema.categories[j], 0.0);
    if (counts[j] == 0) continue;
    for (std::size_t entry = 0; entry < means[j].size(); ++entry) {
      means[j][entry] =
          sums[j][entry].value() / static_cast<double>(counts[j]);
    }
  }

  if (recalibration != nullptr &&
      recalibration->regularizer != Regularizer::kNone) {
    const double expected_r = static_cast<double>(data.n) *
                              static_cast<double>(m) /
                              static_cast<double>(data.d);
    const MechanismSpec spec =
        MechanismSpec::make(mechanism.kind(), eps_per_entry);
    // Entry values are one-hot, so a two-point distribution over the encoded
    // levels models the original values of every entry.
    ValueDistribution two_point;
    two_point.values = unit_native ? std::vector<double>{0.0, 1.0}
                                   : std::vector<double>{-1.0, 1.0};
    two_point.probs = {0.5, 0.5};
    const DimensionDeviation dev =
        deviation_model(spec, spec.bounded ? &two_point : nullptr, expected_r);
    for (std::size_t j = 0; j < data.d; ++j) {
      DeviationModel model;
      model.dims.assign(means[j].size(), dev);
      means[j] = recalibrate(means[j], model, *recalibration).theta_star;
    }
  }

  FrequencyEstimate result;
  result.eps_per_entry = eps_per_entry;
  result.raw.resize(data.d);
  result.frequencies.resize(data.d);
  for (std::size_t j = 0; j < data.d; ++j) {
    result.raw[j].resize(means[j].size());
    for (std::size_t entry = 0; entry < means[j].size(); ++entry) {
      result.raw[j][entry] =
          unit_native ? means[j][entry] : to_unit_interval(means[j][entry]);
    }
    result.frequencies[j] = postprocess(result.raw[j]);
  }
  return result;
}

FrequencyEstimate estimate_frequencies(const CategoricalDataset& data,
                                       const CategoricalSchema& schema,
                                       MechanismKind kind, double total_eps,
                                       std::size_t m, std::uint64_t seed,
                                       const RecalibrationConfig* recalibration) {
  if (!(total_eps > 0.0)) {
    throw std::invalid_argument("total budget must be positive");
  }
  // eps/(2m) per entry: at most two entries change between two categories,
  // so each reported dimension consumes 2 * eps_per_entry and a user's m
  // reports compose to exactly eps.
  const double eps_per_entry = total_eps / (2.0 * static_cast<double>(m));
  auto mechanism = make_mechanism(kind, eps_per_entry);
  return estimate_frequencies_with(data, schema, *mechanism, eps_per_entry, m,
                                   seed, recalibration);
}

nlohmann::json FrequencyEstimate::to_json() const {
  return {{"raw", raw},
          {"frequencies", frequencies},
          {"eps_per_entry", eps_per_entry}};
}

CategoricalDataset load_categorical_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw std::runtime_error(path + ": missing header");
  }
  const std::size_t d = 1 + std::count(line.begin(), line.end(), ',');
  CategoricalDataset data;
  data.d = d;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const char* p = line.data();
    const char* end = p + line.size();
    std::size_t col = 0;
    while (true) {
      const char* comma = std::find(p, end, ',');
      std::uint32_t value = 0;
      auto [ptr, ec] = std::from_chars(p, comma, value);
      if (ec != std::errc() || ptr != comma) {
        throw std::runtime_error(path + ": row " + std::to_string(row) +
                                 ", column " + std::to_string(col) +
                                 ": not a category index");
      }
      data.values.push_back(value);
      ++col;
      if (comma == end) break;
      p = comma + 1;
    }
    if (col != d) {
      throw std::runtime_error(path + ": row " + std::to_string(row) +
                               " has " + std::to_string(col) +
                               " cells, expected " + std::to_string(d));
    }
  }
  if (row == 0) throw std::runtime_error(path + ": no data rows");
  data.n = row;
  return data;
}

}  // namespace hdldp
