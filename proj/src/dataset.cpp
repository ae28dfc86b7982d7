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

#include "hdldp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "hdldp/exact_sum.hpp"
#include "hdldp/rng.hpp"

namespace hdldp {

namespace {

double standard_normal(Rng& rng) {
  // Box-Muller; uniform_open keeps the logarithm finite.
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Knuth's product-of-uniforms sampler. exp(-lambda) stays normal for every
// expectation this generator accepts.
std::uint64_t poisson(double lambda, Rng& rng) {
  const double threshold = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = rng.uniform_open();
  while (p > threshold) {
    ++k;
    p *= rng.uniform_open();
  }
  return k;
}

// Stream domain separator; generator streams never collide with the
// experiment-side trial streams derived from the same seed.
constexpr std::uint64_t kDatasetTag = 0x64617461ULL;
constexpr std::uint64_t kMeanStream = 0;
constexpr std::uint64_t kValueStream = 1;

}  // namespace

double Dataset::column_mean(std::size_t col) const {
  ExactSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(at(i, col));
  return acc.value() / static_cast<double>(n);
}

std::vector<double> Dataset::column_means() const {
  std::vector<double> means(d);
  for (std::size_t j = 0; j < d; ++j) means[j] = column_mean(j);
  return means;
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kGaussian:
      return "gaussian";
    case GeneratorKind::kPoisson:
      return "poisson";
    case GeneratorKind::kUniform:
      return "uniform";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  if (name == "gaussian") return GeneratorKind::kGaussian;
  if (name == "poisson") return GeneratorKind::kPoisson;
  if (name == "uniform") return GeneratorKind::kUniform;
  throw std::invalid_argument("unknown generator kind: " + name);
}

void GeneratorConfig::validate() const {
  if (n < 1 || d < 1) {
    throw std::invalid_argument("generator requires n >= 1 and d >= 1");
  }
  if (kind == GeneratorKind::kGaussian) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (high_fraction < 0.0 || high_fraction > 1.0) {
      throw std::invalid_argument("high_fraction must lie in [0,1]");
    }
  }
  if (kind == GeneratorKind::kPoisson) {
    if (!(lambda_min > 0.0) || lambda_max < lambda_min) {
      throw std::invalid_argument("poisson expectation range invalid");
    }
  }
}

nlohmann::json GeneratorConfig::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)},
                   {"n", n},
                   {"d", d},
                   {"seed", seed}};
  switch (kind) {
    case GeneratorKind::kGaussian:
      j["sigma"] = sigma;
      j["high_fraction"] = high_fraction;
      j["mu_high"] = mu_high;
      j["mu_low"] = mu_low;
      break;
    case GeneratorKind::kPoisson:
      j["lambda_min"] = lambda_min;
      j["lambda_max"] = lambda_max;
      break;
    case GeneratorKind::kUniform:
      break;
  }
  return j;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig cfg;
  cfg.kind = generator_kind_from_string(j.at("kind").get<std::string>());
  cfg.n = j.at("n").get<std::size_t>();
  cfg.d = j.at("d").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
  if (j.contains("high_fraction")) {
    cfg.high_fraction = j["high_fraction"].get<double>();
  }
  if (j.contains("mu_high")) cfg.mu_high = j["mu_high"].get<double>();
  if (j.contains("mu_low")) cfg.mu_low = j["mu_low"].get<double>();
  if (j.contains("lambda_min")) cfg.lambda_min = j["lambda_min"].get<double>();
  if (j.contains("lambda_max")) cfg.lambda_max = j["lambda_max"].get<double>();
  cfg.validate();
  return cfg;
}

std::vector<double> generator_column_means(const GeneratorConfig& config) {
  config.validate();
  std::vector<double> means(config.d, 0.0);
  switch (config.kind) {
    case GeneratorKind::kGaussian: {
      const std::size_t high =
          static_cast<std::size_t>(std::ceil(config.high_fraction *
                                             static_cast<double>(config.d)));
      for (std::size_t j = 0; j < config.d; ++j) {
        means[j] = j < high ? config.mu_high : config.mu_low;
      }
      break;
    }
    case GeneratorKind::kPoisson: {
      for (std::size_t j = 0; j < config.d; ++j) {
        Rng rng(config.seed, {kDatasetTag, j, kMeanStream});
        means[j] = rng.uniform(config.lambda_min, config.lambda_max);
      }
      break;
    }
    case GeneratorKind::kUniform:
      break;
  }
  return means;
}

Dataset generate(const GeneratorConfig& config) {
  config.validate();
  Dataset raw;
  raw.n = config.n;
  raw.d = config.d;
  raw.values.resize(config.n * config.d);

  const std::vector<double> means = generator_column_means(config);
  for (std::size_t j = 0; j < config.d; ++j) {
    Rng rng(config.seed, {kDatasetTag, j, kValueStream});
    switch (config.kind) {
      case GeneratorKind::kGaussian:
        for (std::size_t i = 0; i < config.n; ++i) {
          raw.at(i, j) = means[j] + config.sigma * standard_normal(rng);
        }
        break;
      case GeneratorKind::kPoisson:
        for (std::size_t i = 0; i < config.n; ++i) {
          raw.at(i, j) = static_cast<double>(poisson(means[j], rng));
        }
        break;
      case GeneratorKind::kUniform:
        for (std::size_t i = 0; i < config.n; ++i) {
          raw.at(i, j) = rng.uniform(-1.0, 1.0);
        }
        break;
    }
  }
  return normalize(raw);
}

Dataset normalize(const Dataset& dataset) {
  if (dataset.n < 1 || dataset.d < 1) {
    throw std::invalid_argument("cannot normalize an empty dataset");
  }
  Dataset out;
  out.n = dataset.n;
  out.d = dataset.d;
  out.values.resize(dataset.values.size());
  out.scaling.resize(dataset.d);

  for (std::size_t j = 0; j < dataset.d; ++j) {
    double lo = dataset.at(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < dataset.n; ++i) {
      lo = std::min(lo, dataset.at(i, j));
      hi = std::max(hi, dataset.at(i, j));
    }
    out.scaling[j] = {lo, hi};
    if (lo == hi) {
      for (std::size_t i = 0; i < dataset.n; ++i) out.at(i, j) = 0.0;
      continue;
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < dataset.n; ++i) {
      out.at(i, j) = 2.0 * (dataset.at(i, j) - lo) / range - 1.0;
    }
  }
  return out;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file");
  }
  // Header row: dim_0,...,dim_{d-1}. Column count is taken from it.
  std::size_t d = line.empty() ? 0 : 1 + std::count(line.begin(), line.end(), ',');
  if (d == 0) throw std::runtime_error(path + ": missing header");

  Dataset data;
  data.d = d;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    ++row;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      const char* comma = std::find(p, end, ',');
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(p, comma, value);
      if (ec != std::errc() || ptr != comma) {
        throw std::runtime_error(path + ": row " + std::to_string(row) +
                                 ", column " + std::to_string(col) +
                                 ": not a number");
      }
      ++col;
      if (col > d) break;
      data.values.push_back(value);
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

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t j = 0; j < dataset.d; ++j) {
    out << (j ? ",dim_" : "dim_") << j;
  }
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < dataset.n; ++i) {
    std::string line;
    for (std::size_t j = 0; j < dataset.d; ++j) {
      // 17 significant digits round-trips doubles exactly.
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.at(i, j));
      if (j) line += ',';
      line += buf;
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hdldp
