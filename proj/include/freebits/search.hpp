// Copyright 2026 The freebits Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Candidate configuration generation: homogeneous baselines, a discrete
// Lagrangian sweep over (accuracy-penalty + lambda * latency), an exhaustive
// reference solver, and Pareto-front extraction.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freebits/latdict.hpp"
#include "freebits/netmodel.hpp"

namespace freebits {

// Sets every layer to `pp`; add layers get (pp.b_in, pp.b_in). When
// `first_layer_b_in` is given, the first layer's input precision is pinned to
// it (the network input is image data, normally 8-bit). The accuracy
// annotation is dropped.
NetworkConfig homogeneous_config(const NetworkConfig& net, const PrecisionPair& pp,
                                 std::optional<int> first_layer_b_in = std::nullopt);

// Per-layer accuracy-loss proxy for every precision pair. Zero at (8,8),
// non-negative, and non-increasing in each precision coordinate.
class SensitivityModel {
 public:
  using Row = std::array<double, 9>;

  // Throws ValidationError if a row breaks the invariants.
  explicit SensitivityModel(std::vector<Row> rows);

  // penalty(i, pp) = scale_i * ((8 - b_in) + (8 - b_wt))
  static SensitivityModel from_scales(std::span<const double> scales);

  double penalty(std::size_t layer, const PrecisionPair& pp) const;
  std::size_t size() const { return rows_.size(); }

  static std::size_t slot(const PrecisionPair& pp);

 private:
  std::vector<Row> rows_;
};

// JSON object mapping layer id -> scale. Layers not named get 1.0; unknown
// ids and negative scales are rejected.
SensitivityModel parse_sensitivity(std::string_view text, const NetworkConfig& net);
SensitivityModel default_sensitivity(const NetworkConfig& net);

double total_penalty(const NetworkConfig& net, const SensitivityModel& sens);

// Name given to the sweep output for `lambda`.
std::string lambda_config_name(const NetworkConfig& net, double lambda);
std::string format_lambda(double lambda);

// One configuration per lambda; each layer independently minimizes
// penalty + lambda * latency over its eligible pairs (ties: more bits, then
// more input bits). Lambdas must be non-negative and ascending.
std::vector<NetworkConfig> lagrangian_sweep(const NetworkConfig& net, const LatencyDictionary& ld,
                                            const SensitivityModel& sens,
                                            std::span<const double> lambdas,
                                            const AllowedPrecisionSet& p_all);

inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive minimizer of the same scalarized objective. Refuses instances
// with |p_all|^N > kBruteForceLimit.
NetworkConfig brute_force_best(const NetworkConfig& net, const LatencyDictionary& ld,
                               const SensitivityModel& sens, double lambda,
                               const AllowedPrecisionSet& p_all);

// 0 followed by 15 log-spaced values.
std::vector<double> default_lambdas();
// "default", "log:MIN:MAX:N" or a comma-separated list.
std::vector<double> parse_lambda_spec(std::string_view spec);

struct SweepPoint {
  double lambda = 0.0;
  NetworkConfig raw;
  NetworkConfig optimized;
  Cycles latency_before = 0;
  Cycles latency_after = 0;
  double penalty = 0.0;
};

// lagrangian_sweep followed by free_bits on every output.
std::vector<SweepPoint> run_sweep(const NetworkConfig& net, const LatencyDictionary& ld,
                                  const SensitivityModel& sens, std::span<const double> lambdas,
                                  const AllowedPrecisionSet& p_all);

// name,lambda,latency_before,latency_after,penalty
std::string sweep_index_csv(std::span<const SweepPoint> points);

enum class ObjectiveSense { kMaximize, kMinimize };

struct ParetoPoint {
  std::string config_name;
  Cycles latency = 0;
  double objective = 0.0;
};

// Non-dominated subset sorted by latency ascending. Exact duplicates
// (latency and objective) collapse to their first occurrence.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points, ObjectiveSense sense);

}  // namespace freebits
