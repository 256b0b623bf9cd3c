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

// MAC/BOP accounting, additive network latency and baseline comparisons.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freebits/latdict.hpp"
#include "freebits/netmodel.hpp"

namespace freebits {

// Multiply-accumulates of one invocation; one accumulate per output element
// for add layers.
std::int64_t macs(const LayerType& lt);

// macs * b_in * b_wt
std::int64_t layer_bops(const LayerType& lt, const PrecisionPair& pp);
std::int64_t total_bops(const NetworkConfig& net);

// Looks up one layer; throws UnprofiledError naming the layer and pair.
Cycles layer_latency(const LatencyDictionary& ld, const Layer& layer);

// Sum of per-layer latencies (layer-by-layer execution).
Cycles total_latency(const LatencyDictionary& ld, const NetworkConfig& net);

struct LayerReport {
  std::string id;
  PrecisionPair precision;
  Cycles cycles = 0;
  std::int64_t bops = 0;
};

struct ConfigReport {
  std::string name;
  Cycles total_latency = 0;
  std::int64_t total_bops = 0;
  // 100 * (L - L_base) / L_base
  double latency_vs_baseline = 0.0;
  // Same quantity in tenths of a percent, rounded half-to-even. This is
  // what gets printed.
  std::int64_t latency_vs_baseline_tenths = 0;
  std::optional<double> accuracy_annotation;
  std::vector<LayerReport> layers;
};

// Throws ValidationError when the two configs do not share a topology.
ConfigReport compare(const LatencyDictionary& ld, const NetworkConfig& net,
                     const NetworkConfig& baseline);

// Signed percent with one decimal, e.g. "+0.0%", "-27.9%".
std::string format_percent_tenths(std::int64_t tenths);
// round_half_even(1000 * (value - base) / base)
std::int64_t relative_change_tenths(Cycles value, Cycles base);

// Aligned text table with the "Lat. vs 8b" / "Acc." column layout. Rows are
// sorted by latency, then name.
std::string render_report_table(std::span<const ConfigReport> reports);
std::string reports_to_json(std::span<const ConfigReport> reports);

}  // namespace freebits
