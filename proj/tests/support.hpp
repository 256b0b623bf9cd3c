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

// Random instance generators and independent reference implementations
// shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "freebits/latdict.hpp"
#include "freebits/netmodel.hpp"
#include "freebits/search.hpp"

namespace freebits::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) {
  return read_file(std::string(FREEBITS_FIXTURE_DIR) + "/" + name);
}

inline const std::vector<PrecisionPair>& all_pairs() {
  static const std::vector<PrecisionPair> pairs = [] {
    std::vector<PrecisionPair> v;
    for (int a : kBitwidths)
      for (int w : kBitwidths) v.push_back({a, w});
    return v;
  }();
  return pairs;
}

// Valid layer type with kernel >= stride and small shapes.
inline LayerType random_layer_type(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  LayerType lt;
  lt.op_kind = static_cast<OpKind>(pick(0, 4));
  lt.in_height = pick(1, 32);
  lt.in_width = pick(1, 32);
  lt.in_channels = 8 * pick(1, 16);
  switch (lt.op_kind) {
    case OpKind::kConv2d:
      lt.out_channels = 8 * pick(1, 16);
      lt.kernel_h = lt.kernel_w = 2 * pick(0, 2) + 1;
      lt.stride_h = lt.stride_w = pick(1, std::min<std::int64_t>(2, lt.kernel_h));
      lt.padding_h = lt.padding_w = lt.kernel_h / 2;
      break;
    case OpKind::kDepthwiseConv2d:
      lt.out_channels = lt.in_channels;
      lt.groups = lt.in_channels;
      lt.kernel_h = lt.kernel_w = 3;
      lt.stride_h = lt.stride_w = pick(1, 2);
      lt.padding_h = lt.padding_w = 1;
      break;
    case OpKind::kPointwiseConv2d:
      lt.out_channels = 8 * pick(1, 16);
      break;
    case OpKind::kLinear:
      lt.in_height = lt.in_width = 1;
      lt.out_channels = 8 * pick(1, 128);
      break;
    case OpKind::kAdd:
      lt.out_channels = lt.in_channels;
      break;
  }
  return lt;
}

inline PrecisionPair random_pair(std::mt19937_64& rng, const LayerType& lt) {
  PrecisionPair pp = all_pairs()[std::uniform_int_distribution<int>(0, 8)(rng)];
  if (lt.op_kind == OpKind::kAdd) pp.b_wt = pp.b_in;
  return pp;
}

inline NetworkConfig random_network(std::mt19937_64& rng, std::size_t n_layers) {
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < n_layers; ++i) {
    LayerType lt = random_layer_type(rng);
    layers.push_back({"l" + std::to_string(i), lt, random_pair(rng, lt)});
  }
  return NetworkConfig("random", std::move(layers));
}

// Every layer type of `net` crossed with all nine pairs. Latencies are drawn
// from a narrow range so that ties are common.
inline LatencyDictionary random_complete_dict(std::mt19937_64& rng, const NetworkConfig& net,
                                              Cycles max_cycles = 40) {
  LatencyDictionary ld(LatencySource::kProfiled, "random");
  std::uniform_int_distribution<Cycles> cyc(1, max_cycles);
  for (const auto& lt : unique_layer_types(net))
    for (const auto& pp : all_pairs()) ld.insert(canonical_key(lt), pp, cyc(rng));
  return ld;
}

// Per-layer scan written directly from the heuristic's definition: among
// profiled pairs of p_all that dominate the current one and are no slower,
// pick the fastest, then the one with more bits, then more input bits.
inline NetworkConfig reference_free_bits(const LatencyDictionary& ld, const NetworkConfig& net,
                                         const AllowedPrecisionSet& p_all) {
  std::vector<PrecisionPair> out;
  for (const auto& layer : net.layers()) {
    const PrecisionPair cur = layer.precision;
    const Cycles lat0 = *ld.lookup(layer.type, cur);
    std::vector<std::tuple<Cycles, int, int, PrecisionPair>> ranked;
    ranked.emplace_back(lat0, -cur.total_bits(), -cur.b_in, cur);
    for (const auto& pp : p_all) {
      if (layer.type.op_kind == OpKind::kAdd && pp.b_in != pp.b_wt) continue;
      if (pp.b_in < cur.b_in || pp.b_wt < cur.b_wt) continue;
      auto lat = ld.lookup(layer.type, pp);
      if (!lat || *lat > lat0) continue;
      ranked.emplace_back(*lat, -pp.total_bits(), -pp.b_in, pp);
    }
    out.push_back(std::get<3>(*std::min_element(ranked.begin(), ranked.end())));
  }
  return net.with_precisions(out);
}

// Quadratic dominance filter; duplicates keep their first occurrence.
inline std::vector<ParetoPoint> reference_pareto(const std::vector<ParetoPoint>& pts,
                                                 ObjectiveSense sense) {
  auto better_eq = [&](double a, double b) {
    return sense == ObjectiveSense::kMaximize ? a >= b : a <= b;
  };
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    bool duplicate = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const auto& p = pts[i];
      const auto& q = pts[j];
      if (q.latency == p.latency && q.objective == p.objective) {
        if (j < i) duplicate = true;
        continue;
      }
      if (q.latency <= p.latency && better_eq(q.objective, p.objective)) dominated = true;
    }
    if (!dominated && !duplicate) out.push_back(pts[i]);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.latency < b.latency; });
  return out;
}

inline bool same_points(const std::vector<ParetoPoint>& a, const std::vector<ParetoPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].config_name != b[i].config_name || a[i].latency != b[i].latency ||
        a[i].objective != b[i].objective)
      return false;
  }
  return true;
}

}  // namespace freebits::testing
