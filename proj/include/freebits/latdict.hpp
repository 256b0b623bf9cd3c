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

// Latency dictionary keyed by (layer type, precision pair), loaded from
// profiling tables or generated from a parametric hardware model.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "freebits/netmodel.hpp"

namespace freebits {

using Cycles = std::uint64_t;

enum class LatencySource { kProfiled, kSynthetic };

class LatencyDictionary {
 public:
  using Key = std::pair<std::string, PrecisionPair>;

  LatencyDictionary(LatencySource source, std::string profile_name)
      : source_(source), profile_name_(std::move(profile_name)) {}

  // Throws ValidationError if the entry exists already or cycles == 0.
  void insert(const std::string& lt_key, const PrecisionPair& pp, Cycles cycles);

  // nullopt is the "not profiled" signal; callers decide whether it is fatal.
  std::optional<Cycles> lookup(const LayerType& lt, const PrecisionPair& pp) const;
  std::optional<Cycles> lookup(const std::string& lt_key, const PrecisionPair& pp) const;

  std::size_t size() const { return entries_.size(); }
  LatencySource source() const { return source_; }
  const std::string& profile_name() const { return profile_name_; }
  const std::map<Key, Cycles>& entries() const { return entries_; }

 private:
  LatencySource source_;
  std::string profile_name_;
  std::map<Key, Cycles> entries_;
};

// CSV with header `lt_key,b_in,b_wt,cycles`. Duplicate rows and
// non-positive latencies are rejected with the offending row number.
LatencyDictionary load_latency_dict(std::string_view text,
                                    std::string profile_name = "profiled");
// Rows sorted by key, then by precision pair.
std::string serialize_latency_dict(const LatencyDictionary& ld);

// Parameters of the synthetic latency model for one ISA variant.
struct HardwareProfile {
  std::string name;
  std::int64_t n_cores = 8;
  std::int64_t l1_bytes = 64 * 1024;
  // MAC/cycle/core for compute bit-widths 2, 4, 8 (indexed via macs_per_cycle()).
  std::map<int, double> macs_per_cycle_per_core = {{2, 2.0}, {4, 2.0}, {8, 2.0}};
  double sw_unpack_cycles_per_elem = 0.25;
  bool hw_unpack = false;
  bool sub_byte_simd = false;
  std::int64_t tile_overhead_cycles = 1500;
  double dma_bytes_per_cycle = 8.0;
  double l1_fill_factor = 0.85;

  double macs_per_cycle(int bits) const { return macs_per_cycle_per_core.at(bits); }
  std::optional<std::string> check() const;
};

// JSON with exactly the HardwareProfile fields.
HardwareProfile parse_hardware_profile(std::string_view text);
std::string serialize_hardware_profile(const HardwareProfile& hp);

// Shipped profiles: "xpulpv2", "xpulpnnv1", "xpulpnnv2".
HardwareProfile builtin_profile(std::string_view name);

// Breakdown of one synthetic latency evaluation; total() is what the
// dictionary stores.
struct LatencyBreakdown {
  Cycles compute = 0;
  Cycles unpack = 0;
  Cycles movement = 0;
  std::int64_t footprint_bytes = 0;
  std::int64_t n_tiles = 0;

  Cycles total() const { return compute + unpack + movement; }
};

LatencyBreakdown synth_latency_breakdown(const HardwareProfile& hp, const LayerType& lt,
                                         const PrecisionPair& pp);
Cycles synth_latency(const HardwareProfile& hp, const LayerType& lt, const PrecisionPair& pp);

// unique_layer_types(net) x p_all, each entry from synth_latency.
LatencyDictionary generate_dict(const HardwareProfile& hp, const NetworkConfig& net,
                                const AllowedPrecisionSet& p_all);

}  // namespace freebits
