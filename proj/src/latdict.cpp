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

#include "freebits/latdict.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

#include "freebits/errors.hpp"
#include "freebits/metrics.hpp"

namespace freebits {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kCsvHeader = "lt_key,b_in,b_wt,cycles";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

Cycles ceil_to_cycles(double value) {
  return static_cast<Cycles>(std::ceil(value));
}

std::int64_t bytes_for(std::int64_t elements, int bits) {
  return (elements * bits + 7) / 8;
}

}  // namespace

// ---------------------------------------------------------------------------
// LatencyDictionary

void LatencyDictionary::insert(const std::string& lt_key, const PrecisionPair& pp,
                               Cycles cycles) {
  if (cycles == 0)
    throw ValidationError("latency for " + lt_key + " " + to_string(pp) + " must be positive");
  if (!entries_.emplace(Key{lt_key, pp}, cycles).second)
    throw ValidationError("duplicate latency entry for " + lt_key + " " + to_string(pp));
}

std::optional<Cycles> LatencyDictionary::lookup(const std::string& lt_key,
                                                const PrecisionPair& pp) const {
  auto it = entries_.find(Key{lt_key, pp});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<Cycles> LatencyDictionary::lookup(const LayerType& lt,
                                                const PrecisionPair& pp) const {
  return lookup(canonical_key(lt), pp);
}

LatencyDictionary load_latency_dict(std::string_view text, std::string profile_name) {
  LatencyDictionary ld(LatencySource::kProfiled, std::move(profile_name));
  std::size_t row = 0;  // 1-based data row number, header excluded
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCsvHeader)
        throw ParseError("latency table must start with header '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    ++row;
    const std::string where = "latency table row " + std::to_string(row);
    auto fields = split(line, ',');
    if (fields.size() != 4) throw ParseError(where + ": expected 4 fields");
    parse_canonical_key(fields[0]);
    int b_in = 0, b_wt = 0;
    if (!parse_number(fields[1], b_in) || !is_valid_bitwidth(b_in))
      throw ParseError(where + ": b_in must be 2, 4 or 8");
    if (!parse_number(fields[2], b_wt) || !is_valid_bitwidth(b_wt))
      throw ParseError(where + ": b_wt must be 2, 4 or 8");
    long long cycles = 0;
    if (!parse_number(fields[3], cycles)) throw ParseError(where + ": cycles must be an integer");
    if (cycles <= 0) throw ValidationError(where + ": latency must be positive");
    const PrecisionPair pp{b_in, b_wt};
    const std::string key(fields[0]);
    if (ld.lookup(key, pp)) throw ValidationError(where + ": duplicate entry for " + key + " " + to_string(pp));
    ld.insert(key, pp, static_cast<Cycles>(cycles));
  }
  if (!header_seen) throw ParseError("latency table is empty");
  return ld;
}

std::string serialize_latency_dict(const LatencyDictionary& ld) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& [key, cycles] : ld.entries()) {
    out += key.first + "," + std::to_string(key.second.b_in) + "," +
           std::to_string(key.second.b_wt) + "," + std::to_string(cycles) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// HardwareProfile

std::optional<std::string> HardwareProfile::check() const {
  if (n_cores <= 0) return "n_cores must be positive";
  if (l1_bytes <= 0) return "l1_bytes must be positive";
  for (int b : kBitwidths) {
    auto it = macs_per_cycle_per_core.find(b);
    if (it == macs_per_cycle_per_core.end())
      return "macs_per_cycle_per_core is missing bit-width " + std::to_string(b);
    if (!(it->second > 0.0)) return "macs_per_cycle_per_core must be positive";
  }
  if (macs_per_cycle_per_core.size() != kBitwidths.size())
    return "macs_per_cycle_per_core may only name bit-widths 2, 4 and 8";
  const double m2 = macs_per_cycle(2), m4 = macs_per_cycle(4), m8 = macs_per_cycle(8);
  if (sub_byte_simd && !(m2 >= m4 && m4 >= m8))
    return "macs_per_cycle_per_core must not decrease with bit-width when sub_byte_simd is set";
  if (!sub_byte_simd && !(m2 == m8 && m4 == m8))
    return "macs_per_cycle_per_core must be constant without sub_byte_simd";
  if (!(sw_unpack_cycles_per_elem >= 0.0)) return "sw_unpack_cycles_per_elem must be non-negative";
  if (tile_overhead_cycles < 0) return "tile_overhead_cycles must be non-negative";
  if (!(dma_bytes_per_cycle > 0.0)) return "dma_bytes_per_cycle must be positive";
  if (!(l1_fill_factor > 0.0 && l1_fill_factor <= 1.0)) return "l1_fill_factor must lie in (0, 1]";
  return std::nullopt;
}

HardwareProfile parse_hardware_profile(std::string_view text) {
  static const std::set<std::string> kFields = {
      "name", "n_cores", "l1_bytes", "macs_per_cycle_per_core", "sw_unpack_cycles_per_elem",
      "hw_unpack", "sub_byte_simd", "tile_overhead_cycles", "dma_bytes_per_cycle",
      "l1_fill_factor"};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("hardware profile is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("hardware profile must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kFields.count(key)) throw ParseError("hardware profile: unknown field '" + key + "'");
  for (const auto& f : kFields)
    if (!doc.contains(f)) throw ParseError("hardware profile: missing field '" + f + "'");

  auto need = [&](const char* field, bool ok, const char* what) {
    if (!ok) throw ParseError(std::string("hardware profile.") + field + ": expected " + what);
  };
  need("name", doc["name"].is_string(), "string");
  need("n_cores", doc["n_cores"].is_number_integer(), "integer");
  need("l1_bytes", doc["l1_bytes"].is_number_integer(), "integer");
  need("macs_per_cycle_per_core", doc["macs_per_cycle_per_core"].is_object(), "object");
  need("sw_unpack_cycles_per_elem", doc["sw_unpack_cycles_per_elem"].is_number(), "number");
  need("hw_unpack", doc["hw_unpack"].is_boolean(), "boolean");
  need("sub_byte_simd", doc["sub_byte_simd"].is_boolean(), "boolean");
  need("tile_overhead_cycles", doc["tile_overhead_cycles"].is_number_integer(), "integer");
  need("dma_bytes_per_cycle", doc["dma_bytes_per_cycle"].is_number(), "number");
  need("l1_fill_factor", doc["l1_fill_factor"].is_number(), "number");

  HardwareProfile hp;
  hp.name = doc["name"].get<std::string>();
  hp.n_cores = doc["n_cores"].get<std::int64_t>();
  hp.l1_bytes = doc["l1_bytes"].get<std::int64_t>();
  hp.macs_per_cycle_per_core.clear();
  for (const auto& [key, value] : doc["macs_per_cycle_per_core"].items()) {
    int bits = 0;
    if (!parse_number(std::string_view(key), bits) || !is_valid_bitwidth(bits))
      throw ParseError("hardware profile.macs_per_cycle_per_core: unknown bit-width '" + key + "'");
    if (!value.is_number())
      throw ParseError("hardware profile.macs_per_cycle_per_core." + key + ": expected number");
    hp.macs_per_cycle_per_core[bits] = value.get<double>();
  }
  hp.sw_unpack_cycles_per_elem = doc["sw_unpack_cycles_per_elem"].get<double>();
  hp.hw_unpack = doc["hw_unpack"].get<bool>();
  hp.sub_byte_simd = doc["sub_byte_simd"].get<bool>();
  hp.tile_overhead_cycles = doc["tile_overhead_cycles"].get<std::int64_t>();
  hp.dma_bytes_per_cycle = doc["dma_bytes_per_cycle"].get<double>();
  hp.l1_fill_factor = doc["l1_fill_factor"].get<double>();
  if (auto why = hp.check()) throw ValidationError("hardware profile '" + hp.name + "': " + *why);
  return hp;
}

std::string serialize_hardware_profile(const HardwareProfile& hp) {
  ordered_json doc;
  doc["name"] = hp.name;
  doc["n_cores"] = hp.n_cores;
  doc["l1_bytes"] = hp.l1_bytes;
  ordered_json mpc = ordered_json::object();
  for (int b : kBitwidths) mpc[std::to_string(b)] = hp.macs_per_cycle(b);
  doc["macs_per_cycle_per_core"] = mpc;
  doc["sw_unpack_cycles_per_elem"] = hp.sw_unpack_cycles_per_elem;
  doc["hw_unpack"] = hp.hw_unpack;
  doc["sub_byte_simd"] = hp.sub_byte_simd;
  doc["tile_overhead_cycles"] = hp.tile_overhead_cycles;
  doc["dma_bytes_per_cycle"] = hp.dma_bytes_per_cycle;
  doc["l1_fill_factor"] = hp.l1_fill_factor;
  return doc.dump(2) + "\n";
}

HardwareProfile builtin_profile(std::string_view name) {
  HardwareProfile hp;
  hp.name = std::string(name);
  hp.n_cores = 8;
  hp.l1_bytes = 64 * 1024;
  hp.tile_overhead_cycles = 1500;
  hp.dma_bytes_per_cycle = 8.0;
  hp.l1_fill_factor = 0.85;
  if (name == "xpulpv2") {
    // 8-bit SIMD only; sub-byte operands are extracted on load.
    hp.macs_per_cycle_per_core = {{2, 2.0}, {4, 2.0}, {8, 2.0}};
    hp.sub_byte_simd = false;
    hp.hw_unpack = false;
    hp.sw_unpack_cycles_per_elem = 0.015625;
  } else if (name == "xpulpnnv1" || name == "xpulpnnv2") {
    // Packed SIMD on 2/4/8-bit data. v1 unpacks mismatched operands in
    // software, v2 in hardware; everything else is shared.
    hp.macs_per_cycle_per_core = {{2, 8.0}, {4, 4.0}, {8, 2.0}};
    hp.sub_byte_simd = true;
    hp.hw_unpack = (name == "xpulpnnv2");
    hp.sw_unpack_cycles_per_elem = 0.25;
  } else {
    throw ParseError("unknown built-in profile '" + std::string(name) + "'");
  }
  return hp;
}

// ---------------------------------------------------------------------------
// Synthetic model

LatencyBreakdown synth_latency_breakdown(const HardwareProfile& hp, const LayerType& lt,
                                         const PrecisionPair& pp) {
  LatencyBreakdown out;
  const auto n_macs = macs(lt);
  const int b_c = hp.sub_byte_simd ? std::max(pp.b_in, pp.b_wt) : 8;

  out.compute = ceil_to_cycles(static_cast<double>(n_macs) /
                               (static_cast<double>(hp.n_cores) * hp.macs_per_cycle(b_c)));

  const bool no_unpack = (pp.b_in == pp.b_wt && hp.sub_byte_simd) || hp.hw_unpack;
  if (!no_unpack) {
    // Every operand narrower than the compute width is widened once per MAC.
    const int narrow_operands = (pp.b_in < b_c ? 1 : 0) + (pp.b_wt < b_c ? 1 : 0);
    out.unpack = ceil_to_cycles(hp.sw_unpack_cycles_per_elem * static_cast<double>(n_macs) *
                                narrow_operands);
  }

  // Outputs are stored at the layer's input precision.
  out.footprint_bytes = bytes_for(lt.in_elements(), pp.b_in) +
                        bytes_for(lt.out_elements(), pp.b_in) +
                        bytes_for(lt.weight_elements(), pp.b_wt);
  const double tile_capacity = hp.l1_fill_factor * static_cast<double>(hp.l1_bytes);
  out.n_tiles = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(static_cast<double>(out.footprint_bytes) / tile_capacity)));
  out.movement = static_cast<Cycles>(out.n_tiles * hp.tile_overhead_cycles) +
                 ceil_to_cycles(static_cast<double>(out.footprint_bytes) / hp.dma_bytes_per_cycle);
  return out;
}

Cycles synth_latency(const HardwareProfile& hp, const LayerType& lt, const PrecisionPair& pp) {
  return synth_latency_breakdown(hp, lt, pp).total();
}

LatencyDictionary generate_dict(const HardwareProfile& hp, const NetworkConfig& net,
                                const AllowedPrecisionSet& p_all) {
  LatencyDictionary ld(LatencySource::kSynthetic, hp.name);
  for (const auto& lt : unique_layer_types(net)) {
    const auto key = canonical_key(lt);
    for (const auto& pp : p_all) ld.insert(key, pp, synth_latency(hp, lt, pp));
  }
  return ld;
}

}  // namespace freebits
