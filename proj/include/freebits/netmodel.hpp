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

// Network description: layer types, precision pairs and per-layer
// configurations of a layer-by-layer executed network.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freebits {

enum class OpKind { kConv2d, kDepthwiseConv2d, kPointwiseConv2d, kLinear, kAdd };

// Names used by the network file format and the canonical key.
std::string_view op_kind_name(OpKind kind);
std::optional<OpKind> op_kind_from_name(std::string_view name);

inline constexpr std::array<int, 3> kBitwidths = {2, 4, 8};

constexpr bool is_valid_bitwidth(int bits) {
  return bits == 2 || bits == 4 || bits == 8;
}

// Input-activation and weight bit-width of one layer.
struct PrecisionPair {
  int b_in = 8;
  int b_wt = 8;

  friend auto operator<=>(const PrecisionPair&, const PrecisionPair&) = default;

  constexpr bool valid() const { return is_valid_bitwidth(b_in) && is_valid_bitwidth(b_wt); }
  constexpr int total_bits() const { return b_in + b_wt; }
};

std::string to_string(const PrecisionPair& pp);

// The set of (b_in, b_wt) combinations a search may pick from. Stored sorted
// and deduplicated; never empty.
class AllowedPrecisionSet {
 public:
  explicit AllowedPrecisionSet(std::vector<PrecisionPair> pairs);

  // {2,4,8} x {2,4,8}
  static AllowedPrecisionSet full();
  // {(2,2), (4,4), (8,8)}
  static AllowedPrecisionSet locked();
  // "full" or "locked"
  static AllowedPrecisionSet from_name(std::string_view name);

  bool contains(const PrecisionPair& pp) const;
  std::span<const PrecisionPair> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

 private:
  std::vector<PrecisionPair> pairs_;
};

// Every quantity that parametrizes one kernel invocation. Equality over all
// fields is the identity used to key latency dictionaries.
struct LayerType {
  OpKind op_kind = OpKind::kConv2d;
  std::int64_t in_height = 1;
  std::int64_t in_width = 1;
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::int64_t kernel_h = 1;
  std::int64_t kernel_w = 1;
  std::int64_t stride_h = 1;
  std::int64_t stride_w = 1;
  std::int64_t groups = 1;
  std::int64_t padding_h = 0;
  std::int64_t padding_w = 0;

  friend auto operator<=>(const LayerType&, const LayerType&) = default;

  // Reason the invariants are violated, or nullopt when the type is valid.
  std::optional<std::string> check() const;

  std::int64_t out_height() const {
    return (in_height + 2 * padding_h - kernel_h) / stride_h + 1;
  }
  std::int64_t out_width() const {
    return (in_width + 2 * padding_w - kernel_w) / stride_w + 1;
  }
  std::int64_t in_elements() const { return in_height * in_width * in_channels; }
  std::int64_t out_elements() const { return out_height() * out_width() * out_channels; }
  // Zero for add layers, which carry no weights.
  std::int64_t weight_elements() const;
};

struct Layer {
  std::string id;
  LayerType type;
  PrecisionPair precision;
};

// Ordered per-layer assignment of layer types and precisions. Execution order
// is list order; a layer's 1-based index is its position. Immutable once
// built; the constructor enforces every invariant.
class NetworkConfig {
 public:
  NetworkConfig(std::string name, std::vector<Layer> layers,
                std::optional<double> accuracy = std::nullopt);

  const std::string& name() const { return name_; }
  std::span<const Layer> layers() const { return layers_; }
  std::size_t size() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  const std::optional<double>& accuracy() const { return accuracy_; }

  std::vector<PrecisionPair> precisions() const;

  // Same topology with new per-layer precisions (validated).
  NetworkConfig with_precisions(std::span<const PrecisionPair> precisions) const;
  NetworkConfig renamed(std::string name, std::optional<double> accuracy) const;

  friend bool operator==(const NetworkConfig& a, const NetworkConfig& b);

 private:
  std::string name_;
  std::vector<Layer> layers_;
  std::optional<double> accuracy_;
};

bool operator==(const Layer& a, const Layer& b);

// Parses the JSON network description. Throws ParseError for malformed or
// unknown fields and ValidationError for invariant violations.
NetworkConfig parse_network(std::string_view text);
std::string serialize_network(const NetworkConfig& net);

// Injective, stable text encoding of every LayerType field.
std::string canonical_key(const LayerType& lt);
// Inverse of canonical_key; throws ParseError.
LayerType parse_canonical_key(std::string_view key);

// Distinct layer types in order of first occurrence.
std::vector<LayerType> unique_layer_types(const NetworkConfig& net);

}  // namespace freebits
