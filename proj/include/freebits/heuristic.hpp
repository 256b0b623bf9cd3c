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

// Free bits: move every layer to the lowest-latency precision pair that is
// component-wise at least as precise as its current one.

#include <vector>

#include "freebits/latdict.hpp"
#include "freebits/netmodel.hpp"

namespace freebits {

// a.b_in >= b.b_in && a.b_wt >= b.b_wt
constexpr bool higher(const PrecisionPair& a, const PrecisionPair& b) {
  return a.b_in >= b.b_in && a.b_wt >= b.b_wt;
}

// Tie-break among equal-cost pairs: more total bits first, then more input
// bits. Returns true when `a` wins over `b`.
constexpr bool wins_tie(const PrecisionPair& a, const PrecisionPair& b) {
  if (a.total_bits() != b.total_bits()) return a.total_bits() > b.total_bits();
  return a.b_in > b.b_in;
}

// Pairs of p_all a layer of this type may take; add layers only take pairs
// with b_wt == b_in.
std::vector<PrecisionPair> eligible_pairs(const LayerType& lt, const AllowedPrecisionSet& p_all);

// Pairs that dominate `current` and are profiled no slower than it, sorted
// ascending. `current` itself is always included. Throws UnprofiledError if
// `current` has no entry. Pairs without an entry are skipped.
std::vector<PrecisionPair> candidates(const LatencyDictionary& ld, const LayerType& lt,
                                      const PrecisionPair& current,
                                      const AllowedPrecisionSet& p_all);

// Lowest-latency candidate, ties resolved by wins_tie().
PrecisionPair best_candidate(const LatencyDictionary& ld, const LayerType& lt,
                             const PrecisionPair& current, const AllowedPrecisionSet& p_all);

// Applies best_candidate to every layer. Everything but the precisions is
// left untouched, including the name and accuracy annotation.
NetworkConfig free_bits(const LatencyDictionary& ld, const NetworkConfig& net,
                        const AllowedPrecisionSet& p_all);

}  // namespace freebits
