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

#include "freebits/heuristic.hpp"

#include <algorithm>

#include "freebits/errors.hpp"

namespace freebits {

std::vector<PrecisionPair> eligible_pairs(const LayerType& lt, const AllowedPrecisionSet& p_all) {
  std::vector<PrecisionPair> out;
  for (const auto& pp : p_all)
    if (lt.op_kind != OpKind::kAdd || pp.b_in == pp.b_wt) out.push_back(pp);
  return out;
}

std::vector<PrecisionPair> candidates(const LatencyDictionary& ld, const LayerType& lt,
                                      const PrecisionPair& current,
                                      const AllowedPrecisionSet& p_all) {
  const auto lat0 = ld.lookup(lt, current);
  if (!lat0)
    throw UnprofiledError("unprofiled current configuration " + to_string(current) + " for " +
                          canonical_key(lt));
  std::vector<PrecisionPair> out{current};
  for (const auto& pp : eligible_pairs(lt, p_all)) {
    if (pp == current || !higher(pp, current)) continue;
    const auto lat = ld.lookup(lt, pp);
    if (lat && *lat <= *lat0) out.push_back(pp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PrecisionPair best_candidate(const LatencyDictionary& ld, const LayerType& lt,
                             const PrecisionPair& current, const AllowedPrecisionSet& p_all) {
  const auto cdts = candidates(ld, lt, current, p_all);
  PrecisionPair best = current;
  Cycles best_lat = *ld.lookup(lt, current);
  for (const auto& pp : cdts) {
    const Cycles lat = *ld.lookup(lt, pp);
    if (lat < best_lat || (lat == best_lat && wins_tie(pp, best))) {
      best = pp;
      best_lat = lat;
    }
  }
  return best;
}

NetworkConfig free_bits(const LatencyDictionary& ld, const NetworkConfig& net,
                        const AllowedPrecisionSet& p_all) {
  std::vector<PrecisionPair> updated;
  updated.reserve(net.size());
  for (const auto& layer : net.layers()) {
    if (!ld.lookup(layer.type, layer.precision))
      throw UnprofiledError("layer '" + layer.id + "': unprofiled current configuration " +
                            to_string(layer.precision));
    updated.push_back(best_candidate(ld, layer.type, layer.precision, p_all));
  }
  return net.with_precisions(updated);
}

}  // namespace freebits
