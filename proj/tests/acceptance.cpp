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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit when
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "freebits/heuristic.hpp"
#include "freebits/latdict.hpp"
#include "freebits/metrics.hpp"
#include "freebits/netmodel.hpp"
#include "freebits/search.hpp"
#include "support.hpp"

using namespace freebits;
using namespace freebits::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Instance {
  NetworkConfig net;
  LatencyDictionary ld;
};

// The shared pool of random heuristic instances: up to 12 layers, complete
// dictionaries over all nine pairs.
const std::vector<Instance>& heuristic_instances() {
  static const std::vector<Instance> pool = [] {
    std::mt19937_64 rng(20240901);
    std::vector<Instance> v;
    v.reserve(1000);
    for (int i = 0; i < 1000; ++i) {
      auto net = random_network(rng, 1 + rng() % 12);
      auto ld = random_complete_dict(rng, net);
      v.push_back({std::move(net), std::move(ld)});
    }
    return v;
  }();
  return pool;
}

Outcome heuristic_oracle() {
  Outcome o;
  const auto& pool = heuristic_instances();
  auto full = AllowedPrecisionSet::full();
  auto t0 = Clock::now();
  std::size_t upgraded = 0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    auto out = free_bits(pool[k].ld, pool[k].net, full);
    if (out != reference_free_bits(pool[k].ld, pool[k].net, full))
      o.fail("instance " + std::to_string(k) + " differs from the per-layer scan");
    for (std::size_t i = 0; i < out.size(); ++i)
      upgraded += out.layer(i).precision != pool[k].net.layer(i).precision;
  }
  double secs = seconds_since(t0);
  if (secs >= 10.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.ok)
    o.detail = "1000 instances, " + std::to_string(upgraded) + " layers upgraded, " +
               std::to_string(secs) + " s";
  return o;
}

Outcome monotonicity() {
  Outcome o;
  auto full = AllowedPrecisionSet::full();
  std::size_t k = 0;
  for (const auto& inst : heuristic_instances()) {
    auto out = free_bits(inst.ld, inst.net, full);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& before = inst.net.layer(i);
      const auto& after = out.layer(i);
      if (layer_latency(inst.ld, after) > layer_latency(inst.ld, before))
        o.fail("instance " + std::to_string(k) + " layer " + before.id + " got slower");
      if (after.precision.b_in < before.precision.b_in ||
          after.precision.b_wt < before.precision.b_wt)
        o.fail("instance " + std::to_string(k) + " layer " + before.id + " lost precision");
    }
    if (free_bits(inst.ld, out, full) != out)
      o.fail("instance " + std::to_string(k) + " is not idempotent");
    ++k;
  }
  if (o.ok) o.detail = "1000 instances";
  return o;
}

Outcome additivity() {
  Outcome o;
  for (const auto& inst : heuristic_instances()) {
    Cycles fold = 0;
    for (const auto& layer : inst.net.layers()) fold += *inst.ld.lookup(layer.type, layer.precision);
    if (total_latency(inst.ld, inst.net) != fold) o.fail("random instance mismatch");
  }
  auto mnv1 = parse_network(fixture("mnv1.json"));
  auto mnv2 = parse_network(fixture("mnv2.json"));
  std::mt19937_64 rng(5);
  for (const char* profile : {"xpulpv2", "xpulpnnv1", "xpulpnnv2"}) {
    for (const auto* net : {&mnv1, &mnv2}) {
      auto ld = generate_dict(builtin_profile(profile), *net, AllowedPrecisionSet::full());
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<PrecisionPair> pp;
        for (const auto& layer : net->layers()) pp.push_back(random_pair(rng, layer.type));
        auto cfg = net->with_precisions(pp);
        Cycles fold = 0;
        for (const auto& layer : cfg.layers()) fold += *ld.lookup(layer.type, layer.precision);
        if (total_latency(ld, cfg) != fold)
          o.fail(std::string(profile) + " " + net->name() + " mismatch");
      }
    }
  }
  if (o.ok)
    o.detail = "1000 random instances; " + std::to_string(mnv1.size()) + "-layer and " +
               std::to_string(mnv2.size()) + "-layer fixtures under 3 profiles";
  return o;
}

// Layer types of both fixtures plus random ones with kernel >= stride.
std::vector<LayerType> regime_layer_types() {
  std::vector<LayerType> lts;
  for (const char* name : {"mnv1.json", "mnv2.json"})
    for (const auto& lt : unique_layer_types(parse_network(fixture(name)))) lts.push_back(lt);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) lts.push_back(random_layer_type(rng));
  return lts;
}

Outcome synthetic_regimes() {
  Outcome o;
  auto v1 = builtin_profile("xpulpnnv1");
  auto v2 = builtin_profile("xpulpnnv2");
  auto lts = regime_layer_types();
  std::size_t checks = 0;
  for (const auto& lt : lts) {
    for (const auto& pp : all_pairs()) {
      if (pp.b_in != pp.b_wt) {
        int m = std::max(pp.b_in, pp.b_wt);
        ++checks;
        if (synth_latency(v1, lt, {m, m}) > synth_latency(v1, lt, pp))
          o.fail("xpulpnnv1: " + canonical_key(lt) + " " + to_string(pp) + " beats its matched pair");
      }
      if (synth_latency(v2, lt, pp) > synth_latency(v1, lt, pp))
        o.fail("xpulpnnv2 slower than xpulpnnv1 at " + canonical_key(lt) + " " + to_string(pp));
    }
  }

  // Memory-bound: an add over a 56x56x64 tensor streams two 200 KB tensors
  // for one accumulate per element.
  auto v2isa = builtin_profile("xpulpv2");
  LayerType add;
  add.op_kind = OpKind::kAdd;
  add.in_height = add.in_width = 56;
  add.in_channels = add.out_channels = 64;
  auto lo = synth_latency_breakdown(v2isa, add, {4, 4});
  auto hi = synth_latency_breakdown(v2isa, add, {8, 8});
  if (!(lo.total() < hi.total())) o.fail("xpulpv2: (4,4) not faster on the memory-bound layer");
  if (lo.compute != hi.compute) o.fail("xpulpv2: compute differs between (4,4) and (8,8)");

  if (o.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu layer types, %zu mismatched pairs; xpulpv2 add (4,4)=%llu < (8,8)=%llu",
                  lts.size(), checks, static_cast<unsigned long long>(lo.total()),
                  static_cast<unsigned long long>(hi.total()));
    o.detail = buf;
  }
  return o;
}

Outcome four_bit_benefit() {
  Outcome o;
  auto net = parse_network(fixture("mnv1.json"));
  auto ld = generate_dict(builtin_profile("xpulpnnv1"), net, AllowedPrecisionSet::full());
  auto base = homogeneous_config(net, {4, 4}, 8);
  auto out = free_bits(ld, base, AllowedPrecisionSet::full());
  std::size_t upgraded = 0;
  for (std::size_t i = 0; i < out.size(); ++i)
    upgraded += out.layer(i).precision != base.layer(i).precision;
  Cycles before = total_latency(ld, base);
  Cycles after = total_latency(ld, out);
  if (!(after < before)) o.fail("latency did not decrease");
  if (upgraded < 1) o.fail("no layer upgraded");
  o.detail = std::to_string(upgraded) + " of " + std::to_string(out.size()) +
             " layers upgraded; " + std::to_string(before) + " -> " + std::to_string(after) +
             " cycles";
  return o;
}

Outcome sweep_optimality() {
  Outcome o;
  std::mt19937_64 rng(60606);
  auto full = AllowedPrecisionSet::full();
  // Powers of two with integer scales keep the objective exact.
  const std::vector<double> lambdas{0.0, 1.0 / 32, 0.25, 1.0, 8.0};
  auto t0 = Clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Layer> layers;
    while (layers.size() < 6) {
      auto lt = random_layer_type(rng);
      if (lt.op_kind == OpKind::kAdd) continue;
      layers.push_back({"l" + std::to_string(layers.size()), lt, {8, 8}});
    }
    NetworkConfig net("six", layers);
    auto ld = random_complete_dict(rng, net, 64);
    std::vector<double> scales(6);
    for (auto& s : scales) s = static_cast<double>(1 + rng() % 8);
    auto sens = SensitivityModel::from_scales(scales);

    auto out = lagrangian_sweep(net, ld, sens, lambdas, full);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      auto best = brute_force_best(net, ld, sens, lambdas[k], full);
      if (out[k].precisions() != best.precisions())
        o.fail("trial " + std::to_string(trial) + " lambda " + format_lambda(lambdas[k]) +
               " differs from exhaustive search");
      if (k > 0) {
        if (total_latency(ld, out[k]) > total_latency(ld, out[k - 1]))
          o.fail("trial " + std::to_string(trial) + ": latency increased with lambda");
        if (total_penalty(out[k], sens) < total_penalty(out[k - 1], sens))
          o.fail("trial " + std::to_string(trial) + ": penalty decreased with lambda");
      }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= 60.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.ok) o.detail = "100 trials x 5 lambdas over 9^6 configurations, " + std::to_string(secs) + " s";
  return o;
}

Outcome pareto_extraction() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::size_t kept = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ParetoPoint> pts;
    std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({"p" + std::to_string(i), 1 + rng() % 50, static_cast<double>(rng() % 20) / 4});
    auto sense = trial % 2 ? ObjectiveSense::kMinimize : ObjectiveSense::kMaximize;
    auto front = pareto_front(pts, sense);
    kept += front.size();
    if (!same_points(front, reference_pareto(pts, sense)))
      o.fail("set " + std::to_string(trial) + " differs from quadratic filtering");
    if (!same_points(pareto_front(front, sense), front))
      o.fail("set " + std::to_string(trial) + " is not idempotent");
  }
  if (o.ok) o.detail = "1000 sets, " + std::to_string(kept) + " points kept";
  return o;
}

Outcome cli_determinism() {
  Outcome o;
  ScratchDir dir;
  if (run_gen_dict(dir, "a.csv") != 0 || run_gen_dict(dir, "b.csv") != 0)
    return {false, "gen-dict failed"};
  if (slurp(dir / "a.csv") != slurp(dir / "b.csv")) o.fail("gen-dict output differs between runs");
  if (!matches_golden("gen_dict_mnv1_xpulpnnv1.csv", slurp(dir / "a.csv")))
    o.fail("gen-dict output differs from golden");

  if (run_optimize(dir, "a.csv", "a.json") != 0 || run_optimize(dir, "a.csv", "b.json") != 0)
    return {false, "optimize failed"};
  if (slurp(dir / "a.json") != slurp(dir / "b.json") ||
      slurp(dir / "a.changes.csv") != slurp(dir / "b.changes.csv"))
    o.fail("optimize output differs between runs");
  if (!matches_golden("optimize_mnv1_4b4b_xpulpnnv1.json", slurp(dir / "a.json")) ||
      !matches_golden("optimize_mnv1_4b4b_xpulpnnv1.changes.csv", slurp(dir / "a.changes.csv")))
    o.fail("optimize output differs from golden");

  if (run_sweep(dir, "a.csv", "sa") != 0 || run_sweep(dir, "a.csv", "sb") != 0)
    return {false, "sweep failed"};
  if (tree(dir / "sa") != tree(dir / "sb")) o.fail("sweep output differs between runs");
  if (!matches_golden_tree("sweep_mnv1_xpulpnnv1", dir / "sa"))
    o.fail("sweep output differs from golden");
  if (o.ok) o.detail = "gen-dict, optimize and sweep match their goldens on two runs";
  return o;
}

Outcome table_layout() {
  Outcome o;
  ScratchDir dir;
  auto r = run_table_report(dir);
  if (r.code != 0) return {false, "evaluate exited with " + std::to_string(r.code)};
  if (!matches_golden("evaluate_table.txt", r.out)) o.fail("report differs from golden");
  if (r.out.find("Lat. vs 8b") == std::string::npos || r.out.find("Acc.") == std::string::npos)
    o.fail("header columns missing");
  if (o.ok) o.detail = "two-config report matches golden";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"heuristic oracle equivalence", heuristic_oracle},
      {"monotonicity and idempotence", monotonicity},
      {"latency additivity", additivity},
      {"synthetic model regimes", synthetic_regimes},
      {"free bits at 4b/4b on MobileNetV1", four_bit_benefit},
      {"lagrangian sweep optimality", sweep_optimality},
      {"pareto extraction", pareto_extraction},
      {"cli determinism", cli_determinism},
      {"report table layout", table_layout},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-36s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += !o.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
