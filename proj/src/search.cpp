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

#include "freebits/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <json.hpp>

#include "freebits/errors.hpp"
#include "freebits/heuristic.hpp"
#include "freebits/metrics.hpp"

namespace freebits {

namespace {

std::size_t bit_slot(int bits) { return bits == 2 ? 0 : bits == 4 ? 1 : 2; }

Cycles require_latency(const LatencyDictionary& ld, const Layer& layer, const PrecisionPair& pp) {
  auto lat = ld.lookup(layer.type, pp);
  if (!lat)
    throw UnprofiledError("layer '" + layer.id + "': no latency entry for " + to_string(pp));
  return *lat;
}

// Per-layer table of (pair, objective) for one lambda.
struct Choice {
  PrecisionPair pp;
  double objective;
};

std::vector<Choice> layer_choices(const Layer& layer, std::size_t index,
                                  const LatencyDictionary& ld, const SensitivityModel& sens,
                                  double lambda, const AllowedPrecisionSet& p_all) {
  std::vector<Choice> out;
  for (const auto& pp : eligible_pairs(layer.type, p_all)) {
    const double lat = static_cast<double>(require_latency(ld, layer, pp));
    out.push_back({pp, sens.penalty(index, pp) + lambda * lat});
  }
  return out;
}

void check_lambdas(std::span<const double> lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i]))
      throw ValidationError("lambda values must be finite and non-negative");
    if (i > 0 && lambdas[i] < lambdas[i - 1])
      throw ValidationError("lambda values must be sorted ascending");
  }
}

}  // namespace

NetworkConfig homogeneous_config(const NetworkConfig& net, const PrecisionPair& pp,
                                 std::optional<int> first_layer_b_in) {
  std::vector<PrecisionPair> out;
  out.reserve(net.size());
  for (const auto& layer : net.layers()) {
    PrecisionPair p = pp;
    if (out.empty() && first_layer_b_in) p.b_in = *first_layer_b_in;
    if (layer.type.op_kind == OpKind::kAdd) p.b_wt = p.b_in;
    out.push_back(p);
  }
  // The source annotation no longer describes the new precisions.
  return net.with_precisions(out).renamed(net.name(), std::nullopt);
}

// ---------------------------------------------------------------------------
// SensitivityModel

std::size_t SensitivityModel::slot(const PrecisionPair& pp) {
  return 3 * bit_slot(pp.b_in) + bit_slot(pp.b_wt);
}

SensitivityModel::SensitivityModel(std::vector<Row> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& row = rows_[i];
    const std::string where = "sensitivity of layer " + std::to_string(i + 1);
    if (row[slot({8, 8})] != 0.0) throw ValidationError(where + ": penalty at (8,8) must be 0");
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError(where + ": penalties must be finite and non-negative");
    for (int a : kBitwidths) {
      for (std::size_t k = 0; k + 1 < kBitwidths.size(); ++k) {
        const int lo = kBitwidths[k], hi = kBitwidths[k + 1];
        if (row[slot({hi, a})] > row[slot({lo, a})] || row[slot({a, hi})] > row[slot({a, lo})])
          throw ValidationError(where + ": penalty must not increase with precision");
      }
    }
  }
}

SensitivityModel SensitivityModel::from_scales(std::span<const double> scales) {
  std::vector<Row> rows;
  for (double s : scales) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw ValidationError("sensitivity scales must be finite and non-negative");
    Row row{};
    for (int b_in : kBitwidths)
      for (int b_wt : kBitwidths) row[slot({b_in, b_wt})] = s * ((8 - b_in) + (8 - b_wt));
    rows.push_back(row);
  }
  return SensitivityModel(std::move(rows));
}

double SensitivityModel::penalty(std::size_t layer, const PrecisionPair& pp) const {
  return rows_.at(layer)[slot(pp)];
}

SensitivityModel default_sensitivity(const NetworkConfig& net) {
  const std::vector<double> scales(net.size(), 1.0);
  return SensitivityModel::from_scales(scales);
}

SensitivityModel parse_sensitivity(std::string_view text, const NetworkConfig& net) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sensitivity file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("sensitivity file must map layer ids to numbers");
  std::vector<double> scales(net.size(), 1.0);
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_number()) throw ParseError("sensitivity of '" + id + "': expected number");
    auto it = std::find_if(net.layers().begin(), net.layers().end(),
                           [&](const Layer& l) { return l.id == id; });
    if (it == net.layers().end())
      throw ValidationError("sensitivity names unknown layer '" + id + "'");
    scales[static_cast<std::size_t>(it - net.layers().begin())] = value.get<double>();
  }
  return SensitivityModel::from_scales(scales);
}

double total_penalty(const NetworkConfig& net, const SensitivityModel& sens) {
  if (sens.size() != net.size())
    throw ValidationError("sensitivity model does not match the network's layer count");
  double sum = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) sum += sens.penalty(i, net.layer(i).precision);
  return sum;
}

// ---------------------------------------------------------------------------
// Sweep

std::string format_lambda(double lambda) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", lambda);
  return buf;
}

std::string lambda_config_name(const NetworkConfig& net, double lambda) {
  return net.name() + "@lambda=" + format_lambda(lambda);
}

std::vector<NetworkConfig> lagrangian_sweep(const NetworkConfig& net, const LatencyDictionary& ld,
                                            const SensitivityModel& sens,
                                            std::span<const double> lambdas,
                                            const AllowedPrecisionSet& p_all) {
  check_lambdas(lambdas);
  if (sens.size() != net.size())
    throw ValidationError("sensitivity model does not match the network's layer count");
  std::vector<NetworkConfig> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    std::vector<PrecisionPair> chosen;
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto choices = layer_choices(net.layer(i), i, ld, sens, lambda, p_all);
      const Choice* best = &choices.front();
      for (const auto& c : choices)
        if (c.objective < best->objective ||
            (c.objective == best->objective && wins_tie(c.pp, best->pp)))
          best = &c;
      chosen.push_back(best->pp);
    }
    out.push_back(net.with_precisions(chosen).renamed(lambda_config_name(net, lambda), std::nullopt));
  }
  return out;
}

NetworkConfig brute_force_best(const NetworkConfig& net, const LatencyDictionary& ld,
                               const SensitivityModel& sens, double lambda,
                               const AllowedPrecisionSet& p_all) {
  const double space = std::pow(static_cast<double>(p_all.size()), static_cast<double>(net.size()));
  if (space > kBruteForceLimit)
    throw ValidationError("exhaustive search space of " + std::to_string(p_all.size()) + "^" +
                          std::to_string(net.size()) + " configurations exceeds the limit");
  if (sens.size() != net.size())
    throw ValidationError("sensitivity model does not match the network's layer count");
  const double lambdas[] = {lambda};
  check_lambdas(lambdas);

  const std::size_t n = net.size();
  std::vector<std::vector<Choice>> table;
  for (std::size_t i = 0; i < n; ++i)
    table.push_back(layer_choices(net.layer(i), i, ld, sens, lambda, p_all));

  // Odometer over all joint assignments; prefix[i] is the objective of
  // layers [0, i).
  std::vector<std::size_t> digit(n, 0);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + table[i][0].objective;

  std::vector<std::size_t> best = digit;
  double best_obj = prefix[n];
  auto better_lex = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] != b[i]) return wins_tie(table[i][a[i]].pp, table[i][b[i]].pp);
    return false;
  };

  while (true) {
    std::size_t pos = n;
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < table[i].size()) {
        pos = i;
        break;
      }
      digit[i] = 0;
    }
    if (pos == n) break;
    for (std::size_t i = pos; i < n; ++i) prefix[i + 1] = prefix[i] + table[i][digit[i]].objective;
    const double obj = prefix[n];
    if (obj < best_obj || (obj == best_obj && better_lex(digit, best))) {
      best_obj = obj;
      best = digit;
    }
  }

  std::vector<PrecisionPair> chosen;
  for (std::size_t i = 0; i < n; ++i) chosen.push_back(table[i][best[i]].pp);
  return net.with_precisions(chosen).renamed(lambda_config_name(net, lambda), std::nullopt);
}

std::vector<double> default_lambdas() {
  // 0, then 15 values spanning 1e-6 .. 1e-2.
  std::vector<double> out{0.0};
  for (int k = 0; k < 15; ++k) out.push_back(std::pow(10.0, -6.0 + 4.0 * k / 14.0));
  return out;
}

std::vector<double> parse_lambda_spec(std::string_view spec) {
  auto to_double = [&](std::string_view s) {
    try {
      std::size_t used = 0;
      const std::string str(s);
      double v = std::stod(str, &used);
      if (used != str.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad lambda value '" + std::string(s) + "' in '" + std::string(spec) + "'");
    }
  };
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      auto pos = s.find(sep, start);
      parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return parts;
  };

  std::vector<double> out;
  if (spec == "default") {
    out = default_lambdas();
  } else if (spec.rfind("log:", 0) == 0) {
    auto parts = split(spec.substr(4), ':');
    if (parts.size() != 3) throw ParseError("lambda spec must be log:MIN:MAX:N");
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const double count = to_double(parts[2]);
    if (!(lo > 0.0) || !(hi >= lo) || count < 1 || count != std::floor(count))
      throw ParseError("lambda spec log:MIN:MAX:N needs 0 < MIN <= MAX and integer N >= 1");
    const int n = static_cast<int>(count);
    for (int k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      out.push_back(lo * std::pow(hi / lo, t));
    }
  } else {
    for (auto part : split(spec, ',')) out.push_back(to_double(part));
  }
  check_lambdas(out);
  if (out.empty()) throw ParseError("empty lambda spec");
  return out;
}

std::vector<SweepPoint> run_sweep(const NetworkConfig& net, const LatencyDictionary& ld,
                                  const SensitivityModel& sens, std::span<const double> lambdas,
                                  const AllowedPrecisionSet& p_all) {
  std::vector<SweepPoint> out;
  auto raw = lagrangian_sweep(net, ld, sens, lambdas, p_all);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    NetworkConfig optimized = free_bits(ld, raw[i], p_all);
    optimized = optimized.renamed(raw[i].name() + "+fb", std::nullopt);
    out.push_back(SweepPoint{lambdas[i], raw[i], optimized, total_latency(ld, raw[i]),
                             total_latency(ld, optimized), total_penalty(raw[i], sens)});
  }
  return out;
}

std::string sweep_index_csv(std::span<const SweepPoint> points) {
  std::string out = "name,lambda,latency_before,latency_after,penalty\n";
  for (const auto& p : points) {
    char penalty[40];
    std::snprintf(penalty, sizeof penalty, "%.9g", p.penalty);
    out += p.raw.name() + "," + format_lambda(p.lambda) + "," + std::to_string(p.latency_before) +
           "," + std::to_string(p.latency_after) + "," + penalty + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pareto front

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points, ObjectiveSense sense) {
  const bool maximize = sense == ObjectiveSense::kMaximize;
  auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };

  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].latency != points[b].latency) return points[a].latency < points[b].latency;
    return better(points[a].objective, points[b].objective);
  });

  std::vector<ParetoPoint> front;
  for (std::size_t idx : order) {
    const auto& p = points[idx];
    if (front.empty() || better(p.objective, front.back().objective)) front.push_back(p);
  }
  return front;
}

}  // namespace freebits
