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

#include "freebits/metrics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include <json.hpp>

#include "freebits/errors.hpp"

namespace freebits {

std::int64_t macs(const LayerType& lt) {
  if (lt.op_kind == OpKind::kAdd) return lt.out_elements();
  return lt.out_height() * lt.out_width() * lt.out_channels *
         (lt.kernel_h * lt.kernel_w * (lt.in_channels / lt.groups));
}

std::int64_t layer_bops(const LayerType& lt, const PrecisionPair& pp) {
  return macs(lt) * pp.b_in * pp.b_wt;
}

std::int64_t total_bops(const NetworkConfig& net) {
  std::int64_t sum = 0;
  for (const auto& layer : net.layers()) sum += layer_bops(layer.type, layer.precision);
  return sum;
}

Cycles layer_latency(const LatencyDictionary& ld, const Layer& layer) {
  auto cycles = ld.lookup(layer.type, layer.precision);
  if (!cycles)
    throw UnprofiledError("layer '" + layer.id + "' at " + to_string(layer.precision) +
                          " is not in the latency dictionary (" + canonical_key(layer.type) + ")");
  return *cycles;
}

Cycles total_latency(const LatencyDictionary& ld, const NetworkConfig& net) {
  Cycles sum = 0;
  for (const auto& layer : net.layers()) sum += layer_latency(ld, layer);
  return sum;
}

std::int64_t relative_change_tenths(Cycles value, Cycles base) {
  if (base == 0) throw ValidationError("baseline latency is zero");
  const auto b = static_cast<std::int64_t>(base);
  const std::int64_t num = 1000 * (static_cast<std::int64_t>(value) - b);
  std::int64_t q = num / b;
  std::int64_t rem = num % b;
  if (rem < 0) {
    q -= 1;
    rem += b;
  }
  if (2 * rem > b || (2 * rem == b && (q % 2 != 0))) q += 1;
  return q;
}

std::string format_percent_tenths(std::int64_t tenths) {
  const char sign = tenths < 0 ? '-' : '+';
  const std::int64_t mag = tenths < 0 ? -tenths : tenths;
  return std::string(1, sign) + std::to_string(mag / 10) + "." + std::to_string(mag % 10) + "%";
}

ConfigReport compare(const LatencyDictionary& ld, const NetworkConfig& net,
                     const NetworkConfig& baseline) {
  if (net.size() != baseline.size())
    throw ValidationError("config '" + net.name() + "' has " + std::to_string(net.size()) +
                          " layers, baseline '" + baseline.name() + "' has " +
                          std::to_string(baseline.size()));
  for (std::size_t i = 0; i < net.size(); ++i)
    if (net.layer(i).type != baseline.layer(i).type)
      throw ValidationError("config '" + net.name() + "' and baseline differ in the layer type of layer " +
                            std::to_string(i + 1) + " ('" + net.layer(i).id + "')");

  ConfigReport report;
  report.name = net.name();
  report.accuracy_annotation = net.accuracy();
  for (const auto& layer : net.layers()) {
    LayerReport lr{layer.id, layer.precision, layer_latency(ld, layer),
                   layer_bops(layer.type, layer.precision)};
    report.total_latency += lr.cycles;
    report.total_bops += lr.bops;
    report.layers.push_back(std::move(lr));
  }
  const Cycles base = total_latency(ld, baseline);
  report.latency_vs_baseline =
      100.0 * (static_cast<double>(report.total_latency) - static_cast<double>(base)) /
      static_cast<double>(base);
  report.latency_vs_baseline_tenths = relative_change_tenths(report.total_latency, base);
  return report;
}

namespace {

std::string format_accuracy(const std::optional<double>& acc) {
  if (!acc) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", *acc);
  return buf;
}

std::vector<const ConfigReport*> sorted_rows(std::span<const ConfigReport> reports) {
  std::vector<const ConfigReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const ConfigReport* a, const ConfigReport* b) {
    if (a->total_latency != b->total_latency) return a->total_latency < b->total_latency;
    return a->name < b->name;
  });
  return rows;
}

}  // namespace

std::string render_report_table(std::span<const ConfigReport> reports) {
  constexpr std::size_t kCols = 5;
  const std::array<std::string, kCols> header = {"Config", "Lat. vs 8b", "Acc.", "Cycles", "BOPs"};
  std::vector<std::array<std::string, kCols>> cells;
  for (const auto* r : sorted_rows(reports)) {
    cells.push_back({r->name, format_percent_tenths(r->latency_vs_baseline_tenths),
                     format_accuracy(r->accuracy_annotation), std::to_string(r->total_latency),
                     std::to_string(r->total_bops)});
  }
  std::array<std::size_t, kCols> width{};
  for (std::size_t c = 0; c < kCols; ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto pad = [](const std::string& s, std::size_t w, bool left) {
    const std::string fill(w - s.size(), ' ');
    return left ? s + fill : fill + s;
  };
  auto line = [&](const std::array<std::string, kCols>& row) {
    std::string out;
    for (std::size_t c = 0; c < kCols; ++c) {
      if (c > 0) out += " | ";
      out += pad(row[c], width[c], c == 0);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  for (std::size_t c = 0; c < kCols; ++c) {
    if (c > 0) out += "-+-";
    out += std::string(width[c], '-');
  }
  out += "\n";
  for (const auto& row : cells) out += line(row);
  return out;
}

std::string reports_to_json(std::span<const ConfigReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto* r : sorted_rows(reports)) {
    nlohmann::ordered_json obj;
    obj["name"] = r->name;
    obj["total_latency"] = r->total_latency;
    obj["total_bops"] = r->total_bops;
    obj["latency_vs_baseline"] = static_cast<double>(r->latency_vs_baseline_tenths) / 10.0;
    obj["accuracy"] = r->accuracy_annotation ? nlohmann::ordered_json(*r->accuracy_annotation)
                                             : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& l : r->layers) {
      layers.push_back({{"id", l.id},
                        {"b_in", l.precision.b_in},
                        {"b_wt", l.precision.b_wt},
                        {"cycles", l.cycles},
                        {"bops", l.bops}});
    }
    obj["layers"] = std::move(layers);
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

}  // namespace freebits
