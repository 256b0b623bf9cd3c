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

#include "freebits/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <utility>

#include <json.hpp>

#include "freebits/errors.hpp"

namespace freebits {

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 5> kOpNames = {{
    {OpKind::kConv2d, "conv2d"},
    {OpKind::kDepthwiseConv2d, "dw_conv2d"},
    {OpKind::kPointwiseConv2d, "pw_conv2d"},
    {OpKind::kLinear, "linear"},
    {OpKind::kAdd, "add"},
}};

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kTopLevelFields = {"name", "accuracy", "layers"};
const std::set<std::string> kLayerFields = {
    "id",   "op",  "in_h", "in_w",   "c_in",  "c_out", "k_h", "k_w",
    "s_h",  "s_w", "groups", "pad_h", "pad_w", "b_in", "b_wt"};

std::int64_t get_int(const json& obj, const std::string& field,
                     const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(where + "." + field + ": missing field");
  if (!it->is_number_integer())
    throw ParseError(where + "." + field + ": expected integer");
  return it->get<std::int64_t>();
}

}  // namespace

std::string_view op_kind_name(OpKind kind) {
  for (const auto& [k, name] : kOpNames)
    if (k == kind) return name;
  return "?";
}

std::optional<OpKind> op_kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kOpNames)
    if (n == name) return k;
  return std::nullopt;
}

std::string to_string(const PrecisionPair& pp) {
  return "(" + std::to_string(pp.b_in) + "," + std::to_string(pp.b_wt) + ")";
}

// ---------------------------------------------------------------------------
// AllowedPrecisionSet

AllowedPrecisionSet::AllowedPrecisionSet(std::vector<PrecisionPair> pairs)
    : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  if (pairs_.empty()) throw ValidationError("allowed precision set is empty");
  for (const auto& pp : pairs_)
    if (!pp.valid())
      throw ValidationError("allowed precision set contains invalid pair " + to_string(pp));
}

AllowedPrecisionSet AllowedPrecisionSet::full() {
  std::vector<PrecisionPair> pairs;
  for (int b_in : kBitwidths)
    for (int b_wt : kBitwidths) pairs.push_back({b_in, b_wt});
  return AllowedPrecisionSet(std::move(pairs));
}

AllowedPrecisionSet AllowedPrecisionSet::locked() {
  std::vector<PrecisionPair> pairs;
  for (int b : kBitwidths) pairs.push_back({b, b});
  return AllowedPrecisionSet(std::move(pairs));
}

AllowedPrecisionSet AllowedPrecisionSet::from_name(std::string_view name) {
  if (name == "full") return full();
  if (name == "locked") return locked();
  throw ParseError("unknown precision set '" + std::string(name) +
                   "' (expected full or locked)");
}

bool AllowedPrecisionSet::contains(const PrecisionPair& pp) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), pp);
}

// ---------------------------------------------------------------------------
// LayerType

std::int64_t LayerType::weight_elements() const {
  if (op_kind == OpKind::kAdd) return 0;
  return out_channels * kernel_h * kernel_w * (in_channels / groups);
}

std::optional<std::string> LayerType::check() const {
  if (in_height <= 0 || in_width <= 0) return "input dimensions must be positive";
  if (in_channels <= 0 || out_channels <= 0) return "channel counts must be positive";
  if (kernel_h <= 0 || kernel_w <= 0) return "kernel dimensions must be positive";
  if (stride_h <= 0 || stride_w <= 0) return "strides must be positive";
  if (groups <= 0) return "groups must be positive";
  if (padding_h < 0 || padding_w < 0) return "padding must be non-negative";
  if (in_channels % groups != 0) return "in_channels not divisible by groups";
  if (in_height + 2 * padding_h < kernel_h || in_width + 2 * padding_w < kernel_w)
    return "kernel larger than padded input";
  switch (op_kind) {
    case OpKind::kDepthwiseConv2d:
      if (groups != in_channels) return "depthwise conv requires groups == in_channels";
      if (out_channels != in_channels)
        return "depthwise conv requires out_channels == in_channels";
      break;
    case OpKind::kPointwiseConv2d:
      if (kernel_h != 1 || kernel_w != 1) return "pointwise conv requires a 1x1 kernel";
      if (groups != 1) return "pointwise conv requires groups == 1";
      break;
    case OpKind::kAdd:
      if (kernel_h != 1 || kernel_w != 1) return "add requires a 1x1 kernel";
      if (stride_h != 1 || stride_w != 1) return "add requires stride 1";
      if (groups != 1) return "add requires groups == 1";
      if (in_channels != out_channels) return "add requires in_channels == out_channels";
      if (padding_h != 0 || padding_w != 0) return "add requires zero padding";
      break;
    case OpKind::kConv2d:
    case OpKind::kLinear:
      break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// NetworkConfig

bool operator==(const Layer& a, const Layer& b) {
  return a.id == b.id && a.type == b.type && a.precision == b.precision;
}

bool operator==(const NetworkConfig& a, const NetworkConfig& b) {
  return a.name_ == b.name_ && a.layers_ == b.layers_ && a.accuracy_ == b.accuracy_;
}

NetworkConfig::NetworkConfig(std::string name, std::vector<Layer> layers,
                             std::optional<double> accuracy)
    : name_(std::move(name)), layers_(std::move(layers)), accuracy_(accuracy) {
  if (layers_.empty()) throw ValidationError("network '" + name_ + "' has no layers");
  if (accuracy_ && !(*accuracy_ >= 0.0 && *accuracy_ <= 100.0))
    throw ValidationError("accuracy annotation must lie in [0, 100]");
  std::set<std::string> seen;
  for (const auto& layer : layers_) {
    if (layer.id.empty()) throw ValidationError("layer with empty id");
    if (!seen.insert(layer.id).second)
      throw ValidationError("duplicate layer id '" + layer.id + "'");
    if (auto why = layer.type.check())
      throw ValidationError("layer '" + layer.id + "': " + *why);
    if (!layer.precision.valid())
      throw ValidationError("layer '" + layer.id + "': precision " +
                            to_string(layer.precision) + " outside {2,4,8}");
    if (layer.type.op_kind == OpKind::kAdd && layer.precision.b_wt != layer.precision.b_in)
      throw ValidationError("layer '" + layer.id + "': add layers require b_wt == b_in");
  }
}

std::vector<PrecisionPair> NetworkConfig::precisions() const {
  std::vector<PrecisionPair> out;
  out.reserve(layers_.size());
  for (const auto& layer : layers_) out.push_back(layer.precision);
  return out;
}

NetworkConfig NetworkConfig::with_precisions(std::span<const PrecisionPair> precisions) const {
  if (precisions.size() != layers_.size())
    throw ValidationError("precision list length does not match layer count");
  std::vector<Layer> layers = layers_;
  for (std::size_t i = 0; i < layers.size(); ++i) layers[i].precision = precisions[i];
  return NetworkConfig(name_, std::move(layers), accuracy_);
}

NetworkConfig NetworkConfig::renamed(std::string name, std::optional<double> accuracy) const {
  return NetworkConfig(std::move(name), layers_, accuracy);
}

// ---------------------------------------------------------------------------
// Parsing and serialization

NetworkConfig parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kTopLevelFields.count(key)) throw ParseError("unknown top-level field '" + key + "'");

  auto name_it = doc.find("name");
  if (name_it == doc.end() || !name_it->is_string())
    throw ParseError("name: expected string");

  std::optional<double> accuracy;
  if (auto it = doc.find("accuracy"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError("accuracy: expected number or null");
    accuracy = it->get<double>();
  }

  auto layers_it = doc.find("layers");
  if (layers_it == doc.end() || !layers_it->is_array())
    throw ParseError("layers: expected array");

  std::vector<Layer> layers;
  for (std::size_t i = 0; i < layers_it->size(); ++i) {
    const json& obj = (*layers_it)[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (!obj.is_object()) throw ParseError(where + ": expected object");
    for (const auto& [key, _] : obj.items())
      if (!kLayerFields.count(key))
        throw ParseError(where + ": unknown field '" + key + "'");

    Layer layer;
    auto id_it = obj.find("id");
    if (id_it == obj.end() || !id_it->is_string()) throw ParseError(where + ".id: expected string");
    layer.id = id_it->get<std::string>();

    auto op_it = obj.find("op");
    if (op_it == obj.end() || !op_it->is_string()) throw ParseError(where + ".op: expected string");
    auto op = op_kind_from_name(op_it->get<std::string>());
    if (!op) throw ParseError(where + ".op: unknown op '" + op_it->get<std::string>() + "'");

    LayerType& t = layer.type;
    t.op_kind = *op;
    t.in_height = get_int(obj, "in_h", where);
    t.in_width = get_int(obj, "in_w", where);
    t.in_channels = get_int(obj, "c_in", where);
    t.out_channels = get_int(obj, "c_out", where);
    t.kernel_h = get_int(obj, "k_h", where);
    t.kernel_w = get_int(obj, "k_w", where);
    t.stride_h = get_int(obj, "s_h", where);
    t.stride_w = get_int(obj, "s_w", where);
    t.groups = get_int(obj, "groups", where);
    t.padding_h = get_int(obj, "pad_h", where);
    t.padding_w = get_int(obj, "pad_w", where);

    const auto b_in = get_int(obj, "b_in", where);
    const auto b_wt = get_int(obj, "b_wt", where);
    if (b_in < 0 || b_in > 8 || !is_valid_bitwidth(static_cast<int>(b_in)))
      throw ParseError(where + ".b_in: expected 2, 4 or 8");
    if (b_wt < 0 || b_wt > 8 || !is_valid_bitwidth(static_cast<int>(b_wt)))
      throw ParseError(where + ".b_wt: expected 2, 4 or 8");
    layer.precision = {static_cast<int>(b_in), static_cast<int>(b_wt)};
    layers.push_back(std::move(layer));
  }
  return NetworkConfig(name_it->get<std::string>(), std::move(layers), accuracy);
}

std::string serialize_network(const NetworkConfig& net) {
  // One layer object per line keeps files diffable.
  ordered_json head;
  head["name"] = net.name();
  std::string out = "{\n  \"name\": " + head["name"].dump() + ",\n  \"accuracy\": ";
  out += net.accuracy() ? ordered_json(*net.accuracy()).dump() : "null";
  out += ",\n  \"layers\": [\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Layer& l = net.layer(i);
    const LayerType& t = l.type;
    ordered_json obj;
    obj["id"] = l.id;
    obj["op"] = std::string(op_kind_name(t.op_kind));
    obj["in_h"] = t.in_height;
    obj["in_w"] = t.in_width;
    obj["c_in"] = t.in_channels;
    obj["c_out"] = t.out_channels;
    obj["k_h"] = t.kernel_h;
    obj["k_w"] = t.kernel_w;
    obj["s_h"] = t.stride_h;
    obj["s_w"] = t.stride_w;
    obj["groups"] = t.groups;
    obj["pad_h"] = t.padding_h;
    obj["pad_w"] = t.padding_w;
    obj["b_in"] = l.precision.b_in;
    obj["b_wt"] = l.precision.b_wt;
    out += "    " + obj.dump();
    out += (i + 1 < net.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Layer type keys

std::string canonical_key(const LayerType& lt) {
  auto n = [](std::int64_t v) { return std::to_string(v); };
  return std::string(op_kind_name(lt.op_kind)) + "/h" + n(lt.in_height) + "w" + n(lt.in_width) +
         "/c" + n(lt.in_channels) + "-" + n(lt.out_channels) + "/k" + n(lt.kernel_h) + "x" +
         n(lt.kernel_w) + "/s" + n(lt.stride_h) + "x" + n(lt.stride_w) + "/g" + n(lt.groups) +
         "/p" + n(lt.padding_h) + "x" + n(lt.padding_w);
}

namespace {

// Cursor over a canonical key; each expect/number call consumes input.
class KeyReader {
 public:
  explicit KeyReader(std::string_view key) : key_(key), rest_(key) {}

  void expect(std::string_view token) {
    if (rest_.substr(0, token.size()) != token) fail();
    rest_.remove_prefix(token.size());
  }

  std::int64_t number() {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(rest_.data(), rest_.data() + rest_.size(), v);
    if (ec != std::errc() || ptr == rest_.data()) fail();
    rest_.remove_prefix(static_cast<std::size_t>(ptr - rest_.data()));
    return v;
  }

  std::string_view until(char c) {
    auto pos = rest_.find(c);
    if (pos == std::string_view::npos) fail();
    auto head = rest_.substr(0, pos);
    rest_.remove_prefix(pos);
    return head;
  }

  void finish() {
    if (!rest_.empty()) fail();
  }

  [[noreturn]] void fail() const {
    throw ParseError("malformed layer type key '" + std::string(key_) + "'");
  }

 private:
  std::string_view key_;
  std::string_view rest_;
};

}  // namespace

LayerType parse_canonical_key(std::string_view key) {
  KeyReader r(key);
  LayerType lt;
  auto op = op_kind_from_name(r.until('/'));
  if (!op) r.fail();
  lt.op_kind = *op;
  r.expect("/h");
  lt.in_height = r.number();
  r.expect("w");
  lt.in_width = r.number();
  r.expect("/c");
  lt.in_channels = r.number();
  r.expect("-");
  lt.out_channels = r.number();
  r.expect("/k");
  lt.kernel_h = r.number();
  r.expect("x");
  lt.kernel_w = r.number();
  r.expect("/s");
  lt.stride_h = r.number();
  r.expect("x");
  lt.stride_w = r.number();
  r.expect("/g");
  lt.groups = r.number();
  r.expect("/p");
  lt.padding_h = r.number();
  r.expect("x");
  lt.padding_w = r.number();
  r.finish();
  if (auto why = lt.check()) throw ParseError("layer type key '" + std::string(key) + "': " + *why);
  return lt;
}

std::vector<LayerType> unique_layer_types(const NetworkConfig& net) {
  std::vector<LayerType> out;
  std::set<LayerType> seen;
  for (const auto& layer : net.layers())
    if (seen.insert(layer.type).second) out.push_back(layer.type);
  return out;
}

}  // namespace freebits
