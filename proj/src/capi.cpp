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

#include "freebits/freebits.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "freebits/errors.hpp"
#include "freebits/heuristic.hpp"
#include "freebits/latdict.hpp"
#include "freebits/metrics.hpp"
#include "freebits/netmodel.hpp"
#include "freebits/search.hpp"

struct fb_network {
  freebits::NetworkConfig net;
};
struct fb_profile {
  freebits::HardwareProfile hp;
};
struct fb_latdict {
  freebits::LatencyDictionary ld;
};
struct fb_sensitivity {
  freebits::SensitivityModel sens;
};
struct fb_sweep {
  std::vector<freebits::SweepPoint> points;
  std::vector<fb_network> raw;
  std::vector<fb_network> optimized;
};

namespace {

thread_local std::string g_last_error;

fb_status fail(fb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
fb_status guarded(Fn&& fn) {
  try {
    fn();
    return FB_OK;
  } catch (const freebits::Error& e) {
    return fail(static_cast<fb_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FB_ERR_INTERNAL, e.what());
  }
}

#define FB_REQUIRE(cond)                                                    \
  do {                                                                      \
    if (!(cond)) return fail(FB_ERR_INPUT, "invalid argument: " #cond);     \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

freebits::AllowedPrecisionSet to_pall(fb_pall pall) {
  switch (pall) {
    case FB_PALL_FULL:
      return freebits::AllowedPrecisionSet::full();
    case FB_PALL_LOCKED:
      return freebits::AllowedPrecisionSet::locked();
  }
  throw freebits::ParseError("unknown precision set");
}

const freebits::Layer& layer_at(const fb_network* net, std::size_t index) {
  if (index >= net->net.size())
    throw freebits::ParseError("layer index " + std::to_string(index) + " out of range");
  return net->net.layer(index);
}

}  // namespace

extern "C" {

const char* fb_version(void) { return "0.1.0"; }

const char* fb_last_error(void) { return g_last_error.c_str(); }

void fb_string_free(char* s) { std::free(s); }

fb_status fb_pall_from_name(const char* name, fb_pall* out) {
  FB_REQUIRE(name && out);
  if (std::strcmp(name, "full") == 0) {
    *out = FB_PALL_FULL;
  } else if (std::strcmp(name, "locked") == 0) {
    *out = FB_PALL_LOCKED;
  } else {
    return fail(FB_ERR_INPUT, std::string("unknown precision set '") + name +
                                  "' (expected full or locked)");
  }
  return FB_OK;
}

// ---------------------------------------------------------------------------

fb_status fb_network_parse(const char* json, fb_network** out) {
  FB_REQUIRE(json && out);
  return guarded([&] { *out = new fb_network{freebits::parse_network(json)}; });
}

fb_status fb_network_to_json(const fb_network* net, char** out) {
  FB_REQUIRE(net && out);
  return guarded([&] { *out = dup_string(freebits::serialize_network(net->net)); });
}

void fb_network_free(fb_network* net) { delete net; }

const char* fb_network_name(const fb_network* net) { return net ? net->net.name().c_str() : ""; }

size_t fb_network_num_layers(const fb_network* net) { return net ? net->net.size() : 0; }

size_t fb_network_num_layer_types(const fb_network* net) {
  return net ? freebits::unique_layer_types(net->net).size() : 0;
}

fb_status fb_network_layer(const fb_network* net, size_t index, fb_layer_info* out) {
  FB_REQUIRE(net && out);
  return guarded([&] {
    const auto& layer = layer_at(net, index);
    out->id = layer.id.c_str();
    out->op = freebits::op_kind_name(layer.type.op_kind).data();
    out->b_in = layer.precision.b_in;
    out->b_wt = layer.precision.b_wt;
    out->macs = freebits::macs(layer.type);
  });
}

fb_status fb_network_equal(const fb_network* a, const fb_network* b, int* out) {
  FB_REQUIRE(a && b && out);
  *out = a->net == b->net ? 1 : 0;
  return FB_OK;
}

fb_status fb_network_homogeneous(const fb_network* net, int b_in, int b_wt, int first_layer_b_in,
                                 fb_network** out) {
  FB_REQUIRE(net && out);
  return guarded([&] {
    const freebits::PrecisionPair pp{b_in, b_wt};
    if (!pp.valid() || (first_layer_b_in != 0 && !freebits::is_valid_bitwidth(first_layer_b_in)))
      throw freebits::ParseError("bit-widths must be 2, 4 or 8");
    std::optional<int> pin;
    if (first_layer_b_in != 0) pin = first_layer_b_in;
    *out = new fb_network{freebits::homogeneous_config(net->net, pp, pin)};
  });
}

fb_status fb_network_rename(const fb_network* net, const char* name, fb_network** out) {
  FB_REQUIRE(net && name && out);
  return guarded([&] { *out = new fb_network{net->net.renamed(name, std::nullopt)}; });
}

fb_status fb_layer_type_key(const fb_network* net, size_t index, char** out) {
  FB_REQUIRE(net && out);
  return guarded([&] { *out = dup_string(freebits::canonical_key(layer_at(net, index).type)); });
}

// ---------------------------------------------------------------------------

fb_status fb_profile_parse(const char* json, fb_profile** out) {
  FB_REQUIRE(json && out);
  return guarded([&] { *out = new fb_profile{freebits::parse_hardware_profile(json)}; });
}

fb_status fb_profile_builtin(const char* name, fb_profile** out) {
  FB_REQUIRE(name && out);
  return guarded([&] { *out = new fb_profile{freebits::builtin_profile(name)}; });
}

fb_status fb_profile_to_json(const fb_profile* hp, char** out) {
  FB_REQUIRE(hp && out);
  return guarded([&] { *out = dup_string(freebits::serialize_hardware_profile(hp->hp)); });
}

void fb_profile_free(fb_profile* hp) { delete hp; }

// ---------------------------------------------------------------------------

fb_status fb_latdict_parse_csv(const char* csv, fb_latdict** out) {
  FB_REQUIRE(csv && out);
  return guarded([&] { *out = new fb_latdict{freebits::load_latency_dict(csv)}; });
}

fb_status fb_latdict_generate(const fb_profile* hp, const fb_network* net, fb_pall pall,
                              fb_latdict** out) {
  FB_REQUIRE(hp && net && out);
  return guarded([&] { *out = new fb_latdict{freebits::generate_dict(hp->hp, net->net, to_pall(pall))}; });
}

fb_status fb_latdict_to_csv(const fb_latdict* ld, char** out) {
  FB_REQUIRE(ld && out);
  return guarded([&] { *out = dup_string(freebits::serialize_latency_dict(ld->ld)); });
}

size_t fb_latdict_size(const fb_latdict* ld) { return ld ? ld->ld.size() : 0; }

fb_status fb_latdict_lookup(const fb_latdict* ld, const fb_network* net, size_t layer, int b_in,
                            int b_wt, uint64_t* cycles) {
  FB_REQUIRE(ld && net && cycles);
  return guarded([&] {
    const auto& l = layer_at(net, layer);
    const freebits::PrecisionPair pp{b_in, b_wt};
    auto lat = ld->ld.lookup(l.type, pp);
    if (!lat)
      throw freebits::UnprofiledError("layer '" + l.id + "' at " + freebits::to_string(pp) +
                                      " is not profiled");
    *cycles = *lat;
  });
}

void fb_latdict_free(fb_latdict* ld) { delete ld; }

fb_status fb_synth_latency(const fb_profile* hp, const fb_network* net, size_t layer, int b_in,
                           int b_wt, uint64_t* cycles) {
  FB_REQUIRE(hp && net && cycles);
  return guarded([&] {
    const freebits::PrecisionPair pp{b_in, b_wt};
    if (!pp.valid()) throw freebits::ParseError("bit-widths must be 2, 4 or 8");
    *cycles = freebits::synth_latency(hp->hp, layer_at(net, layer).type, pp);
  });
}

// ---------------------------------------------------------------------------

fb_status fb_total_latency(const fb_latdict* ld, const fb_network* net, uint64_t* out) {
  FB_REQUIRE(ld && net && out);
  return guarded([&] { *out = freebits::total_latency(ld->ld, net->net); });
}

fb_status fb_total_bops(const fb_network* net, int64_t* out) {
  FB_REQUIRE(net && out);
  return guarded([&] { *out = freebits::total_bops(net->net); });
}

fb_status fb_evaluate(const fb_latdict* ld, const fb_network* const* nets, size_t n,
                      const fb_network* baseline, char** table, char** json) {
  FB_REQUIRE(ld && (nets || n == 0) && baseline);
  return guarded([&] {
    std::vector<freebits::ConfigReport> reports;
    for (size_t i = 0; i < n; ++i) {
      if (!nets[i]) throw freebits::ParseError("null network handle");
      reports.push_back(freebits::compare(ld->ld, nets[i]->net, baseline->net));
    }
    std::unique_ptr<char, decltype(&std::free)> t(nullptr, &std::free);
    if (table) t.reset(dup_string(freebits::render_report_table(reports)));
    if (json) *json = dup_string(freebits::reports_to_json(reports));
    if (table) *table = t.release();
  });
}

// ---------------------------------------------------------------------------

fb_status fb_free_bits(const fb_latdict* ld, const fb_network* net, fb_pall pall,
                       fb_network** out) {
  FB_REQUIRE(ld && net && out);
  return guarded([&] { *out = new fb_network{freebits::free_bits(ld->ld, net->net, to_pall(pall))}; });
}

fb_status fb_change_log_csv(const fb_latdict* ld, const fb_network* before,
                            const fb_network* after, char** out) {
  FB_REQUIRE(ld && before && after && out);
  return guarded([&] {
    const auto& a = before->net;
    const auto& b = after->net;
    if (a.size() != b.size())
      throw freebits::ValidationError("change log needs configs with equal layer counts");
    std::string csv = "index,id,old_b_in,old_b_wt,new_b_in,new_b_wt,old_cycles,new_cycles\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& la = a.layer(i);
      const auto& lb = b.layer(i);
      if (la.id != lb.id || la.type != lb.type)
        throw freebits::ValidationError("change log needs configs with the same topology");
      csv += std::to_string(i + 1) + "," + la.id + "," + std::to_string(la.precision.b_in) + "," +
             std::to_string(la.precision.b_wt) + "," + std::to_string(lb.precision.b_in) + "," +
             std::to_string(lb.precision.b_wt) + "," +
             std::to_string(freebits::layer_latency(ld->ld, la)) + "," +
             std::to_string(freebits::layer_latency(ld->ld, lb)) + "\n";
    }
    *out = dup_string(csv);
  });
}

// ---------------------------------------------------------------------------

fb_status fb_sensitivity_default(const fb_network* net, fb_sensitivity** out) {
  FB_REQUIRE(net && out);
  return guarded([&] { *out = new fb_sensitivity{freebits::default_sensitivity(net->net)}; });
}

fb_status fb_sensitivity_parse(const char* json, const fb_network* net, fb_sensitivity** out) {
  FB_REQUIRE(json && net && out);
  return guarded([&] { *out = new fb_sensitivity{freebits::parse_sensitivity(json, net->net)}; });
}

void fb_sensitivity_free(fb_sensitivity* sens) { delete sens; }

fb_status fb_lambda_spec(const char* spec, double* values, size_t capacity, size_t* count) {
  FB_REQUIRE(spec && count && (values || capacity == 0));
  return guarded([&] {
    auto lambdas = freebits::parse_lambda_spec(spec);
    *count = lambdas.size();
    for (size_t i = 0; i < lambdas.size() && i < capacity; ++i) values[i] = lambdas[i];
  });
}

fb_status fb_sweep_run(const fb_network* net, const fb_latdict* ld, const fb_sensitivity* sens,
                       const double* lambdas, size_t n, fb_pall pall, fb_sweep** out) {
  FB_REQUIRE(net && ld && sens && (lambdas || n == 0) && out);
  return guarded([&] {
    auto sweep = std::make_unique<fb_sweep>();
    sweep->points = freebits::run_sweep(net->net, ld->ld, sens->sens,
                                        std::span<const double>(lambdas, n), to_pall(pall));
    for (const auto& p : sweep->points) {
      sweep->raw.push_back(fb_network{p.raw});
      sweep->optimized.push_back(fb_network{p.optimized});
    }
    *out = sweep.release();
  });
}

size_t fb_sweep_size(const fb_sweep* sweep) { return sweep ? sweep->points.size() : 0; }

double fb_sweep_lambda(const fb_sweep* sweep, size_t i) {
  return sweep && i < sweep->points.size() ? sweep->points[i].lambda : 0.0;
}

const fb_network* fb_sweep_raw(const fb_sweep* sweep, size_t i) {
  return sweep && i < sweep->raw.size() ? &sweep->raw[i] : nullptr;
}

const fb_network* fb_sweep_optimized(const fb_sweep* sweep, size_t i) {
  return sweep && i < sweep->optimized.size() ? &sweep->optimized[i] : nullptr;
}

fb_status fb_sweep_index_csv(const fb_sweep* sweep, char** out) {
  FB_REQUIRE(sweep && out);
  return guarded([&] { *out = dup_string(freebits::sweep_index_csv(sweep->points)); });
}

void fb_sweep_free(fb_sweep* sweep) { delete sweep; }

fb_status fb_brute_force_best(const fb_network* net, const fb_latdict* ld,
                              const fb_sensitivity* sens, double lambda, fb_pall pall,
                              fb_network** out) {
  FB_REQUIRE(net && ld && sens && out);
  return guarded([&] {
    *out = new fb_network{
        freebits::brute_force_best(net->net, ld->ld, sens->sens, lambda, to_pall(pall))};
  });
}

// ---------------------------------------------------------------------------

fb_status fb_pareto_front(const fb_pareto_point* points, size_t n, fb_objective_sense sense,
                          size_t* out_indices, size_t* out_count) {
  FB_REQUIRE((points || n == 0) && (out_indices || n == 0) && out_count);
  return guarded([&] {
    // Names carry the original index so survivors can be mapped back.
    std::vector<freebits::ParetoPoint> pts;
    for (size_t i = 0; i < n; ++i)
      pts.push_back({std::to_string(i), points[i].latency, points[i].objective});
    auto front = freebits::pareto_front(
        pts, sense == FB_MAXIMIZE ? freebits::ObjectiveSense::kMaximize
                                  : freebits::ObjectiveSense::kMinimize);
    *out_count = front.size();
    for (size_t i = 0; i < front.size(); ++i)
      out_indices[i] = static_cast<size_t>(std::stoull(front[i].config_name));
  });
}

}  // extern "C"
