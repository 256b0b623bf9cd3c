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

// freebits command-line front end. Talks to the library exclusively through
// the C interface in freebits/freebits.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freebits/freebits.h"

namespace fs = std::filesystem;

namespace {

// Thrown to unwind with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Network = std::unique_ptr<fb_network, Deleter<fb_network, fb_network_free>>;
using Profile = std::unique_ptr<fb_profile, Deleter<fb_profile, fb_profile_free>>;
using LatDict = std::unique_ptr<fb_latdict, Deleter<fb_latdict, fb_latdict_free>>;
using Sensitivity = std::unique_ptr<fb_sensitivity, Deleter<fb_sensitivity, fb_sensitivity_free>>;
using Sweep = std::unique_ptr<fb_sweep, Deleter<fb_sweep, fb_sweep_free>>;

void check(fb_status status, const std::string& context) {
  if (status != FB_OK) throw Exit{static_cast<int>(status), context + ": " + fb_last_error()};
}

std::string take(char* s) {
  std::string out(s);
  fb_string_free(s);
  return out;
}

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{FB_ERR_INPUT, what + " not found: " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content, bool force) {
  if (fs::exists(path) && !force)
    throw Exit{FB_ERR_INPUT, "refusing to overwrite " + path.string() + " (use --force)"};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Exit{FB_ERR_INPUT, "cannot write " + path.string()};
  out << content;
  if (!out) throw Exit{FB_ERR_INPUT, "cannot write " + path.string()};
}

Network load_network(const std::string& path) {
  const auto text = read_file(path, "network");
  fb_network* net = nullptr;
  check(fb_network_parse(text.c_str(), &net), path);
  return Network(net);
}

LatDict load_dict(const std::string& path) {
  const auto text = read_file(path, "latency table");
  fb_latdict* ld = nullptr;
  check(fb_latdict_parse_csv(text.c_str(), &ld), path);
  return LatDict(ld);
}

fb_pall pall_from(const std::string& name) {
  fb_pall pall{};
  check(fb_pall_from_name(name.c_str(), &pall), "--pall");
  return pall;
}

std::string network_json(const fb_network* net) {
  char* s = nullptr;
  check(fb_network_to_json(net, &s), "serialize");
  return take(s);
}

// ---------------------------------------------------------------------------

struct GenDictArgs {
  std::string profile;
  std::string builtin;
  std::string net;
  std::string pall = "full";
  std::string output;
  bool force = false;
};

int run_gen_dict(const GenDictArgs& a) {
  fb_profile* hp_raw = nullptr;
  if (!a.builtin.empty()) {
    check(fb_profile_builtin(a.builtin.c_str(), &hp_raw), "--builtin");
  } else {
    const auto text = read_file(a.profile, "profile");
    check(fb_profile_parse(text.c_str(), &hp_raw), a.profile);
  }
  Profile hp(hp_raw);
  auto net = load_network(a.net);
  fb_latdict* ld = nullptr;
  check(fb_latdict_generate(hp.get(), net.get(), pall_from(a.pall), &ld), "gen-dict");
  LatDict dict(ld);
  char* csv = nullptr;
  check(fb_latdict_to_csv(dict.get(), &csv), "gen-dict");
  write_file(a.output, take(csv), a.force);
  std::cerr << "wrote " << fb_latdict_size(dict.get()) << " entries for "
            << fb_network_num_layer_types(net.get()) << " layer types to " << a.output << "\n";
  return 0;
}

struct OptimizeArgs {
  std::string net;
  std::string dict;
  std::string pall = "full";
  std::string output;
  std::string changes;
  bool force = false;
};

int run_optimize(const OptimizeArgs& a) {
  auto net = load_network(a.net);
  auto dict = load_dict(a.dict);
  fb_network* opt_raw = nullptr;
  check(fb_free_bits(dict.get(), net.get(), pall_from(a.pall), &opt_raw), "optimize");
  Network opt(opt_raw);

  char* log = nullptr;
  check(fb_change_log_csv(dict.get(), net.get(), opt.get(), &log), "optimize");
  fs::path changes = a.changes;
  if (changes.empty()) {
    changes = fs::path(a.output);
    changes.replace_extension(".changes.csv");
  }
  // Write both or neither.
  if (!a.force) {
    for (const fs::path& p : {fs::path(a.output), changes})
      if (fs::exists(p)) throw Exit{FB_ERR_INPUT, "refusing to overwrite " + p.string() + " (use --force)"};
  }
  write_file(a.output, network_json(opt.get()), a.force);
  write_file(changes, take(log), a.force);

  uint64_t before = 0, after = 0;
  check(fb_total_latency(dict.get(), net.get(), &before), "optimize");
  check(fb_total_latency(dict.get(), opt.get(), &after), "optimize");
  std::size_t upgraded = 0;
  for (std::size_t i = 0; i < fb_network_num_layers(net.get()); ++i) {
    fb_layer_info x{}, y{};
    check(fb_network_layer(net.get(), i, &x), "optimize");
    check(fb_network_layer(opt.get(), i, &y), "optimize");
    if (x.b_in != y.b_in || x.b_wt != y.b_wt) ++upgraded;
  }
  std::cout << "upgraded " << upgraded << " of " << fb_network_num_layers(net.get())
            << " layers; latency " << before << " -> " << after << " cycles\n";
  return 0;
}

struct EvaluateArgs {
  std::vector<std::string> nets;
  std::string dict;
  std::string baseline;
  std::string json_out;
  bool force = false;
};

int run_evaluate(const EvaluateArgs& a) {
  auto dict = load_dict(a.dict);
  auto baseline = load_network(a.baseline);
  std::vector<Network> nets;
  std::vector<const fb_network*> handles;
  for (const auto& path : a.nets) {
    nets.push_back(load_network(path));
    handles.push_back(nets.back().get());
  }
  char* table = nullptr;
  char* json = nullptr;
  check(fb_evaluate(dict.get(), handles.data(), handles.size(), baseline.get(), &table,
                    a.json_out.empty() ? nullptr : &json),
        "evaluate");
  std::cout << take(table);
  if (json) write_file(a.json_out, take(json), a.force);
  return 0;
}

struct SweepArgs {
  std::string net;
  std::string dict;
  std::string sens;
  std::string lambdas = "default";
  std::string pall = "full";
  std::string output;
  bool force = false;
};

int run_sweep(const SweepArgs& a) {
  auto net = load_network(a.net);
  auto dict = load_dict(a.dict);
  fb_sensitivity* sens_raw = nullptr;
  if (a.sens.empty()) {
    check(fb_sensitivity_default(net.get(), &sens_raw), "sweep");
  } else {
    const auto text = read_file(a.sens, "sensitivity file");
    check(fb_sensitivity_parse(text.c_str(), net.get(), &sens_raw), a.sens);
  }
  Sensitivity sens(sens_raw);

  std::size_t count = 0;
  check(fb_lambda_spec(a.lambdas.c_str(), nullptr, 0, &count), "--lambdas");
  std::vector<double> lambdas(count);
  check(fb_lambda_spec(a.lambdas.c_str(), lambdas.data(), lambdas.size(), &count), "--lambdas");

  fb_sweep* sweep_raw = nullptr;
  check(fb_sweep_run(net.get(), dict.get(), sens.get(), lambdas.data(), lambdas.size(),
                     pall_from(a.pall), &sweep_raw),
        "sweep");
  Sweep sweep(sweep_raw);

  const fs::path dir(a.output);
  std::error_code ec;
  if (fs::exists(dir) && !fs::is_empty(dir) && !a.force)
    throw Exit{FB_ERR_INPUT, "refusing to write into non-empty " + dir.string() + " (use --force)"};
  fs::create_directories(dir, ec);
  if (ec) throw Exit{FB_ERR_INPUT, "cannot create " + dir.string() + ": " + ec.message()};

  for (std::size_t i = 0; i < fb_sweep_size(sweep.get()); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "%02zu.json", i);
    write_file(dir / ("raw_" + std::string(stem)), network_json(fb_sweep_raw(sweep.get(), i)), true);
    write_file(dir / ("fb_" + std::string(stem)), network_json(fb_sweep_optimized(sweep.get(), i)),
               true);
  }
  char* index = nullptr;
  check(fb_sweep_index_csv(sweep.get(), &index), "sweep");
  write_file(dir / "index.csv", take(index), true);
  std::cerr << "wrote " << 2 * fb_sweep_size(sweep.get()) << " configurations and index.csv to "
            << dir.string() << "\n";
  return 0;
}

struct HomogeneousArgs {
  std::string net;
  int b_in = 8;
  int b_wt = 8;
  int pin_input = 0;
  std::string name;
  std::string output;
  bool force = false;
};

int run_homogeneous(const HomogeneousArgs& a) {
  auto net = load_network(a.net);
  fb_network* out_raw = nullptr;
  check(fb_network_homogeneous(net.get(), a.b_in, a.b_wt, a.pin_input, &out_raw), "homogeneous");
  Network out(out_raw);
  if (!a.name.empty()) {
    fb_network* renamed = nullptr;
    check(fb_network_rename(out.get(), a.name.c_str(), &renamed), "--name");
    out.reset(renamed);
  }
  const std::string json = network_json(out.get());
  write_file(a.output, json, a.force);
  return 0;
}

struct ParetoArgs {
  std::string index;
  std::string column = "latency_after";
  std::string output;
  bool force = false;
};

// Front of a sweep index over (latency column, penalty), penalty minimized.
int run_pareto(const ParetoArgs& a) {
  std::istringstream in(read_file(a.index, "sweep index"));
  std::string line;
  std::getline(in, line);
  if (line != "name,lambda,latency_before,latency_after,penalty")
    throw Exit{FB_ERR_INPUT, a.index + ": not a sweep index"};
  const int lat_col = a.column == "latency_before" ? 2 : a.column == "latency_after" ? 3 : -1;
  if (lat_col < 0) throw Exit{FB_ERR_INPUT, "--column must be latency_before or latency_after"};

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 5) throw Exit{FB_ERR_INPUT, a.index + ": malformed row '" + line + "'"};
    rows.push_back(std::move(fields));
  }
  std::vector<fb_pareto_point> points;
  try {
    for (const auto& r : rows)
      points.push_back({r[0].c_str(), std::stoull(r[lat_col]), std::stod(r[4])});
  } catch (const std::exception&) {
    throw Exit{FB_ERR_INPUT, a.index + ": non-numeric latency or penalty"};
  }
  std::vector<size_t> idx(points.size());
  size_t count = 0;
  check(fb_pareto_front(points.data(), points.size(), FB_MINIMIZE, idx.data(), &count), "pareto");
  std::string out = "name,lambda," + a.column + ",penalty\n";
  for (size_t k = 0; k < count; ++k) {
    const auto& r = rows[idx[k]];
    out += r[0] + "," + r[1] + "," + r[lat_col] + "," + r[4] + "\n";
  }
  if (a.output.empty()) {
    std::cout << out;
  } else {
    write_file(a.output, out, a.force);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency-driven mixed-precision configuration search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fb_version()));

  GenDictArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-dict", "Generate a synthetic latency table");
  auto* prof_opt = gen_cmd->add_option("--profile", gen.profile, "Hardware profile JSON");
  auto* builtin_opt =
      gen_cmd->add_option("--builtin", gen.builtin, "Built-in profile (xpulpv2, xpulpnnv1, xpulpnnv2)");
  prof_opt->excludes(builtin_opt);
  gen_cmd->add_option("--net", gen.net, "Network description JSON")->required();
  gen_cmd->add_option("--pall", gen.pall, "Allowed precision set: full|locked");
  gen_cmd->add_option("-o,--output", gen.output, "Output CSV")->required();
  gen_cmd->add_flag("--force", gen.force, "Overwrite existing output");

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Apply free bits to a configuration");
  opt_cmd->add_option("--net", opt.net, "Network description JSON")->required();
  opt_cmd->add_option("--dict", opt.dict, "Latency table CSV")->required();
  opt_cmd->add_option("--pall", opt.pall, "Allowed precision set: full|locked");
  opt_cmd->add_option("-o,--output", opt.output, "Optimized network JSON")->required();
  opt_cmd->add_option("--changes", opt.changes, "Per-layer change log CSV (default: output path with .changes.csv extension)");
  opt_cmd->add_flag("--force", opt.force, "Overwrite existing output");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Compare configurations against a baseline");
  ev_cmd->add_option("--net", ev.nets, "Network description JSON (repeatable)")->required();
  ev_cmd->add_option("--dict", ev.dict, "Latency table CSV")->required();
  ev_cmd->add_option("--baseline", ev.baseline, "Baseline network JSON")->required();
  ev_cmd->add_option("--json", ev.json_out, "Also write the reports as JSON");
  ev_cmd->add_flag("--force", ev.force, "Overwrite existing output");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Lagrangian sweep followed by free bits");
  sw_cmd->add_option("--net", sw.net, "Network description JSON")->required();
  sw_cmd->add_option("--dict", sw.dict, "Latency table CSV")->required();
  sw_cmd->add_option("--sens", sw.sens, "Sensitivity JSON (layer id -> scale)");
  sw_cmd->add_option("--lambdas", sw.lambdas, "default | log:MIN:MAX:N | comma list");
  sw_cmd->add_option("--pall", sw.pall, "Allowed precision set: full|locked");
  sw_cmd->add_option("-o,--output", sw.output, "Output directory")->required();
  sw_cmd->add_flag("--force", sw.force, "Write into a non-empty directory");

  HomogeneousArgs hom;
  auto* hom_cmd = app.add_subcommand("homogeneous", "Set every layer to one precision pair");
  hom_cmd->add_option("--net", hom.net, "Network description JSON")->required();
  hom_cmd->add_option("--b-in", hom.b_in, "Input bit-width")->required();
  hom_cmd->add_option("--b-wt", hom.b_wt, "Weight bit-width")->required();
  hom_cmd->add_option("--pin-input", hom.pin_input, "Input bit-width of the first layer");
  hom_cmd->add_option("--name", hom.name, "Name of the resulting configuration");
  hom_cmd->add_option("-o,--output", hom.output, "Output network JSON")->required();
  hom_cmd->add_flag("--force", hom.force, "Overwrite existing output");

  ParetoArgs par;
  auto* par_cmd = app.add_subcommand("pareto", "Pareto front of a sweep index");
  par_cmd->add_option("--index", par.index, "index.csv written by sweep")->required();
  par_cmd->add_option("--column", par.column, "latency_before|latency_after");
  par_cmd->add_option("-o,--output", par.output, "Output CSV (default: stdout)");
  par_cmd->add_flag("--force", par.force, "Overwrite existing output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return FB_ERR_INPUT;
  }

  try {
    if (*gen_cmd) {
      if (gen.profile.empty() && gen.builtin.empty())
        throw Exit{FB_ERR_INPUT, "gen-dict needs --profile or --builtin"};
      return run_gen_dict(gen);
    }
    if (*opt_cmd) return run_optimize(opt);
    if (*ev_cmd) return run_evaluate(ev);
    if (*sw_cmd) return run_sweep(sw);
    if (*hom_cmd) return run_homogeneous(hom);
    if (*par_cmd) return run_pareto(par);
  } catch (const Exit& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return FB_ERR_INTERNAL;
  }
  return 0;
}
