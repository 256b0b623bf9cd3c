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

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "doctest.h"

using namespace freebits::testing;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("gen-dict writes one row per layer type and pair") {
  ScratchDir dir;
  REQUIRE(run_gen_dict(dir, "ld.csv") == 0);
  auto rows = lines(slurp(dir / "ld.csv"));
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "lt_key,b_in,b_wt,cycles");
  CHECK(rows.size() == 1 + 20 * 9);
  CHECK(matches_golden("gen_dict_mnv1_xpulpnnv1.csv", slurp(dir / "ld.csv")));

  auto builtin = run_cli(dir, {"gen-dict", "--builtin", "xpulpnnv1", "--net",
                               fixture_path("mnv1.json").string(), "-o", (dir / "b.csv").string()});
  CHECK(builtin.code == 0);
  CHECK(slurp(dir / "b.csv") == slurp(dir / "ld.csv"));

  auto locked = run_cli(dir, {"gen-dict", "--builtin", "xpulpv2", "--net",
                              fixture_path("mnv2.json").string(), "--pall", "locked", "-o",
                              (dir / "l.csv").string()});
  CHECK(locked.code == 0);
}

TEST_CASE("gen-dict errors") {
  ScratchDir dir;
  auto missing = run_cli(dir, {"gen-dict", "--profile", (dir / "nope.json").string(), "--net",
                               fixture_path("mnv1.json").string(), "-o", (dir / "x.csv").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("profile not found") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.csv"));

  REQUIRE(run_gen_dict(dir, "ld.csv") == 0);
  auto again = run_gen_dict(dir, "ld.csv");
  CHECK(again == 2);
  auto forced = run_cli(dir, {"gen-dict", "--builtin", "xpulpnnv1", "--net",
                              fixture_path("mnv1.json").string(), "-o", (dir / "ld.csv").string(),
                              "--force"});
  CHECK(forced.code == 0);

  CHECK(run_cli(dir, {"gen-dict", "--bogus"}).code == 2);
  CHECK(run_cli(dir, {"gen-dict", "--builtin", "xpulpnnv1", "--net",
                      fixture_path("mnv1.json").string(), "--pall", "some", "-o",
                      (dir / "y.csv").string()})
            .code == 2);

  std::string dup = slurp(fixture_path("mnv1.json"));
  dup.replace(dup.find("\"dw1\""), 5, "\"conv1\"");
  spit(dir / "dup.json", dup);
  auto invalid = run_cli(dir, {"gen-dict", "--builtin", "xpulpnnv1", "--net",
                               (dir / "dup.json").string(), "-o", (dir / "z.csv").string()});
  CHECK(invalid.code == 4);
  CHECK(invalid.err.find("conv1") != std::string::npos);
}

TEST_CASE("optimize") {
  ScratchDir dir;
  REQUIRE(run_gen_dict(dir, "ld.csv") == 0);
  REQUIRE(run_optimize(dir, "ld.csv", "opt.json") == 0);
  CHECK(matches_golden("optimize_mnv1_4b4b_xpulpnnv1.json", slurp(dir / "opt.json")));
  CHECK(matches_golden("optimize_mnv1_4b4b_xpulpnnv1.changes.csv",
                       slurp(dir / "opt.changes.csv")));

  auto changes = lines(slurp(dir / "opt.changes.csv"));
  REQUIRE(changes.size() == 29);
  for (std::size_t i = 1; i < changes.size(); ++i) {
    auto f = split(changes[i]);
    REQUIRE(f.size() == 8);
    CHECK(std::stoi(f[4]) >= std::stoi(f[2]));
    CHECK(std::stoi(f[5]) >= std::stoi(f[3]));
    CHECK(std::stoull(f[7]) <= std::stoull(f[6]));
  }

  // 8b/8b input comes back unchanged.
  auto same = run_cli(dir, {"optimize", "--net", fixture_path("mnv1.json").string(), "--dict",
                            (dir / "ld.csv").string(), "-o", (dir / "same.json").string()});
  CHECK(same.code == 0);
  auto round = run_cli(dir, {"homogeneous", "--net", fixture_path("mnv1.json").string(), "--b-in",
                             "8", "--b-wt", "8", "--name", "mnv1-0.75", "-o",
                             (dir / "all8.json").string()});
  CHECK(round.code == 0);
  CHECK(slurp(dir / "same.json") == slurp(dir / "all8.json"));

  // A locked dictionary has no entry for the pinned 8b/4b first layer.
  REQUIRE(run_cli(dir, {"gen-dict", "--builtin", "xpulpnnv1", "--net",
                        fixture_path("mnv1.json").string(), "--pall", "locked", "-o",
                        (dir / "locked.csv").string()})
              .code == 0);
  auto unprofiled = run_cli(dir, {"optimize", "--net", fixture_path("mnv1_4b4b.json").string(),
                                  "--dict", (dir / "locked.csv").string(), "-o",
                                  (dir / "u.json").string()});
  CHECK(unprofiled.code == 3);
  CHECK(unprofiled.err.find("conv1") != std::string::npos);

  auto missing_dict = run_cli(dir, {"optimize", "--net", fixture_path("mnv1.json").string(),
                                    "--dict", (dir / "none.csv").string(), "-o",
                                    (dir / "m.json").string()});
  CHECK(missing_dict.code == 2);
}

TEST_CASE("evaluate") {
  ScratchDir dir;
  auto table = run_table_report(dir);
  CHECK(table.code == 0);
  CHECK(matches_golden("evaluate_table.txt", table.out));
  auto rows = lines(table.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].rfind("4b/4b+fb", 0) == 0);
  CHECK(rows[3].rfind("8b/8b", 0) == 0);

  auto self = run_cli(dir, {"evaluate", "--net", fixture_path("table_8b.json").string(), "--dict",
                            fixture_path("table_ld.csv").string(), "--baseline",
                            fixture_path("table_8b.json").string(), "--json",
                            (dir / "r.json").string()});
  CHECK(self.code == 0);
  CHECK(self.out.find("+0.0%") != std::string::npos);
  CHECK(slurp(dir / "r.json").find("\"latency_vs_baseline\": 0.0") != std::string::npos);

  auto mismatch = run_cli(dir, {"evaluate", "--net", fixture_path("mnv1.json").string(), "--dict",
                                fixture_path("table_ld.csv").string(), "--baseline",
                                fixture_path("table_8b.json").string()});
  CHECK(mismatch.code == 4);
}

TEST_CASE("sweep") {
  ScratchDir dir;
  REQUIRE(run_gen_dict(dir, "ld.csv") == 0);
  REQUIRE(run_sweep(dir, "ld.csv", "sweep") == 0);
  CHECK(matches_golden_tree("sweep_mnv1_xpulpnnv1", dir / "sweep"));

  std::size_t configs = 0;
  for (const auto& e : fs::directory_iterator(dir / "sweep"))
    if (e.path().extension() == ".json") ++configs;
  CHECK(configs == 32);

  auto index = lines(slurp(dir / "sweep" / "index.csv"));
  REQUIRE(index.size() == 17);
  CHECK(index[0] == "name,lambda,latency_before,latency_after,penalty");
  for (std::size_t i = 1; i < index.size(); ++i) {
    auto f = split(index[i]);
    REQUIRE(f.size() == 5);
    CHECK(std::stoull(f[3]) <= std::stoull(f[2]));
  }
  CHECK(split(index[1])[1] == "0");
  CHECK(split(index[1])[4] == "0");

  CHECK(run_sweep(dir, "ld.csv", "sweep") == 2);

  auto front = run_cli(dir, {"pareto", "--index", (dir / "sweep" / "index.csv").string()});
  CHECK(front.code == 0);
  CHECK(lines(front.out).size() >= 2);
}

TEST_CASE("homogeneous") {
  ScratchDir dir;
  auto r = run_cli(dir, {"homogeneous", "--net", fixture_path("mnv1.json").string(), "--b-in", "4",
                         "--b-wt", "4", "--pin-input", "8", "--name", "mnv1-0.75-4b4b", "-o",
                         (dir / "h.json").string()});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "h.json") == slurp(fixture_path("mnv1_4b4b.json")));
  auto bad = run_cli(dir, {"homogeneous", "--net", fixture_path("mnv1.json").string(), "--b-in",
                           "3", "--b-wt", "4", "-o", (dir / "bad.json").string()});
  CHECK(bad.code != 0);
}
