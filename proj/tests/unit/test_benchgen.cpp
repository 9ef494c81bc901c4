// Copyright 2026 The Bowser Routing Authors
//
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

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <doctest.h>

#include "bowser/benchgen.hpp"
#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::benchgen;
using bowser::testing::DataPath;

namespace {

std::map<std::string, std::set<std::string>> Levels(const std::vector<TestbedInstance>& tb) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& ti : tb) {
    for (const auto& [k, v] : ti.factors) out[k].insert(v);
  }
  return out;
}

std::vector<std::vector<std::string>> ParseTsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("deterministic test bed is a full factorial of valid instances") {
  const TestbedConfig cfg = LoadConfig(DataPath("configs/dbrp_testbed.json"));
  const auto tb = GenerateTestbed(cfg);
  CHECK(tb.size() == 108);
  const auto levels = Levels(tb);
  CHECK(levels.at("bowser_capacity").size() == 3);
  CHECK(levels.at("topology").size() == 6);
  CHECK(levels.at("assets_per_site").size() == 3);
  CHECK(levels.at("penalty").size() == 2);
  std::set<std::string> names;
  for (const auto& ti : tb) {
    const Instance& inst = ti.instance;
    names.insert(inst.name);
    CHECK(ValidateInstance(inst).empty());
    CHECK(inst.is_deterministic());
    CHECK(inst.horizon == cfg.horizon);
    CHECK(inst.graph.IsStronglyConnected());
    CHECK(inst.asset_count() % std::stoi(ti.factors.at("assets_per_site")) == 0);
    for (const auto& a : inst.assets) {
      CHECK(a.initial_level >= 0.0);
      CHECK(a.initial_level <= cfg.initial_fraction * a.tank_capacity + 1e-9);
      for (int t = 1; t < inst.horizon; ++t) CHECK(inst.graph.HasTransit(a.location[t - 1], a.location[t]));
    }
  }
  CHECK(names.size() == 108);
}

TEST_CASE("stochastic test bed follows the configured patterns") {
  const TestbedConfig cfg = LoadConfig(DataPath("configs/sbrp_testbed.json"));
  const auto tb = GenerateTestbed(cfg);
  CHECK(tb.size() == 108);
  const auto levels = Levels(tb);
  CHECK(levels.at("topology").size() == 6);
  CHECK(levels.at("itl").size() == 3);
  CHECK(levels.at("cp").size() == 3);
  CHECK(levels.at("penalty").size() == 2);
  const ConsumptionPattern* cp3 = nullptr;
  for (const auto& cp : cfg.patterns) {
    if (cp.label == "CP3") cp3 = &cp;
  }
  REQUIRE(cp3 != nullptr);
  for (const auto& ti : tb) {
    const Instance& inst = ti.instance;
    CHECK(ValidateInstance(inst).empty());
    CHECK_FALSE(inst.is_deterministic());
    CHECK(inst.bowser_capacity == 20.0);
    const int itl = ti.factors.at("itl").back() - '1';
    for (int a = 0; a < inst.asset_count(); ++a) {
      const AssetSpec& asset = inst.assets[a];
      CHECK(asset.tank_capacity == cfg.asset_capacity);
      CHECK(asset.initial_level == cfg.initial_levels[itl][a]);
      for (int t = 0; t < inst.horizon; ++t) {
        const DiscreteDist& d = asset.consumption_dist[t];
        CHECK(d.max_support() == cfg.truncation);
        if (ti.factors.at("cp") == "CP3") {
          // Truncated Poisson with the configured rate: the ratio of
          // consecutive masses is lambda / k.
          const double lambda = cp3->means[a][t];
          CHECK(d.pmf(1) / d.pmf(0) == doctest::Approx(lambda));
          CHECK(d.pmf(3) / d.pmf(2) == doctest::Approx(lambda / 3.0));
        }
      }
    }
  }
}

TEST_CASE("test beds are pure functions of their configuration") {
  for (const char* name : {"configs/dbrp_testbed.json", "configs/sbrp_testbed.json"}) {
    const TestbedConfig cfg = LoadConfig(DataPath(name));
    const auto a = GenerateTestbed(cfg);
    const auto b = GenerateTestbed(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(FormatInstance(a[i].instance) == FormatInstance(b[i].instance));
    TestbedConfig other = cfg;
    other.seed += 1;
    CHECK(FormatInstance(GenerateTestbed(other)[0].instance) != FormatInstance(a[0].instance));
  }
}

TEST_CASE("test beds round trip through a directory") {
  const auto tb = GenerateTestbed(LoadConfig(DataPath("configs/sbrp_testbed.json")));
  const auto dir = std::filesystem::temp_directory_path() / "bowser_testbed_roundtrip";
  std::filesystem::remove_all(dir);
  WriteTestbed(tb, dir.string());
  CHECK(std::filesystem::exists(dir / "manifest.tsv"));
  const auto back = ReadTestbed(dir.string());
  REQUIRE(back.size() == tb.size());
  for (std::size_t i = 0; i < tb.size(); ++i) {
    CHECK(back[i].factors == tb[i].factors);
    CHECK(FormatInstance(back[i].instance) == FormatInstance(tb[i].instance));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("deterministic consumption has the compound-Poisson mean of its type") {
  const TestbedConfig cfg = LoadConfig(DataPath("configs/dbrp_testbed.json"));
  const auto tb = GenerateTestbed(cfg);
  for (const AssetType& type : cfg.asset_types) {
    std::string label = type.name;
    std::replace(label.begin(), label.end(), ' ', '_');
    double sum = 0.0;
    long n = 0;
    for (const auto& ti : tb) {
      for (const auto& a : ti.instance.assets) {
        if (a.label.rfind(label + "#", 0) != 0) continue;
        for (double f : a.consumption) {
          sum += f;
          ++n;
        }
      }
    }
    REQUIRE(n > 1000);
    const double mean = type.lambda * type.jump_mean;
    const double var = type.lambda * (type.jump_mean + type.jump_mean * type.jump_mean) * cfg.buckets_per_period;
    CHECK(std::abs(sum / n - mean * cfg.buckets_per_period) <= 4.0 * std::sqrt(var / n));
  }
}

TEST_CASE("Bernoulli site graphs are strongly connected with Normal(100, 20) arcs") {
  Rng rng(5);
  double total = 0.0;
  long arcs = 0;
  for (int g = 0; g < 200; ++g) {
    const SiteGraph graph = GenerateBernoulliSiteGraph(10, 0.3, rng);
    CHECK(graph.IsStronglyConnected());
    for (const Arc& a : graph.Arcs()) {
      CHECK(a.distance >= 1.0);
      total += a.distance;
      ++arcs;
    }
  }
  // Rejection keeps only connected graphs, which have at least n arcs;
  // the mean arc count sits a little above the unconditional 27.
  CHECK(arcs / 200.0 >= 27.0);
  CHECK(arcs / 200.0 <= 32.0);
  CHECK(std::abs(total / arcs - 100.0) <= 4.0 * 20.0 / std::sqrt(static_cast<double>(arcs)));
  CHECK_THROWS_AS(GenerateBernoulliSiteGraph(1, 0.5, rng), InvalidArgumentError);
  CHECK_THROWS_AS(GenerateBernoulliSiteGraph(5, 0.0, rng), InvalidArgumentError);
}

TEST_CASE("desk-scale instances are valid and reproducible") {
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const Instance a = GenerateDeskScaleInstance(s);
    CHECK(ValidateInstance(a).empty());
    CHECK(a.bowser_end == std::optional<int>(kCistern));
    CHECK(FormatInstance(a) == FormatInstance(GenerateDeskScaleInstance(s)));
    DeskScaleOptions o;
    o.stochastic = true;
    CHECK_FALSE(GenerateDeskScaleInstance(s, o).is_deterministic());
  }
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::kMp, Method::kMpvi, Method::kHereAndNow, Method::kRecedingHorizon, Method::kSdp}) {
    CHECK(ParseMethod(MethodName(m)) == m);
  }
  CHECK(ParseMethod("MPVI") == Method::kMpvi);
  CHECK_THROWS_AS(ParseMethod("simplex"), InvalidArgumentError);
}

TEST_CASE("pivot tables average the per-instance rows") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  std::vector<KpiRow> rows;
  const std::vector<std::string> statuses{"optimal", "optimal", "gap", "timeout", "error", "skipped"};
  for (int i = 0; i < 24; ++i) {
    for (Method m : {Method::kMp, Method::kHereAndNow, Method::kSdp}) {
      KpiRow r;
      r.instance = "inst" + std::to_string(i);
      r.factors = {{"topology", i % 2 ? "B" : "A"}, {"penalty", i % 3 ? "100" : "50"}};
      r.method = m;
      r.status = statuses[rng() % statuses.size()];
      r.seconds = u(rng);
      r.nodes = std::floor(u(rng));
      r.iterations = std::floor(u(rng));
      r.objective = u(rng);
      r.gap = u(rng) / 1000.0;
      r.predicted = u(rng);
      r.simulated = u(rng);
      rows.push_back(r);
    }
  }
  const auto table = ParseTsv(FormatPivot(rows, {"topology", "penalty"}));
  REQUIRE(table.size() == 1 + 1 + 2 + 2);
  const auto& header = table[0];
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
  };
  for (std::size_t li = 1; li < table.size(); ++li) {
    const auto& line = table[li];
    const std::string factor = line[0], level = line[1];
    auto selected = [&](const KpiRow& r) { return factor == "all" || r.factors.at(factor) == level; };
    auto expect = [&](Method m, auto field, bool need_result, bool gap_only) {
      double s = 0.0;
      int n = 0;
      for (const auto& r : rows) {
        if (r.method != m || !selected(r) || r.status == "error" || r.status == "skipped") continue;
        const bool result = r.status == "optimal" || r.status == "gap";
        if (need_result && !result) continue;
        if (gap_only && r.status != "gap") continue;
        s += field(r);
        ++n;
      }
      return n == 0 ? std::nan("") : s / n;
    };
    auto matches = [](const std::string& cell, double v) {
      if (std::isnan(v)) return cell == "-";
      return std::abs(std::stod(cell) - v) <= 1e-3 * std::max(1.0, std::abs(v));
    };
    CHECK(matches(line[column("mp_seconds")], expect(Method::kMp, [](const KpiRow& r) { return r.seconds; }, false, false)));
    CHECK(matches(line[column("mp_nodes")], expect(Method::kMp, [](const KpiRow& r) { return r.nodes; }, false, false)));
    CHECK(matches(line[column("mp_objective")], expect(Method::kMp, [](const KpiRow& r) { return r.objective; }, true, false)));
    CHECK(matches(line[column("mp_mip_gap_pct")], expect(Method::kMp, [](const KpiRow& r) { return 100.0 * r.gap; }, true, true)));
    CHECK(matches(line[column("hn_simulated")], expect(Method::kHereAndNow, [](const KpiRow& r) { return r.simulated; }, true, false)));
    CHECK(matches(line[column("sdp_iterations")], expect(Method::kSdp, [](const KpiRow& r) { return r.iterations; }, false, false)));

    // Gap KPIs from the rows of both methods of the same instance.
    double s = 0.0;
    int n = 0;
    for (int i = 0; i < 24; ++i) {
      const KpiRow* hn = nullptr;
      const KpiRow* opt = nullptr;
      for (const auto& r : rows) {
        if (r.instance != "inst" + std::to_string(i) || !selected(r)) continue;
        if (r.status != "optimal" && r.status != "gap") continue;
        if (r.method == Method::kHereAndNow) hn = &r;
        if (r.method == Method::kSdp) opt = &r;
      }
      if (hn && opt) {
        s += 100.0 * (hn->simulated - opt->simulated) / opt->simulated;
        ++n;
      }
    }
    CHECK(matches(line[column("hn_gap_pct")], n ? s / n : std::nan("")));
  }
}

TEST_CASE("benchmark runs record one row per instance and skip mismatched kinds") {
  std::vector<TestbedInstance> tb;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    DeskScaleOptions o;
    o.max_nodes = 4;
    o.max_horizon = 4;
    o.max_assets = 2;
    tb.push_back({GenerateDeskScaleInstance(s, o), {{"seed", std::to_string(s)}}});
  }
  tb.push_back({bowser::testing::TinyStochastic(9), {{"seed", "stochastic"}}});
  BenchLimits limits;
  limits.replications = 20;
  limits.jobs = 2;
  const auto mp = RunBenchmark(tb, Method::kMp, limits);
  const auto vi = RunBenchmark(tb, Method::kMpvi, limits);
  REQUIRE(mp.size() == 4);
  REQUIRE(vi.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(mp[i].instance == tb[i].instance.name);
    CHECK(mp[i].status == "optimal");
    CHECK(vi[i].status == "optimal");
    CHECK(mp[i].objective == doctest::Approx(vi[i].objective));
    CHECK(vi[i].root_bound >= mp[i].root_bound - 1e-6);
  }
  CHECK(mp[3].status == "skipped");
  const auto rows = FormatRows(mp);
  CHECK(ParseTsv(rows).size() == 5);
}
