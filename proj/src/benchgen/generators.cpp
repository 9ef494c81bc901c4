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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "bowser/benchgen.hpp"
#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "bowser/rng.hpp"
#include "bowser/stochproc.hpp"

namespace bowser::benchgen {
namespace {

constexpr int kMaxGraphAttempts = 1000000;
constexpr double kArcMean = 100.0;
constexpr double kArcSd = 20.0;
constexpr std::uint64_t kTopologyStream = 1'000'000;
constexpr const char* kManifest = "manifest.tsv";

using nlohmann::json;

// Poisson draw by inversion; fine for the small rates used here.
int SamplePoisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  const double u = rng.Uniform();
  int k = 0;
  double p = std::exp(-mean);
  double cdf = p;
  while (u > cdf && k < 10000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

int SampleCompoundPoisson(double lambda, double jump_mean, Rng& rng) {
  const int events = SamplePoisson(lambda, rng);
  int total = 0;
  for (int e = 0; e < events; ++e) total += SamplePoisson(jump_mean, rng);
  return total;
}

double ArcLength(Rng& rng) { return std::max(1.0, std::round(rng.Normal(kArcMean, kArcSd))); }

// Joins independent site graphs: site s occupies nodes s*n .. s*n+n-1 and
// the first node of each site (its gate) is linked both ways to the next
// site's gate. The cistern is the first site's gate.
SiteGraph BuildTopology(const TopologySpec& spec, Rng& rng) {
  if (spec.sites < 1) throw InvalidArgumentError("a topology needs at least one site");
  const int n = spec.nodes_per_site;
  SiteGraph g(spec.sites * n);
  for (int s = 0; s < spec.sites; ++s) {
    const SiteGraph site = GenerateBernoulliSiteGraph(n, spec.edge_probability, rng);
    for (const Arc& arc : site.Arcs()) g.AddArc(s * n + arc.from, s * n + arc.to, arc.distance);
  }
  for (int s = 0; s + 1 < spec.sites; ++s) {
    g.AddArc(s * n, (s + 1) * n, ArcLength(rng));
    g.AddArc((s + 1) * n, s * n, ArcLength(rng));
  }
  return g;
}

// Random walk restricted to the nodes of one site.
std::vector<int> RandomWalk(const SiteGraph& g, int first, int last, int horizon, double stay, Rng& rng) {
  std::vector<int> walk;
  int node = first + rng.Index(last - first + 1);
  for (int t = 0; t < horizon; ++t) {
    if (t > 0 && !rng.Bernoulli(stay)) {
      std::vector<int> options;
      for (int j : g.Successors(node)) {
        if (j != node && j >= first && j <= last) options.push_back(j);
      }
      if (!options.empty()) node = options[rng.Index(static_cast<int>(options.size()))];
    }
    walk.push_back(node);
  }
  return walk;
}

std::string NumberLabel(double v) { return fmt::format("{}", v); }

std::vector<SiteGraph> BuildTopologies(const TestbedConfig& cfg) {
  std::vector<SiteGraph> graphs;
  for (std::size_t k = 0; k < cfg.topologies.size(); ++k) {
    Rng rng(DeriveSeed(cfg.seed, kTopologyStream + k));
    graphs.push_back(BuildTopology(cfg.topologies[k], rng));
  }
  return graphs;
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgumentError(fmt::format("testbed config lacks '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgumentError(fmt::format("testbed config field '{}': {}", key, e.what()));
  }
}

template <typename T>
T Optional(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgumentError(fmt::format("testbed config field '{}': {}", key, e.what()));
  }
}

void RequireNonEmpty(bool nonempty, const char* what) {
  if (!nonempty) throw InvalidArgumentError(fmt::format("testbed config: '{}' must list at least one level", what));
}

}  // namespace

double Rng::Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::Normal(double mean, double sd) {
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::Index(int n) { return std::min(n - 1, static_cast<int>(Uniform() * n)); }

SiteGraph GenerateBernoulliSiteGraph(int n, double p_edge, Rng& rng) {
  if (n < 2) throw InvalidArgumentError(fmt::format("a site graph needs at least 2 nodes, got {}", n));
  if (!(p_edge > 0.0 && p_edge < 1.0)) {
    throw InvalidArgumentError(fmt::format("edge probability must lie in (0, 1), got {}", p_edge));
  }
  for (int attempt = 0; attempt < kMaxGraphAttempts; ++attempt) {
    SiteGraph g(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && rng.Bernoulli(p_edge)) g.AddArc(i, j, ArcLength(rng));
      }
    }
    if (g.IsStronglyConnected()) return g;
  }
  throw InvalidArgumentError(fmt::format(
      "no strongly connected graph on {} nodes after {} attempts; use a larger edge probability than {}", n,
      kMaxGraphAttempts, p_edge));
}

std::string KindName(Kind k) { return k == Kind::kDbrp ? "DBRP" : "SBRP"; }

TestbedConfig ParseConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("testbed config: ") + e.what(), 0);
  }
  TestbedConfig cfg;
  const std::string kind = Required<std::string>(j, "kind");
  if (kind == "DBRP" || kind == "dbrp") {
    cfg.kind = Kind::kDbrp;
  } else if (kind == "SBRP" || kind == "sbrp") {
    cfg.kind = Kind::kSbrp;
  } else {
    throw InvalidArgumentError("testbed config: kind must be DBRP or SBRP, got " + kind);
  }
  cfg.horizon = Required<int>(j, "horizon");
  cfg.bowser_capacities = Required<std::vector<double>>(j, "bowser_capacities");
  cfg.bowser_initial = Optional<double>(j, "bowser_initial", 0.0);
  cfg.penalties = Required<std::vector<double>>(j, "penalties");
  cfg.seed = Required<std::uint64_t>(j, "seed");
  cfg.stay_probability = Optional<double>(j, "stay_probability", 0.5);
  for (const auto& t : Required<json>(j, "topologies")) {
    TopologySpec spec;
    spec.label = Required<std::string>(t, "label");
    spec.sites = Optional<int>(t, "sites", 1);
    spec.nodes_per_site = Required<int>(t, "nodes_per_site");
    spec.edge_probability = Required<double>(t, "edge_probability");
    cfg.topologies.push_back(spec);
  }
  if (cfg.horizon < 1) throw InvalidArgumentError("testbed config: horizon must be positive");
  RequireNonEmpty(!cfg.bowser_capacities.empty(), "bowser_capacities");
  RequireNonEmpty(!cfg.penalties.empty(), "penalties");
  RequireNonEmpty(!cfg.topologies.empty(), "topologies");

  if (cfg.kind == Kind::kDbrp) {
    cfg.assets_per_site = Required<std::vector<int>>(j, "assets_per_site");
    for (const auto& a : Required<json>(j, "asset_types")) {
      AssetType type;
      type.name = Required<std::string>(a, "name");
      type.tank = Required<double>(a, "tank");
      type.lambda = Required<double>(a, "lambda");
      type.jump_mean = Required<double>(a, "jump_mean");
      cfg.asset_types.push_back(type);
    }
    cfg.initial_fraction = Optional<double>(j, "initial_fraction", 0.2);
    cfg.buckets_per_period = Optional<int>(j, "buckets_per_period", 1);
    RequireNonEmpty(!cfg.assets_per_site.empty(), "assets_per_site");
    RequireNonEmpty(!cfg.asset_types.empty(), "asset_types");
    if (cfg.buckets_per_period < 1) throw InvalidArgumentError("testbed config: buckets_per_period must be positive");
  } else {
    cfg.asset_capacity = Required<double>(j, "asset_capacity");
    cfg.initial_levels = Required<std::vector<std::vector<double>>>(j, "initial_levels");
    cfg.truncation = Optional<int>(j, "truncation", 7);
    for (const auto& p : Required<json>(j, "patterns")) {
      ConsumptionPattern cp;
      cp.label = Required<std::string>(p, "label");
      cp.means = Required<std::vector<std::vector<double>>>(p, "means");
      cfg.patterns.push_back(cp);
    }
    RequireNonEmpty(!cfg.initial_levels.empty(), "initial_levels");
    RequireNonEmpty(!cfg.patterns.empty(), "patterns");
    const std::size_t assets = cfg.initial_levels.front().size();
    for (const auto& itl : cfg.initial_levels) {
      if (itl.size() != assets) throw InvalidArgumentError("testbed config: initial_levels rows differ in length");
    }
    for (const auto& cp : cfg.patterns) {
      if (cp.means.size() != assets) {
        throw InvalidArgumentError("testbed config: pattern " + cp.label + " does not list every asset");
      }
      for (const auto& row : cp.means) {
        // A single value means a constant rate over the horizon.
        if (row.size() != 1 && static_cast<int>(row.size()) != cfg.horizon) {
          throw InvalidArgumentError("testbed config: pattern " + cp.label + " needs 1 or horizon values per asset");
        }
      }
    }
  }
  return cfg;
}

TestbedConfig LoadConfig(const std::string& path) { return ParseConfig(ReadFile(path)); }

std::vector<TestbedInstance> GenerateDbrpTestbed(const TestbedConfig& cfg) {
  if (cfg.kind != Kind::kDbrp) throw InvalidArgumentError("configuration is not a DBRP test bed");
  const std::vector<SiteGraph> graphs = BuildTopologies(cfg);
  std::vector<TestbedInstance> out;
  std::uint64_t index = 0;
  for (double cb : cfg.bowser_capacities) {
    for (std::size_t k = 0; k < cfg.topologies.size(); ++k) {
      const TopologySpec& topo = cfg.topologies[k];
      for (int per_site : cfg.assets_per_site) {
        for (double p : cfg.penalties) {
          Rng rng(DeriveSeed(cfg.seed, ++index));
          TestbedInstance ti;
          Instance& inst = ti.instance;
          inst.name = fmt::format("dbrp_{}_cb{}_a{}_p{}", topo.label, NumberLabel(cb), per_site, NumberLabel(p));
          inst.horizon = cfg.horizon;
          inst.graph = graphs[k];
          inst.bowser_capacity = cb;
          inst.bowser_initial = std::min(cfg.bowser_initial, cb);
          inst.penalty = p;
          inst.bowser_start = kCistern;
          for (int s = 0; s < topo.sites; ++s) {
            for (int m = 0; m < per_site; ++m) {
              const AssetType& type = cfg.asset_types[rng.Index(static_cast<int>(cfg.asset_types.size()))];
              AssetSpec asset;
              std::string label = type.name;
              std::replace(label.begin(), label.end(), ' ', '_');
              asset.label = fmt::format("{}#{}", label, inst.asset_count() + 1);
              asset.tank_capacity = type.tank;
              asset.initial_level = std::round(rng.Uniform() * cfg.initial_fraction * type.tank * 100.0) / 100.0;
              const int first = s * topo.nodes_per_site;
              asset.location =
                  RandomWalk(inst.graph, first, first + topo.nodes_per_site - 1, cfg.horizon, cfg.stay_probability, rng);
              for (int t = 0; t < cfg.horizon; ++t) {
                int f = 0;
                for (int b = 0; b < cfg.buckets_per_period; ++b) f += SampleCompoundPoisson(type.lambda, type.jump_mean, rng);
                asset.consumption.push_back(f);
              }
              inst.assets.push_back(std::move(asset));
            }
          }
          ti.factors = {{"kind", "DBRP"},
                        {"bowser_capacity", NumberLabel(cb)},
                        {"topology", topo.label},
                        {"assets_per_site", std::to_string(per_site)},
                        {"penalty", NumberLabel(p)}};
          out.push_back(std::move(ti));
        }
      }
    }
  }
  return out;
}

std::vector<TestbedInstance> GenerateSbrpTestbed(const TestbedConfig& cfg) {
  if (cfg.kind != Kind::kSbrp) throw InvalidArgumentError("configuration is not an SBRP test bed");
  const std::vector<SiteGraph> graphs = BuildTopologies(cfg);
  const int assets = static_cast<int>(cfg.initial_levels.front().size());
  std::vector<TestbedInstance> out;
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < cfg.topologies.size(); ++k) {
    const TopologySpec& topo = cfg.topologies[k];
    // Asset trajectories belong to the topology, so that instances differing
    // only in ITL, CP or penalty share them.
    Rng walk_rng(DeriveSeed(cfg.seed, kTopologyStream * 2 + k));
    std::vector<std::vector<int>> walks;
    for (int a = 0; a < assets; ++a) {
      const int nodes = graphs[k].node_count();
      walks.push_back(RandomWalk(graphs[k], 0, nodes - 1, cfg.horizon, cfg.stay_probability, walk_rng));
    }
    for (std::size_t itl = 0; itl < cfg.initial_levels.size(); ++itl) {
      for (const ConsumptionPattern& cp : cfg.patterns) {
        for (double p : cfg.penalties) {
          ++index;
          TestbedInstance ti;
          Instance& inst = ti.instance;
          inst.name = fmt::format("sbrp_{}_itl{}_{}_p{}", topo.label, itl + 1, cp.label, NumberLabel(p));
          inst.horizon = cfg.horizon;
          inst.graph = graphs[k];
          inst.bowser_capacity = cfg.bowser_capacities.front();
          inst.bowser_initial = std::min(cfg.bowser_initial, inst.bowser_capacity);
          inst.penalty = p;
          inst.bowser_start = kCistern;
          for (int a = 0; a < assets; ++a) {
            AssetSpec asset;
            asset.label = fmt::format("asset{}", a + 1);
            asset.tank_capacity = cfg.asset_capacity;
            asset.initial_level = cfg.initial_levels[itl][a];
            asset.location = walks[a];
            for (int t = 0; t < cfg.horizon; ++t) {
              const auto& row = cp.means[a];
              const double mean = row.size() == 1 ? row[0] : row[t];
              asset.consumption_dist.push_back(stochproc::TruncatedPoisson(mean, cfg.truncation));
            }
            inst.assets.push_back(std::move(asset));
          }
          ti.factors = {{"kind", "SBRP"},
                        {"topology", topo.label},
                        {"itl", fmt::format("ITL{}", itl + 1)},
                        {"cp", cp.label},
                        {"penalty", NumberLabel(p)}};
          out.push_back(std::move(ti));
        }
      }
    }
  }
  return out;
}

std::vector<TestbedInstance> GenerateTestbed(const TestbedConfig& cfg) {
  return cfg.kind == Kind::kDbrp ? GenerateDbrpTestbed(cfg) : GenerateSbrpTestbed(cfg);
}

void WriteTestbed(const std::vector<TestbedInstance>& testbed, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> keys;
  for (const auto& ti : testbed) {
    for (const auto& [k, v] : ti.factors) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::string manifest = "file";
  for (const auto& k : keys) manifest += "\t" + k;
  manifest += "\n";
  for (const auto& ti : testbed) {
    const std::string file = ti.instance.name + ".inst";
    WriteFile((std::filesystem::path(dir) / file).string(), FormatInstance(ti.instance));
    manifest += file;
    for (const auto& k : keys) {
      const auto it = ti.factors.find(k);
      manifest += "\t" + (it == ti.factors.end() ? std::string("-") : it->second);
    }
    manifest += "\n";
  }
  WriteFile((std::filesystem::path(dir) / kManifest).string(), manifest);
}

std::vector<TestbedInstance> ReadTestbed(const std::string& dir) {
  const std::filesystem::path root(dir);
  std::vector<TestbedInstance> out;
  const std::filesystem::path manifest = root / kManifest;
  if (!std::filesystem::exists(manifest)) {
    // Plain directory of instance files: no factors.
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(root)) {
      if (e.path().extension() == ".inst") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({LoadInstance(f.string()), {}});
    return out;
  }
  std::istringstream in(ReadFile(manifest.string()));
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    return cells;
  };
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) throw ParseError("manifest row has the wrong number of columns", number);
    TestbedInstance ti;
    ti.instance = LoadInstance((root / cells[0]).string());
    for (std::size_t c = 1; c < cells.size(); ++c) ti.factors[header[c]] = cells[c];
    out.push_back(std::move(ti));
  }
  return out;
}

Instance GenerateDeskScaleInstance(std::uint64_t seed, const DeskScaleOptions& o) {
  Rng rng(seed);
  auto pick = [&](int lo, int hi) { return lo + rng.Index(hi - lo + 1); };
  Instance inst;
  const int n = pick(o.min_nodes, o.max_nodes);
  inst.name = fmt::format("desk_{}", seed);
  inst.horizon = pick(o.min_horizon, o.max_horizon);
  inst.graph = GenerateBernoulliSiteGraph(n, o.edge_probability, rng);
  inst.bowser_capacity = 10.0 * pick(3, 12);
  inst.bowser_initial = pick(0, 10);
  inst.penalty = 10.0 * pick(5, 20);
  inst.bowser_start = kCistern;
  inst.bowser_end = kCistern;
  const int assets = pick(o.min_assets, o.max_assets);
  for (int a = 0; a < assets; ++a) {
    AssetSpec asset;
    asset.label = fmt::format("asset{}", a + 1);
    asset.tank_capacity = pick(8, 20);
    asset.initial_level = pick(0, static_cast<int>(asset.tank_capacity) / 2);
    asset.location = RandomWalk(inst.graph, 0, n - 1, inst.horizon, 0.5, rng);
    for (int t = 0; t < inst.horizon; ++t) {
      const int f = pick(0, 5);
      if (o.stochastic) {
        asset.consumption_dist.push_back(PoissonDist(std::max(f, 1)));
      } else {
        asset.consumption.push_back(f);
      }
    }
    inst.assets.push_back(std::move(asset));
  }
  return inst;
}

}  // namespace bowser::benchgen
