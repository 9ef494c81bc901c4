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
#include <queue>
#include <string>

#include <fmt/format.h>

#include "bowser/core.hpp"
#include "bowser/errors.hpp"

namespace bowser {
namespace {

constexpr double kNoArc = std::numeric_limits<double>::quiet_NaN();

std::vector<bool> Reach(const SiteGraph& g, bool forward) {
  const int n = g.node_count();
  std::vector<bool> seen(n, false);
  if (n == 0) return seen;
  std::queue<int> frontier;
  frontier.push(kCistern);
  seen[kCistern] = true;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      const bool linked = forward ? g.HasTransit(u, v) : g.HasTransit(v, u);
      if (linked && !seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

}  // namespace

SiteGraph::SiteGraph(int node_count)
    : node_count_(node_count),
      distance_(static_cast<std::size_t>(node_count) * node_count, kNoArc),
      successors_(node_count) {
  if (node_count < 1) throw InvalidArgumentError("site graph needs at least one node");
  for (int i = 0; i < node_count; ++i) successors_[i].push_back(i);
}

void SiteGraph::AddArc(int from, int to, double distance) {
  if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_) {
    throw InvalidArgumentError(fmt::format("arc ({},{}) references an unknown node", from + 1, to + 1));
  }
  if (from == to) {
    throw InvalidArgumentError(fmt::format("self-loop at node {} is implicit", from + 1));
  }
  if (!(distance > 0.0) || !std::isfinite(distance)) {
    throw InvalidArgumentError(fmt::format("arc ({},{}) needs a positive distance", from + 1, to + 1));
  }
  double& slot = distance_[static_cast<std::size_t>(from) * node_count_ + to];
  if (!std::isnan(slot)) {
    throw InvalidArgumentError(fmt::format("duplicate arc ({},{})", from + 1, to + 1));
  }
  slot = distance;
  auto& succ = successors_[from];
  succ.insert(std::upper_bound(succ.begin(), succ.end(), to), to);
}

bool SiteGraph::HasTransit(int from, int to) const {
  if (from == to) return true;
  return !std::isnan(distance_[static_cast<std::size_t>(from) * node_count_ + to]);
}

double SiteGraph::Distance(int from, int to) const {
  if (from == to) return 0.0;
  return distance_[static_cast<std::size_t>(from) * node_count_ + to];
}

std::vector<Arc> SiteGraph::Arcs() const {
  std::vector<Arc> arcs;
  for (int i = 0; i < node_count_; ++i) {
    for (int j = 0; j < node_count_; ++j) {
      if (i != j && HasTransit(i, j)) arcs.push_back({i, j, Distance(i, j)});
    }
  }
  return arcs;
}

std::vector<int> SiteGraph::DisconnectedNodes() const {
  const auto fwd = Reach(*this, true);
  const auto bwd = Reach(*this, false);
  std::vector<int> out;
  for (int v = 0; v < node_count_; ++v) {
    if (!fwd[v] || !bwd[v]) out.push_back(v);
  }
  return out;
}

bool SiteGraph::IsStronglyConnected() const { return DisconnectedNodes().empty(); }

bool Instance::is_deterministic() const {
  for (const auto& a : assets) {
    if (!a.has_deterministic_consumption()) return false;
  }
  return true;
}

bool Instance::has_deterministic_locations() const {
  for (const auto& a : assets) {
    if (!a.has_deterministic_location()) return false;
  }
  return true;
}

std::vector<std::string> ValidateInstance(const Instance& inst) {
  std::vector<std::string> v;
  const int n = inst.graph.node_count();
  const int horizon = inst.horizon;
  if (horizon < 1) v.push_back("horizon: must be at least 1 period");
  if (n < 1) v.push_back("graph: must have at least one node");
  if (inst.assets.empty()) v.push_back("assets: at least one asset is required");
  if (!(inst.bowser_capacity >= 0.0)) v.push_back("bowser_capacity: must be nonnegative");
  if (!(inst.bowser_initial >= 0.0) || inst.bowser_initial > inst.bowser_capacity) {
    v.push_back(fmt::format("bowser_initial: {} must lie in [0, bowser_capacity={}]",
                            inst.bowser_initial, inst.bowser_capacity));
  }
  if (!(inst.penalty > 0.0)) v.push_back("penalty: must be strictly positive");
  if (inst.bowser_start < 0 || inst.bowser_start >= n) {
    v.push_back(fmt::format("bowser_start: node {} does not exist", inst.bowser_start + 1));
  }
  if (inst.bowser_end && (*inst.bowser_end < 0 || *inst.bowser_end >= n)) {
    v.push_back(fmt::format("bowser_end: node {} does not exist", *inst.bowser_end + 1));
  }
  if (n >= 1) {
    for (int node : inst.graph.DisconnectedNodes()) {
      v.push_back(fmt::format(
          "graph: node {} is not strongly connected with the cistern (directed reachability)",
          node + 1));
    }
  }
  for (std::size_t ai = 0; ai < inst.assets.size(); ++ai) {
    const AssetSpec& a = inst.assets[ai];
    const std::string who = fmt::format("asset {}", ai + 1);
    if (!(a.tank_capacity >= 0.0)) v.push_back(who + ": tank_capacity must be nonnegative");
    if (!(a.initial_level >= 0.0) || a.initial_level > a.tank_capacity) {
      v.push_back(fmt::format("{}: initial_level s_a={} must lie in [0, c_a={}]", who,
                              a.initial_level, a.tank_capacity));
    }
    const bool det_loc = !a.location.empty();
    const bool sto_loc = !a.location_pmf.empty();
    if (det_loc == sto_loc) {
      v.push_back(who + ": exactly one of deterministic location or location pmf must be set");
    }
    if (det_loc) {
      if (static_cast<int>(a.location.size()) != horizon) {
        v.push_back(fmt::format("{}: location has {} entries, expected {}", who, a.location.size(), horizon));
      }
      for (std::size_t t = 0; t < a.location.size(); ++t) {
        if (a.location[t] < 0 || a.location[t] >= n) {
          v.push_back(fmt::format("{}: location at period {} is not a valid node", who, t + 1));
        }
      }
    }
    if (sto_loc) {
      if (static_cast<int>(a.location_pmf.size()) != horizon) {
        v.push_back(fmt::format("{}: location pmf has {} periods, expected {}", who,
                                a.location_pmf.size(), horizon));
      }
      for (std::size_t t = 0; t < a.location_pmf.size(); ++t) {
        const auto& pmf = a.location_pmf[t];
        double total = 0.0;
        bool negative = false;
        for (double p : pmf) {
          total += p;
          negative = negative || !(p >= 0.0);
        }
        if (static_cast<int>(pmf.size()) != n || negative || std::abs(total - 1.0) > 1e-9) {
          v.push_back(fmt::format("{}: location pmf at period {} must have {} nonnegative entries summing to 1",
                                  who, t + 1, n));
        }
      }
    }
    const bool det_f = !a.consumption.empty();
    const bool sto_f = !a.consumption_dist.empty();
    if (det_f == sto_f) {
      v.push_back(who + ": exactly one of deterministic or distributional consumption must be set");
    }
    if (det_f) {
      if (static_cast<int>(a.consumption.size()) != horizon) {
        v.push_back(fmt::format("{}: consumption has {} entries, expected {}", who, a.consumption.size(), horizon));
      }
      for (std::size_t t = 0; t < a.consumption.size(); ++t) {
        if (!(a.consumption[t] >= 0.0)) {
          v.push_back(fmt::format("{}: consumption at period {} must be nonnegative", who, t + 1));
        }
      }
    }
    if (sto_f && static_cast<int>(a.consumption_dist.size()) != horizon) {
      v.push_back(fmt::format("{}: consumption distributions cover {} periods, expected {}", who,
                              a.consumption_dist.size(), horizon));
    }
  }
  return v;
}

double CumulativeConsumption(const AssetSpec& asset, int t) {
  double s = 0.0;
  for (int k = 0; k <= t && k < static_cast<int>(asset.consumption.size()); ++k) s += asset.consumption[k];
  return s;
}

std::vector<double> MeanConsumption(const AssetSpec& asset) {
  if (asset.has_deterministic_consumption()) return asset.consumption;
  std::vector<double> out;
  out.reserve(asset.consumption_dist.size());
  for (const auto& d : asset.consumption_dist) out.push_back(d.mean());
  return out;
}

std::vector<DiscreteDist> ConsumptionDistributions(const AssetSpec& asset) {
  if (!asset.has_deterministic_consumption()) return asset.consumption_dist;
  std::vector<DiscreteDist> out;
  out.reserve(asset.consumption.size());
  for (double f : asset.consumption) {
    const double r = std::round(f);
    if (std::abs(f - r) > 1e-9) {
      throw InvalidArgumentError(fmt::format("consumption {} is not integral; cannot form a point mass", f));
    }
    out.push_back(DiscreteDist::PointMass(static_cast<int>(r)));
  }
  return out;
}

Instance WithPointMassConsumption(const Instance& inst) {
  Instance out = inst;
  for (auto& a : out.assets) {
    if (!a.has_deterministic_consumption()) {
      throw ModelKindError("point-mass conversion requires deterministic consumption");
    }
    a.consumption_dist = ConsumptionDistributions(a);
    a.consumption.clear();
  }
  return out;
}

}  // namespace bowser
