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

#include "bowser/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/rng.hpp"

namespace bowser::sdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int RequireIntegral(double v, const std::string& what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 0.0) {
    throw InvalidArgumentError(fmt::format("{} = {} is not a nonnegative integer; the dynamic program needs "
                                           "integer fuel grids",
                                           what, v));
  }
  return static_cast<int>(r);
}

}  // namespace

// Dimensions and key encoding shared by the solver and the policy.
struct Policy::Impl {
  int horizon = 0;
  int nodes = 0;
  int assets = 0;
  int bowser_capacity = 0;
  bool stochastic_locations = false;
  std::vector<int> capacity;                  // per asset
  std::vector<std::vector<int>> known_nodes;  // [a][t] when locations are known
  std::uint64_t level_space = 1;              // prod (c_a + 1)
  std::uint64_t node_space = 1;               // nodes^assets or 1

  struct Table {
    std::vector<std::uint64_t> keys;  // sorted
    std::vector<double> values;
    std::vector<int> refill;
    std::vector<int> next;
    std::vector<int> refuels;  // assets per entry
  };
  std::vector<Table> tables;  // per period

  std::uint64_t PostKey(int b, int node, const std::vector<int>& levels) const {
    std::uint64_t k = static_cast<std::uint64_t>(b) * nodes + node;
    std::uint64_t m = 0;
    for (int a = 0; a < assets; ++a) m = m * (capacity[a] + 1) + levels[a];
    return k * level_space + m;
  }
  std::uint64_t Key(std::uint64_t post, const std::vector<int>& asset_nodes) const {
    std::uint64_t l = 0;
    if (stochastic_locations) {
      for (int a = 0; a < assets; ++a) l = l * nodes + asset_nodes[a];
    }
    return post * node_space + l;
  }
  State Decode(int t, std::uint64_t key) const {
    State s;
    s.period = t;
    s.asset_levels.assign(assets, 0);
    s.asset_nodes.assign(assets, 0);
    std::uint64_t l = key % node_space;
    std::uint64_t post = key / node_space;
    for (int a = assets - 1; a >= 0; --a) {
      if (stochastic_locations) {
        s.asset_nodes[a] = static_cast<int>(l % nodes);
        l /= nodes;
      } else {
        s.asset_nodes[a] = known_nodes[a][t];
      }
    }
    std::uint64_t m = post % level_space;
    std::uint64_t bn = post / level_space;
    for (int a = assets - 1; a >= 0; --a) {
      s.asset_levels[a] = static_cast<int>(m % (capacity[a] + 1));
      m /= capacity[a] + 1;
    }
    s.bowser_node = static_cast<int>(bn % nodes);
    s.bowser_level = static_cast<int>(bn / nodes);
    return s;
  }
};

Policy::Policy() : impl_(std::make_shared<Impl>()) {}
Policy::~Policy() = default;
Policy::Policy(const Policy&) = default;
Policy& Policy::operator=(const Policy&) = default;
Policy::Policy(Policy&&) noexcept = default;
Policy& Policy::operator=(Policy&&) noexcept = default;
Policy::Policy(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int Policy::horizon() const { return impl_->horizon; }
bool Policy::stochastic_locations() const { return impl_->stochastic_locations; }

long long Policy::size() const {
  long long n = 0;
  for (const auto& t : impl_->tables) n += static_cast<long long>(t.keys.size());
  return n;
}

std::optional<Policy::Entry> Policy::Lookup(const State& s) const {
  const Impl& im = *impl_;
  if (s.period < 0 || s.period >= im.horizon) return std::nullopt;
  if (static_cast<int>(s.asset_levels.size()) != im.assets) return std::nullopt;
  if (im.stochastic_locations && static_cast<int>(s.asset_nodes.size()) != im.assets) return std::nullopt;
  if (s.bowser_level < 0 || s.bowser_level > im.bowser_capacity || s.bowser_node < 0 || s.bowser_node >= im.nodes) {
    return std::nullopt;
  }
  for (int a = 0; a < im.assets; ++a) {
    if (s.asset_levels[a] < 0 || s.asset_levels[a] > im.capacity[a]) return std::nullopt;
    if (im.stochastic_locations && (s.asset_nodes[a] < 0 || s.asset_nodes[a] >= im.nodes)) return std::nullopt;
  }
  const auto& table = im.tables[s.period];
  const std::uint64_t key = im.Key(im.PostKey(s.bowser_level, s.bowser_node, s.asset_levels), s.asset_nodes);
  const auto it = std::lower_bound(table.keys.begin(), table.keys.end(), key);
  if (it == table.keys.end() || *it != key) return std::nullopt;
  const std::size_t i = static_cast<std::size_t>(it - table.keys.begin());
  Entry e;
  e.value = table.values[i];
  e.action.bowser_refill = table.refill[i];
  e.action.next_node = table.next[i];
  e.action.refuels.assign(table.refuels.begin() + static_cast<std::ptrdiff_t>(i * im.assets),
                          table.refuels.begin() + static_cast<std::ptrdiff_t>((i + 1) * im.assets));
  return e;
}

std::vector<std::pair<State, Policy::Entry>> Policy::Entries(int period) const {
  const Impl& im = *impl_;
  if (period < 0 || period >= im.horizon) throw InvalidArgumentError(fmt::format("period {} out of range", period));
  std::vector<std::pair<State, Entry>> out;
  const auto& table = im.tables[period];
  for (std::size_t i = 0; i < table.keys.size(); ++i) {
    Entry e;
    e.value = table.values[i];
    e.action.bowser_refill = table.refill[i];
    e.action.next_node = table.next[i];
    e.action.refuels.assign(table.refuels.begin() + static_cast<std::ptrdiff_t>(i * im.assets),
                            table.refuels.begin() + static_cast<std::ptrdiff_t>((i + 1) * im.assets));
    out.emplace_back(im.Decode(period, table.keys[i]), std::move(e));
  }
  return out;
}

std::string VariantName(Variant v) {
  switch (v) {
    case Variant::kStochasticFuel:
      return "fuel";
    case Variant::kStochasticLocation:
      return "location";
    case Variant::kDeterministic:
      return "deterministic";
  }
  return "?";
}

Variant ParseVariant(const std::string& name) {
  if (name == "fuel") return Variant::kStochasticFuel;
  if (name == "location") return Variant::kStochasticLocation;
  if (name == "deterministic") return Variant::kDeterministic;
  throw InvalidArgumentError("unknown dynamic-program variant '" + name + "' (expected fuel, location or deterministic)");
}

class Solver {
 public:
  Solver(const Instance& inst, Variant variant, const Options& options)
      : inst_(inst), variant_(variant), options_(options), impl_(std::make_shared<Policy::Impl>()) {}

  Result Run();

 private:
  using Impl = Policy::Impl;

  void Prepare();
  // Calls fn(refill, next, refuels) for every admissible action of a state
  // in lexicographic order of (refill, next node, refuels).
  template <typename Fn>
  void ForEachAction(int t, int b, int node, const std::vector<int>& levels, const std::vector<int>& asset_nodes,
                     Fn&& fn) const;
  std::vector<int> RefuelCandidates(int t, int a, int level, int room) const;
  void Forward();
  void Backward();

  const Instance& inst_;
  Variant variant_;
  Options options_;
  std::shared_ptr<Impl> impl_;

  int bowser_initial_ = 0;
  std::vector<int> initial_levels_;
  std::vector<std::vector<std::vector<double>>> consumption_;  // [a][t][f]
  std::vector<std::vector<std::vector<double>>> shortage_;     // [a][t][y] expected shortage
  std::vector<std::vector<std::vector<double>>> location_;     // [a][t][node]
  std::vector<std::vector<int>> demand_bound_;                 // [a][t] max remaining consumption
  std::vector<std::vector<std::uint64_t>> reach_;              // sorted keys per period
  std::vector<std::vector<std::uint64_t>> post_;               // sorted post keys per period
  long long pairs_ = 0;
};

void Solver::Prepare() {
  const Instance& inst = inst_;
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) throw InvalidArgumentError("invalid instance: " + violations.front());
  Impl& im = *impl_;
  im.horizon = inst.horizon;
  im.nodes = inst.graph.node_count();
  im.assets = inst.asset_count();
  im.bowser_capacity = RequireIntegral(inst.bowser_capacity, "bowser capacity");
  bowser_initial_ = RequireIntegral(inst.bowser_initial, "bowser initial level");

  switch (variant_) {
    case Variant::kDeterministic:
      if (!inst.is_deterministic() || !inst.has_deterministic_locations()) {
        throw ModelKindError("the deterministic variant needs known consumption and locations");
      }
      break;
    case Variant::kStochasticFuel:
      if (!inst.has_deterministic_locations()) {
        throw ModelKindError("the fuel variant needs known asset locations; use the location variant");
      }
      break;
    case Variant::kStochasticLocation:
      if (inst.has_deterministic_locations()) {
        throw ModelKindError("the location variant needs asset location distributions");
      }
      break;
  }
  im.stochastic_locations = variant_ == Variant::kStochasticLocation;

  const int horizon = inst.horizon;
  consumption_.resize(im.assets);
  shortage_.resize(im.assets);
  location_.resize(im.assets);
  demand_bound_.resize(im.assets);
  im.known_nodes.resize(im.assets);
  for (int a = 0; a < im.assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    const std::string who = asset.label.empty() ? fmt::format("asset {}", a + 1) : asset.label;
    im.capacity.push_back(RequireIntegral(asset.tank_capacity, who + " tank capacity"));
    initial_levels_.push_back(RequireIntegral(asset.initial_level, who + " initial level"));
    im.level_space *= static_cast<std::uint64_t>(im.capacity[a] + 1);
    if (im.stochastic_locations) im.node_space *= static_cast<std::uint64_t>(im.nodes);

    std::vector<DiscreteDist> dists;
    try {
      dists = ConsumptionDistributions(asset);
    } catch (const InvalidArgumentError&) {
      throw InvalidArgumentError(who + " has non-integral consumption; the dynamic program needs integer fuel grids");
    }
    demand_bound_[a].assign(horizon + 1, 0);
    for (int t = horizon - 1; t >= 0; --t) demand_bound_[a][t] = demand_bound_[a][t + 1] + dists[t].max_support();
    for (int t = 0; t < horizon; ++t) {
      consumption_[a].push_back(dists[t].probabilities());
      std::vector<double> es(im.capacity[a] + 1, 0.0);
      for (int y = 0; y <= im.capacity[a]; ++y) {
        const auto& p = consumption_[a][t];
        for (std::size_t f = static_cast<std::size_t>(y) + 1; f < p.size(); ++f) es[y] += p[f] * (f - y);
      }
      shortage_[a].push_back(std::move(es));
      std::vector<double> where(im.nodes, 0.0);
      if (asset.has_deterministic_location()) {
        where[asset.location[t]] = 1.0;
        im.known_nodes[a].push_back(asset.location[t]);
      } else {
        where = asset.location_pmf[t];
        im.known_nodes[a].push_back(-1);
      }
      location_[a].push_back(std::move(where));
    }
  }
  const double dense = static_cast<double>(im.bowser_capacity + 1) * im.nodes * static_cast<double>(im.level_space) *
                       static_cast<double>(im.node_space);
  if (dense > options_.budget) {
    throw BudgetExceededError(
        fmt::format("state space of {:.0f} states per period exceeds the budget of {:.0f}", dense, options_.budget),
        dense);
  }
}

std::vector<int> Solver::RefuelCandidates(int t, int a, int level, int room) const {
  std::vector<int> c;
  const int fill = impl_->capacity[a] - level;
  const int hi = std::min(fill, room);
  if (!options_.reduced_actions) {
    for (int q = 0; q <= hi; ++q) c.push_back(q);
    return c;
  }
  c = {0, hi, std::min(hi, std::max(0, demand_bound_[a][t] - level))};
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

template <typename Fn>
void Solver::ForEachAction(int t, int b, int node, const std::vector<int>& levels,
                           const std::vector<int>& asset_nodes, Fn&& fn) const {
  const Impl& im = *impl_;
  const bool last = t == im.horizon - 1;
  std::vector<int> refills;
  if (node == kCistern) {
    if (options_.reduced_actions) {
      refills = {0};
      if (im.bowser_capacity > b) refills.push_back(im.bowser_capacity - b);
    } else {
      for (int r = 0; r <= im.bowser_capacity - b; ++r) refills.push_back(r);
    }
  } else {
    refills = {0};
  }
  std::vector<int> moves;
  if (last) {
    moves = {node};
  } else {
    moves = inst_.graph.Successors(node);
  }
  std::vector<int> refuels(im.assets, 0);
  for (int r : refills) {
    for (int next : moves) {
      // Depth-first over assets yields refuel vectors in lexicographic order.
      auto rec = [&](auto&& self, int a, int room) -> void {
        if (a == im.assets) {
          fn(r, next, refuels);
          return;
        }
        if (asset_nodes[a] != node) {
          refuels[a] = 0;
          self(self, a + 1, room);
          return;
        }
        for (int q : RefuelCandidates(t, a, levels[a], room)) {
          refuels[a] = q;
          self(self, a + 1, room - q);
        }
        refuels[a] = 0;
      };
      rec(rec, 0, b + r);
    }
  }
}

void Solver::Forward() {
  Impl& im = *impl_;
  const int horizon = im.horizon;
  reach_.assign(horizon, {});
  post_.assign(horizon, {});

  // Initial states: every combination of first-period asset nodes.
  auto for_each_nodes = [&](int t, auto&& fn) {
    std::vector<int> nodes(im.assets, 0);
    auto rec = [&](auto&& self, int a, double prob) -> void {
      if (a == im.assets) {
        fn(nodes, prob);
        return;
      }
      for (int i = 0; i < im.nodes; ++i) {
        const double p = location_[a][t][i];
        if (p <= 0.0) continue;
        nodes[a] = i;
        self(self, a + 1, prob * p);
      }
    };
    rec(rec, 0, 1.0);
  };
  {
    const std::uint64_t post = im.PostKey(bowser_initial_, inst_.bowser_start, initial_levels_);
    for_each_nodes(0, [&](const std::vector<int>& nodes, double) { reach_[0].push_back(im.Key(post, nodes)); });
    std::sort(reach_[0].begin(), reach_[0].end());
  }

  for (int t = 0; t < horizon; ++t) {
    std::vector<std::uint64_t> posts;
    for (std::uint64_t key : reach_[t]) {
      const State s = im.Decode(t, key);
      std::vector<int> y(im.assets);
      ForEachAction(t, s.bowser_level, s.bowser_node, s.asset_levels, s.asset_nodes,
                    [&](int r, int next, const std::vector<int>& q) {
                      ++pairs_;
                      int b = s.bowser_level + r;
                      for (int a = 0; a < im.assets; ++a) {
                        y[a] = s.asset_levels[a] + q[a];
                        b -= q[a];
                      }
                      posts.push_back(im.PostKey(b, next, y));
                    });
      if (static_cast<double>(pairs_) > options_.budget) {
        throw BudgetExceededError(fmt::format(
            "state-action pairs exceed the budget of {:.0f}: {} counted by period {}", options_.budget, pairs_, t + 1),
            static_cast<double>(pairs_));
      }
    }
    std::sort(posts.begin(), posts.end());
    posts.erase(std::unique(posts.begin(), posts.end()), posts.end());
    post_[t] = std::move(posts);
    if (t + 1 == horizon) break;

    // Successor states: lost-sales consumption and next-period asset nodes.
    std::vector<std::uint64_t> next;
    std::vector<int> levels(im.assets);
    for (std::uint64_t pk : post_[t]) {
      const State ps = im.Decode(t, pk * im.node_space);
      auto rec = [&](auto&& self, int a) -> void {
        if (a == im.assets) {
          const std::uint64_t post = im.PostKey(ps.bowser_level, ps.bowser_node, levels);
          for_each_nodes(t + 1, [&](const std::vector<int>& nodes, double) { next.push_back(im.Key(post, nodes)); });
          return;
        }
        const auto& p = consumption_[a][t];
        const int y = ps.asset_levels[a];
        for (int j = 0; j <= y; ++j) {
          const int f = y - j;
          const bool possible = j > 0 ? (f < static_cast<int>(p.size()) && p[f] > 0.0)
                                      : std::any_of(p.begin() + std::min<std::size_t>(y, p.size()), p.end(),
                                                    [](double v) { return v > 0.0; });
          if (!possible) continue;
          levels[a] = j;
          self(self, a + 1);
        }
      };
      rec(rec, 0);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    reach_[t + 1] = std::move(next);
  }
}

void Solver::Backward() {
  Impl& im = *impl_;
  const int horizon = im.horizon;
  im.tables.assign(horizon, {});
  const double penalty = inst_.penalty;

  for (int t = horizon - 1; t >= 0; --t) {
    // Expected value of each post-decision state.
    std::vector<double> w(post_[t].size(), 0.0);
    if (t + 1 < horizon) {
      const Impl::Table& nt = im.tables[t + 1];
      // Average over next-period asset nodes.
      std::vector<std::uint64_t> bar_keys;
      std::vector<double> bar;
      for (std::size_t i = 0; i < nt.keys.size(); ++i) {
        const std::uint64_t post = nt.keys[i] / im.node_space;
        double prob = 1.0;
        if (im.stochastic_locations) {
          std::uint64_t l = nt.keys[i] % im.node_space;
          for (int a = im.assets - 1; a >= 0; --a) {
            prob *= location_[a][t + 1][l % im.nodes];
            l /= im.nodes;
          }
        }
        if (bar_keys.empty() || bar_keys.back() != post) {
          bar_keys.push_back(post);
          bar.push_back(0.0);
        }
        bar.back() += prob * nt.values[i];
      }
      auto bar_value = [&](std::uint64_t post) {
        const auto it = std::lower_bound(bar_keys.begin(), bar_keys.end(), post);
        if (it == bar_keys.end() || *it != post) throw IntegrityError("successor state missing from the reachable set");
        return bar[static_cast<std::size_t>(it - bar_keys.begin())];
      };
      std::vector<int> levels(im.assets);
      for (std::size_t i = 0; i < post_[t].size(); ++i) {
        const State ps = im.Decode(t, post_[t][i] * im.node_space);
        double acc = 0.0;
        auto rec = [&](auto&& self, int a, double prob) -> void {
          if (a == im.assets) {
            acc += prob * bar_value(im.PostKey(ps.bowser_level, ps.bowser_node, levels));
            return;
          }
          const auto& p = consumption_[a][t];
          const int y = ps.asset_levels[a];
          for (int j = 0; j <= y; ++j) {
            double pj = 0.0;
            if (j > 0) {
              const int f = y - j;
              pj = f < static_cast<int>(p.size()) ? p[f] : 0.0;
            } else {
              for (std::size_t f = static_cast<std::size_t>(y); f < p.size(); ++f) pj += p[f];
            }
            if (pj <= 0.0) continue;
            levels[a] = j;
            self(self, a + 1, prob * pj);
          }
        };
        rec(rec, 0, 1.0);
        w[i] = acc;
      }
    }
    auto post_value = [&](std::uint64_t pk) {
      const auto it = std::lower_bound(post_[t].begin(), post_[t].end(), pk);
      return w[static_cast<std::size_t>(it - post_[t].begin())];
    };

    Impl::Table& table = im.tables[t];
    const std::size_t n = reach_[t].size();
    table.keys = reach_[t];
    table.values.assign(n, kInf);
    table.refill.assign(n, 0);
    table.next.assign(n, 0);
    table.refuels.assign(n * im.assets, 0);
    const bool last = t == horizon - 1;

    auto work = [&](std::size_t begin, std::size_t end) {
      std::vector<int> y(im.assets);
      for (std::size_t i = begin; i < end; ++i) {
        const State s = im.Decode(t, table.keys[i]);
        table.next[i] = s.bowser_node;
        if (last && inst_.bowser_end && s.bowser_node != *inst_.bowser_end) continue;
        double best = kInf;
        ForEachAction(t, s.bowser_level, s.bowser_node, s.asset_levels, s.asset_nodes,
                      [&](int r, int next, const std::vector<int>& q) {
                        int b = s.bowser_level + r;
                        double cost = inst_.graph.Distance(s.bowser_node, next);
                        for (int a = 0; a < im.assets; ++a) {
                          y[a] = s.asset_levels[a] + q[a];
                          b -= q[a];
                          cost += penalty * shortage_[a][t][y[a]];
                        }
                        cost += post_value(im.PostKey(b, next, y));
                        if (std::isinf(best) ? cost < best : cost < best - 1e-12 * std::max(1.0, std::abs(best))) {
                          best = cost;
                          table.refill[i] = r;
                          table.next[i] = next;
                          std::copy(q.begin(), q.end(), table.refuels.begin() + static_cast<std::ptrdiff_t>(i * im.assets));
                        }
                      });
        table.values[i] = best;
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options_.jobs, 1)), 1,
                                                        std::max<std::size_t>(n, 1));
    if (workers == 1) {
      work(0, n);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (std::size_t k = 0; k < workers; ++k) {
        const std::size_t begin = k * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
      for (auto& th : pool) th.join();
    }
  }
}

Result Solver::Run() {
  const auto start = std::chrono::steady_clock::now();
  Prepare();
  Forward();
  Backward();
  const Impl& im = *impl_;

  Result res;
  res.variant = variant_;
  res.state_action_pairs = pairs_;
  for (const auto& r : reach_) res.reachable_states += static_cast<long long>(r.size());
  // Expected value over the first-period asset nodes.
  const Impl::Table& first = im.tables[0];
  double v = 0.0;
  for (std::size_t i = 0; i < first.keys.size(); ++i) {
    double prob = 1.0;
    if (im.stochastic_locations) {
      std::uint64_t l = first.keys[i] % im.node_space;
      for (int a = im.assets - 1; a >= 0; --a) {
        prob *= location_[a][0][l % im.nodes];
        l /= im.nodes;
      }
    }
    v += prob * first.values[i];
  }
  if (!std::isfinite(v)) {
    throw InvalidArgumentError("the bowser cannot reach its end node within the horizon");
  }
  res.expected_cost = v;
  res.policy = Policy(impl_);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

Result Solve(const Instance& inst, Variant variant, const Options& options) {
  return Solver(inst, variant, options).Run();
}

std::string FormatPolicy(const Policy& policy) {
  std::string out = "# period bowser_level bowser_node asset_levels asset_nodes | refill next_node refuels | value\n";
  for (int t = 0; t < policy.horizon(); ++t) {
    for (const auto& [s, e] : policy.Entries(t)) {
      auto join = [](const std::vector<int>& v, int offset) {
        std::string r;
        for (std::size_t i = 0; i < v.size(); ++i) r += fmt::format("{}{}", i ? "," : "", v[i] + offset);
        return r.empty() ? std::string("-") : r;
      };
      out += fmt::format("{} {} {} {} {} | {} {} {} | {}\n", t + 1, s.bowser_level, s.bowser_node + 1,
                         join(s.asset_levels, 0), join(s.asset_nodes, 1), e.action.bowser_refill,
                         e.action.next_node + 1, join(e.action.refuels, 0),
                         std::isfinite(e.value) ? fmt::format("{:.10g}", e.value) : std::string("inf"));
    }
  }
  return out;
}

sim::MonteCarloResult SimulatePolicy(const Instance& inst, const Policy& policy, long replications,
                                     std::uint64_t seed, int jobs) {
  if (replications < 1) throw InvalidArgumentError("need at least one replication");
  if (policy.horizon() != inst.horizon) throw DimensionError("policy horizon does not match the instance");
  const int assets = inst.asset_count();
  std::vector<double> totals(replications, 0.0);
  std::vector<double> travel(replications, 0.0);
  std::vector<double> shortage(replications, 0.0);

  auto run = [&](long r) {
    const sim::ConsumptionPath path = sim::SampleConsumption(inst, seed, static_cast<std::uint64_t>(r));
    State s;
    s.bowser_level = static_cast<int>(std::lround(inst.bowser_initial));
    s.bowser_node = inst.bowser_start;
    for (const auto& a : inst.assets) s.asset_levels.push_back(static_cast<int>(std::lround(a.initial_level)));
    s.asset_nodes.assign(assets, 0);
    double cost = 0.0;
    for (int t = 0; t < inst.horizon; ++t) {
      s.period = t;
      for (int a = 0; a < assets; ++a) {
        const AssetSpec& asset = inst.assets[a];
        if (asset.has_deterministic_location()) {
          s.asset_nodes[a] = asset.location[t];
        } else {
          const double u = KeyedUniform(seed, DrawLane::kLocation, static_cast<std::uint64_t>(r), a, t);
          const auto& pmf = asset.location_pmf[t];
          int node = static_cast<int>(pmf.size()) - 1;
          double cum = 0.0;
          for (std::size_t i = 0; i < pmf.size(); ++i) {
            cum += pmf[i];
            if (u <= cum && pmf[i] > 0.0) {
              node = static_cast<int>(i);
              break;
            }
          }
          s.asset_nodes[a] = node;
        }
      }
      const auto entry = policy.Lookup(s);
      if (!entry || !std::isfinite(entry->value)) {
        throw IntegrityError(fmt::format("policy has no decision for the state visited in period {} of replication {}",
                                         t + 1, r));
      }
      const Action& act = entry->action;
      s.bowser_level += act.bowser_refill;
      for (int a = 0; a < assets; ++a) {
        const int y = s.asset_levels[a] + act.refuels[a];
        s.bowser_level -= act.refuels[a];
        const double f = path[a][t];
        const double short_a = std::max(f - y, 0.0);
        shortage[r] += short_a;
        cost += inst.penalty * short_a;
        s.asset_levels[a] = static_cast<int>(std::max(y - f, 0.0));
      }
      const double d = inst.graph.Distance(s.bowser_node, act.next_node);
      travel[r] += d;
      cost += d;
      s.bowser_node = act.next_node;
    }
    totals[r] = cost;
  };

  const long workers = std::clamp<long>(jobs, 1, replications);
  if (workers == 1) {
    for (long r = 0; r < replications; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const long chunk = (replications + workers - 1) / workers;
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long r = w * chunk; r < std::min(replications, (w + 1) * chunk); ++r) run(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  sim::MonteCarloResult res = sim::Summarize(totals);
  res.mean_travel = std::accumulate(travel.begin(), travel.end(), 0.0) / replications;
  res.mean_shortage = std::accumulate(shortage.begin(), shortage.end(), 0.0) / replications;
  return res;
}

}  // namespace bowser::sdp
