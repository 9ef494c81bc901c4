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

// Seeded generators for the deterministic and stochastic test beds, a
// desk-scale random instance generator, and the KPI harness that runs the
// solution methods over a test bed and renders pivot tables.

#ifndef BOWSER_BENCHGEN_HPP_
#define BOWSER_BENCHGEN_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bowser/core.hpp"

namespace bowser::benchgen {

// Portable random source: the raw 64-bit engine output is specified by the
// standard, and the derived draws below are computed here rather than by
// the library's distribution classes, so generated files are identical on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform();                         // [0, 1)
  double Normal(double mean, double sd);    // Box-Muller
  int Index(int n);                         // uniform in 0..n-1
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Directed graph on n nodes; each ordered pair becomes an arc with
// probability p_edge. Regenerated wholesale until strongly connected; arc
// lengths ~ Normal(100, 20) truncated below at 1. Throws
// InvalidArgumentError for bad arguments or after 1,000,000 failed attempts
// (a 10-node graph at p_edge = 0.1 is strongly connected about once in
// 3,000 draws).
SiteGraph GenerateBernoulliSiteGraph(int n, double p_edge, Rng& rng);

enum class Kind { kDbrp, kSbrp };
std::string KindName(Kind k);

struct TopologySpec {
  std::string label;
  int sites = 1;
  int nodes_per_site = 10;
  double edge_probability = 0.1;
};

struct AssetType {
  std::string name;
  double tank = 0.0;
  double lambda = 0.0;     // compound-Poisson event rate per bucket
  double jump_mean = 0.0;  // Poisson jump-size mean
};

struct ConsumptionPattern {
  std::string label;
  std::vector<std::vector<double>> means;  // [asset][period]
};

struct TestbedConfig {
  Kind kind = Kind::kDbrp;
  int horizon = 0;
  std::vector<double> bowser_capacities;
  double bowser_initial = 0.0;
  std::vector<TopologySpec> topologies;
  std::vector<double> penalties;
  std::uint64_t seed = 0;
  double stay_probability = 0.5;  // asset random walk

  // Deterministic test bed.
  std::vector<int> assets_per_site;
  std::vector<AssetType> asset_types;
  double initial_fraction = 0.2;  // s_a ~ U(0, fraction * c_a)
  int buckets_per_period = 1;

  // Stochastic test bed.
  double asset_capacity = 0.0;
  std::vector<std::vector<double>> initial_levels;  // ITL configurations
  std::vector<ConsumptionPattern> patterns;
  int truncation = 7;
};

// JSON configuration (see data/configs). Throws ParseError or
// InvalidArgumentError on malformed or incomplete input.
TestbedConfig ParseConfig(const std::string& json_text);
TestbedConfig LoadConfig(const std::string& path);

struct TestbedInstance {
  Instance instance;
  // Factor levels for pivoting, e.g. {"topology", "A"}, {"penalty", "100"}.
  std::map<std::string, std::string> factors;
};

// Full factorial test beds; pure functions of the configuration.
std::vector<TestbedInstance> GenerateDbrpTestbed(const TestbedConfig& config);
std::vector<TestbedInstance> GenerateSbrpTestbed(const TestbedConfig& config);
std::vector<TestbedInstance> GenerateTestbed(const TestbedConfig& config);

// Writes one instance file per entry plus a manifest (manifest.tsv) listing
// file names and factor levels.
void WriteTestbed(const std::vector<TestbedInstance>& testbed, const std::string& dir);
// Reads a directory written by WriteTestbed.
std::vector<TestbedInstance> ReadTestbed(const std::string& dir);

struct DeskScaleOptions {
  int min_nodes = 3;
  int max_nodes = 10;
  int min_assets = 1;
  int max_assets = 3;
  int min_horizon = 3;
  int max_horizon = 10;
  double edge_probability = 0.35;
  bool stochastic = false;  // Poisson consumption instead of fixed values
};

// Small random deterministic (or Poisson) instance for oracle checks; the
// bowser starts and ends at the cistern.
Instance GenerateDeskScaleInstance(std::uint64_t seed, const DeskScaleOptions& options = {});

// ---------------------------------------------------------------------------
// KPI harness
// ---------------------------------------------------------------------------

enum class Method { kMp, kMpvi, kHereAndNow, kRecedingHorizon, kSdp };
std::string MethodName(Method m);  // mp, mpvi, hn, rh, sdp
Method ParseMethod(const std::string& name);

struct BenchLimits {
  double time_limit_seconds = 600.0;  // per MILP solve
  long replications = 500;
  std::uint64_t seed = 1;
  int segments = 5;
  double sdp_budget = 5e7;
  int jobs = 1;  // instances solved concurrently
};

struct KpiRow {
  std::string instance;
  std::map<std::string, std::string> factors;
  Method method = Method::kMp;
  std::string status;          // optimal, gap, timeout, error, skipped
  std::string message;         // diagnostic for errors and skips
  double seconds = 0.0;
  double nodes = 0.0;
  double iterations = 0.0;
  double objective = 0.0;      // MILP objective, or SDP v_1
  double gap = 0.0;            // relative MIP gap at termination
  double root_bound = 0.0;
  double predicted = 0.0;      // model-predicted expected cost (HN, SDP)
  double simulated = 0.0;      // Monte Carlo mean (HN, RH, SDP policy)
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Runs one method on every instance. Per-instance failures and timeouts are
// recorded in the row, never thrown. Rows follow the input order.
std::vector<KpiRow> RunBenchmark(const std::vector<TestbedInstance>& instances, Method method,
                                 const BenchLimits& limits);

struct GapRow {
  std::string instance;
  std::map<std::string, std::string> factors;
  bool has_linearization = false;
  double linearization = 0.0;  // |predicted - simulated| / simulated (HN)
  bool has_hn = false;
  double hn = 0.0;             // (sim HN - sim SDP) / sim SDP
  bool has_rh = false;
  double rh = 0.0;             // (sim RH - sim SDP) / sim SDP
};

// Joins rows of several methods by instance and computes the gaps that the
// available methods allow.
std::vector<GapRow> ComputeGaps(const std::vector<KpiRow>& rows);

// Per-instance rows as a tab-separated table.
std::string FormatRows(const std::vector<KpiRow>& rows);

// Averages by factor level: one block per factor in `factors` (plus an
// overall row); columns per method are the mean time, nodes, simplex
// iterations, objective and gap, and, when available, the three gap KPIs
// in percent.
std::string FormatPivot(const std::vector<KpiRow>& rows, const std::vector<std::string>& factors);

}  // namespace bowser::benchgen

#endif  // BOWSER_BENCHGEN_HPP_
