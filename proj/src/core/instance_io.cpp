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
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/io.hpp"

namespace bowser {
namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> Tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{number, {}};
    std::string tok;
    while (in >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return lines;
}

double ToDouble(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, found '" + s + "'", line);
  }
}

int ToInt(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, found '" + s + "'", line);
  }
}

void ExpectArity(const Line& l, std::size_t n) {
  if (l.tokens.size() != n) {
    throw ParseError(fmt::format("'{}' expects {} value(s)", l.tokens[0], n - 1), l.number);
  }
}

// Raw asset data before node relabelling and horizon checks.
struct RawAsset {
  std::string label;
  std::optional<double> capacity;
  std::optional<double> initial;
  std::vector<int> locations;  // 1-based labels
  std::map<int, std::vector<std::pair<int, double>>> location_pmf;
  std::vector<double> consumption;
  std::vector<DiscreteDist> dists;
  std::map<int, DiscreteDist> pmf_by_period;
  std::size_t line = 0;
};

std::string Num(double v) { return fmt::format("{}", v); }

}  // namespace

Instance ParseInstance(std::string_view text) {
  const auto lines = Tokenize(text);
  Instance inst;
  std::optional<int> horizon;
  std::optional<int> nodes;
  int cistern = 1;
  std::optional<double> penalty, cap_b, init_b;
  std::optional<int> start, end_node;
  std::vector<std::vector<std::optional<double>>> matrix;
  std::vector<RawAsset> raw_assets;

  std::size_t i = 0;
  while (i < lines.size()) {
    const Line& l = lines[i];
    const std::string& key = l.tokens[0];
    if (key == "name") {
      ExpectArity(l, 2);
      inst.name = l.tokens[1];
    } else if (key == "horizon") {
      ExpectArity(l, 2);
      horizon = ToInt(l.tokens[1], l.number);
    } else if (key == "nodes") {
      ExpectArity(l, 2);
      nodes = ToInt(l.tokens[1], l.number);
    } else if (key == "cistern") {
      ExpectArity(l, 2);
      cistern = ToInt(l.tokens[1], l.number);
    } else if (key == "penalty") {
      ExpectArity(l, 2);
      penalty = ToDouble(l.tokens[1], l.number);
    } else if (key == "bowser_capacity") {
      ExpectArity(l, 2);
      cap_b = ToDouble(l.tokens[1], l.number);
    } else if (key == "bowser_initial") {
      ExpectArity(l, 2);
      init_b = ToDouble(l.tokens[1], l.number);
    } else if (key == "bowser_start") {
      ExpectArity(l, 2);
      start = ToInt(l.tokens[1], l.number);
    } else if (key == "bowser_end") {
      ExpectArity(l, 2);
      end_node = ToInt(l.tokens[1], l.number);
    } else if (key == "distances") {
      if (!nodes) throw ParseError("'nodes' must precede 'distances'", l.number);
      ++i;
      for (int r = 0; r < *nodes; ++r, ++i) {
        if (i >= lines.size()) throw ParseError("distance matrix ends early", l.number);
        const Line& row = lines[i];
        if (static_cast<int>(row.tokens.size()) != *nodes) {
          throw ParseError(fmt::format("distance row needs {} cells", *nodes), row.number);
        }
        std::vector<std::optional<double>> cells;
        for (const auto& cell : row.tokens) {
          if (cell == "-" || cell == ".") {
            cells.push_back(std::nullopt);
          } else {
            cells.push_back(ToDouble(cell, row.number));
          }
        }
        matrix.push_back(std::move(cells));
      }
      if (i >= lines.size() || lines[i].tokens[0] != "end") {
        throw ParseError("distance matrix must be closed by 'end'", i < lines.size() ? lines[i].number : l.number);
      }
    } else if (key == "asset") {
      RawAsset ra;
      ra.line = l.number;
      ra.label = l.tokens.size() > 1 ? l.tokens[1] : std::to_string(raw_assets.size() + 1);
      ++i;
      for (;; ++i) {
        if (i >= lines.size()) throw ParseError("asset block not closed by 'end'", l.number);
        const Line& al = lines[i];
        const std::string& ak = al.tokens[0];
        if (ak == "end") break;
        if (ak == "capacity") {
          ExpectArity(al, 2);
          ra.capacity = ToDouble(al.tokens[1], al.number);
        } else if (ak == "initial") {
          ExpectArity(al, 2);
          ra.initial = ToDouble(al.tokens[1], al.number);
        } else if (ak == "locations") {
          for (std::size_t k = 1; k < al.tokens.size(); ++k) ra.locations.push_back(ToInt(al.tokens[k], al.number));
        } else if (ak == "location_pmf") {
          if (al.tokens.size() < 3) throw ParseError("location_pmf needs a period and node:prob pairs", al.number);
          const int t = ToInt(al.tokens[1], al.number);
          auto& entries = ra.location_pmf[t];
          for (std::size_t k = 2; k < al.tokens.size(); ++k) {
            const auto colon = al.tokens[k].find(':');
            if (colon == std::string::npos) throw ParseError("expected node:probability", al.number);
            entries.emplace_back(ToInt(al.tokens[k].substr(0, colon), al.number),
                                 ToDouble(al.tokens[k].substr(colon + 1), al.number));
          }
        } else if (ak == "consumption") {
          for (std::size_t k = 1; k < al.tokens.size(); ++k) ra.consumption.push_back(ToDouble(al.tokens[k], al.number));
        } else if (ak == "consumption_poisson") {
          for (std::size_t k = 1; k < al.tokens.size(); ++k) {
            ra.dists.push_back(PoissonDist(ToDouble(al.tokens[k], al.number)));
          }
        } else if (ak == "consumption_truncated_poisson") {
          if (al.tokens.size() < 3) throw ParseError("consumption_truncated_poisson needs a cap and means", al.number);
          const int cap = ToInt(al.tokens[1], al.number);
          for (std::size_t k = 2; k < al.tokens.size(); ++k) {
            try {
              ra.dists.push_back(TruncatedPoissonDist(ToDouble(al.tokens[k], al.number), cap));
            } catch (const InvalidArgumentError& e) {
              throw ParseError(e.what(), al.number);
            }
          }
        } else if (ak == "consumption_pmf") {
          if (al.tokens.size() < 3) throw ParseError("consumption_pmf needs a period and probabilities", al.number);
          const int t = ToInt(al.tokens[1], al.number);
          std::vector<double> pmf;
          for (std::size_t k = 2; k < al.tokens.size(); ++k) pmf.push_back(ToDouble(al.tokens[k], al.number));
          try {
            ra.pmf_by_period.insert_or_assign(t, DiscreteDist(std::move(pmf)));
          } catch (const InvalidArgumentError& e) {
            throw ParseError(e.what(), al.number);
          }
        } else {
          throw ParseError("unknown asset key '" + ak + "'", al.number);
        }
      }
      raw_assets.push_back(std::move(ra));
    } else {
      throw ParseError("unknown key '" + key + "'", l.number);
    }
    ++i;
  }

  if (!horizon) throw ParseError("missing 'horizon'", 0);
  if (!nodes) throw ParseError("missing 'nodes'", 0);
  if (!penalty) throw ParseError("missing 'penalty'", 0);
  if (!cap_b) throw ParseError("missing 'bowser_capacity'", 0);
  if (!init_b) throw ParseError("missing 'bowser_initial'", 0);
  if (matrix.empty()) throw ParseError("missing 'distances' block", 0);
  const int n = *nodes;
  if (n < 1) throw ParseError("'nodes' must be positive", 0);
  if (cistern < 1 || cistern > n) throw ParseError("'cistern' must name an existing node", 0);

  // Relabel so that the cistern becomes internal node 0: swap labels.
  auto relabel = [&](int label) {
    if (label < 1 || label > n) throw ParseError(fmt::format("node {} does not exist", label), 0);
    int v = label - 1;
    if (v == cistern - 1) return 0;
    if (v == 0) return cistern - 1;
    return v;
  };

  inst.horizon = *horizon;
  inst.penalty = *penalty;
  inst.bowser_capacity = *cap_b;
  inst.bowser_initial = *init_b;
  inst.bowser_start = start ? relabel(*start) : kCistern;
  if (end_node) inst.bowser_end = relabel(*end_node);
  inst.graph = SiteGraph(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto& cell = matrix[r][c];
      if (!cell) continue;
      if (r == c) {
        if (*cell != 0.0) throw ParseError(fmt::format("diagonal distance at node {} must be 0 or '-'", r + 1), 0);
        continue;
      }
      try {
        inst.graph.AddArc(relabel(r + 1), relabel(c + 1), *cell);
      } catch (const InvalidArgumentError& e) {
        throw ParseError(e.what(), 0);
      }
    }
  }

  for (auto& ra : raw_assets) {
    AssetSpec a;
    a.label = ra.label;
    if (!ra.capacity || !ra.initial) throw ParseError("asset needs 'capacity' and 'initial'", ra.line);
    a.tank_capacity = *ra.capacity;
    a.initial_level = *ra.initial;
    for (int loc : ra.locations) a.location.push_back(relabel(loc));
    if (!ra.location_pmf.empty()) {
      for (int t = 1; t <= inst.horizon; ++t) {
        const auto it = ra.location_pmf.find(t);
        if (it == ra.location_pmf.end()) {
          throw ParseError(fmt::format("location_pmf missing period {}", t), ra.line);
        }
        std::vector<double> pmf(n, 0.0);
        for (const auto& [node, p] : it->second) pmf[relabel(node)] += p;
        a.location_pmf.push_back(std::move(pmf));
      }
    }
    a.consumption = std::move(ra.consumption);
    a.consumption_dist = std::move(ra.dists);
    if (!ra.pmf_by_period.empty()) {
      if (!a.consumption_dist.empty()) {
        throw ParseError("consumption_pmf cannot be mixed with other distribution keys", ra.line);
      }
      for (int t = 1; t <= inst.horizon; ++t) {
        const auto it = ra.pmf_by_period.find(t);
        if (it == ra.pmf_by_period.end()) {
          throw ParseError(fmt::format("consumption_pmf missing period {}", t), ra.line);
        }
        a.consumption_dist.push_back(it->second);
      }
    }
    inst.assets.push_back(std::move(a));
  }
  return inst;
}

std::string FormatInstance(const Instance& inst) {
  std::string out;
  auto line = [&](const std::string& s) {
    out += s;
    out += '\n';
  };
  if (!inst.name.empty()) line("name " + inst.name);
  line(fmt::format("horizon {}", inst.horizon));
  const int n = inst.graph.node_count();
  line(fmt::format("nodes {}", n));
  line("penalty " + Num(inst.penalty));
  line("bowser_capacity " + Num(inst.bowser_capacity));
  line("bowser_initial " + Num(inst.bowser_initial));
  line(fmt::format("bowser_start {}", inst.bowser_start + 1));
  if (inst.bowser_end) line(fmt::format("bowser_end {}", *inst.bowser_end + 1));
  line("distances");
  for (int r = 0; r < n; ++r) {
    std::string row;
    for (int c = 0; c < n; ++c) {
      if (c > 0) row += ' ';
      row += (r != c && inst.graph.HasTransit(r, c)) ? Num(inst.graph.Distance(r, c)) : "-";
    }
    line(row);
  }
  line("end");
  for (const auto& a : inst.assets) {
    line("asset " + (a.label.empty() ? std::string("-") : a.label));
    line("  capacity " + Num(a.tank_capacity));
    line("  initial " + Num(a.initial_level));
    if (!a.location.empty()) {
      std::string s = "  locations";
      for (int loc : a.location) s += fmt::format(" {}", loc + 1);
      line(s);
    }
    for (std::size_t t = 0; t < a.location_pmf.size(); ++t) {
      std::string s = fmt::format("  location_pmf {}", t + 1);
      for (int node = 0; node < static_cast<int>(a.location_pmf[t].size()); ++node) {
        if (a.location_pmf[t][node] > 0.0) s += fmt::format(" {}:{}", node + 1, a.location_pmf[t][node]);
      }
      line(s);
    }
    if (!a.consumption.empty()) {
      std::string s = "  consumption";
      for (double f : a.consumption) s += " " + Num(f);
      line(s);
    }
    for (std::size_t t = 0; t < a.consumption_dist.size(); ++t) {
      std::string s = fmt::format("  consumption_pmf {}", t + 1);
      for (double p : a.consumption_dist[t].probabilities()) s += " " + Num(p);
      line(s);
    }
    line("end");
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot write file: " + path);
  out << contents;
}

Instance LoadInstance(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return ParseInstance(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void SaveInstance(const Instance& inst, const std::string& path) { WriteFile(path, FormatInstance(inst)); }

}  // namespace bowser
