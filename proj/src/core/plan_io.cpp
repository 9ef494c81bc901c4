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

#include <sstream>
#include <string>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/io.hpp"

namespace bowser {
namespace {

std::string Num(double v) { return fmt::format("{}", v); }

}  // namespace

Plan ParsePlan(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  int horizon = -1;
  int assets = -1;
  Plan plan;
  bool seen_header = false;
  bool closed = false;
  auto numbers = [&](std::istringstream& ls, std::size_t count, std::size_t line_no) {
    std::vector<double> out;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("expected a number, found '" + tok + "'", line_no);
      }
    }
    if (out.size() != count) throw ParseError(fmt::format("expected {} values, found {}", count, out.size()), line_no);
    return out;
  };
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    if (closed) throw ParseError("content after 'end'", number);
    if (key == "plan") {
      seen_header = true;
    } else if (key == "horizon") {
      ls >> horizon;
    } else if (key == "assets") {
      ls >> assets;
      if (assets >= 0) plan.refuels.assign(assets, {});
    } else if (key == "route") {
      if (horizon < 0) throw ParseError("'horizon' must precede 'route'", number);
      for (double v : numbers(ls, horizon, number)) plan.route.push_back(static_cast<int>(v) - 1);
    } else if (key == "refills") {
      if (horizon < 0) throw ParseError("'horizon' must precede 'refills'", number);
      plan.refills = numbers(ls, horizon, number);
    } else if (key == "refuel") {
      int a = 0;
      if (!(ls >> a) || a < 1 || a > assets) throw ParseError("refuel needs a valid 1-based asset index", number);
      plan.refuels[a - 1] = numbers(ls, horizon, number);
    } else if (key == "end") {
      closed = true;
    } else {
      throw ParseError("unknown plan key '" + key + "'", number);
    }
  }
  if (!seen_header) throw ParseError("missing 'plan' header", 0);
  if (horizon < 0 || assets < 0) throw ParseError("plan needs 'horizon' and 'assets'", 0);
  return plan;
}

std::string FormatPlan(const Plan& plan) {
  std::string out = "plan\n";
  out += fmt::format("horizon {}\n", plan.route.size());
  out += fmt::format("assets {}\n", plan.refuels.size());
  out += "route";
  for (int node : plan.route) out += fmt::format(" {}", node + 1);
  out += "\nrefills";
  for (double b : plan.refills) out += " " + Num(b);
  out += '\n';
  for (std::size_t a = 0; a < plan.refuels.size(); ++a) {
    out += fmt::format("refuel {}", a + 1);
    for (double q : plan.refuels[a]) out += " " + Num(q);
    out += '\n';
  }
  out += "end\n";
  return out;
}

std::string FormatRouteTable(const Plan& plan) {
  std::string out = fmt::format("{:>6}  {}\n", "period", "transit");
  for (std::size_t t = 1; t < plan.route.size(); ++t) {
    out += fmt::format("{:>6}  {} -> {}\n", t + 1, plan.route[t - 1] + 1, plan.route[t] + 1);
  }
  return out;
}

Plan LoadPlan(const std::string& path) { return ParsePlan(ReadFile(path)); }

void SavePlan(const Plan& plan, const std::string& path) { WriteFile(path, FormatPlan(plan)); }

}  // namespace bowser
