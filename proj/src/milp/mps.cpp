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

// Fixed-column MPS writer and reader.
//
// Field layout (1-based columns): 2-3 code, 5-12 name, 15-22 name,
// 25-36 value, 40-47 name, 50-61 value. Names longer than eight characters
// (or containing blanks) are shortened to their first four characters plus
// a four-character base-36 FNV-1a digest of the full name. The writer emits
// "* NAMEMAP <short> <full>" comment lines so that the reader can restore
// the original names; readers that ignore comments still see a valid file.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/milp.hpp"

namespace bowser::milp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kObjectiveName = "OBJ";

std::uint32_t Fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

bool NeedsShortening(const std::string& name) {
  if (name.empty() || name.size() > 8) return true;
  for (char c : name) {
    if (c == ' ' || c == '\t' || c == '$') return true;
  }
  return name[0] == '*';
}

std::string ShortName(const std::string& name) {
  if (!NeedsShortening(name)) return name;
  static constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string prefix;
  for (char c : name) {
    if (prefix.size() == 4) break;
    if (c != ' ' && c != '\t' && c != '$' && !(prefix.empty() && c == '*')) prefix += c;
  }
  while (prefix.size() < 4) prefix += '_';
  std::uint32_t h = Fnv1a(name) % (36u * 36u * 36u * 36u);
  std::string digest(4, '0');
  for (int k = 3; k >= 0; --k) {
    digest[k] = kDigits[h % 36u];
    h /= 36u;
  }
  return prefix + digest;
}

// Shortest decimal rendering that fits the 12-character value field.
std::string FieldNumber(double v) {
  std::string s = fmt::format("{}", v);
  if (s.size() <= 12) return s;
  for (int prec = 12; prec >= 1; --prec) {
    s = fmt::format("{:.{}g}", v, prec);
    if (s.size() <= 12) return s;
  }
  throw InvalidArgumentError(fmt::format("value {} cannot be written in a 12-character field", v));
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string DataLine(const std::string& code, const std::string& f2, const std::string& f3 = "",
                     const std::string& f4 = "", const std::string& f5 = "", const std::string& f6 = "") {
  std::string line = " " + Pad(code, 2) + " " + Pad(f2, 8);
  if (!f3.empty()) line += "  " + Pad(f3, 8) + "  " + Pad(f4, 12);
  if (!f5.empty()) line += "   " + Pad(f5, 8) + "  " + f6;
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line + "\n";
}

class NameTable {
 public:
  std::string Register(const std::string& full) {
    const std::string s = ShortName(full);
    const auto [it, inserted] = owner_.emplace(s, full);
    if (!inserted && it->second != full) {
      throw InvalidArgumentError("MPS name collision: '" + full + "' and '" + it->second + "' both map to '" + s + "'");
    }
    if (s != full) renamed_.emplace_back(s, full);
    return s;
  }
  const std::vector<std::pair<std::string, std::string>>& renamed() const { return renamed_; }

 private:
  std::unordered_map<std::string, std::string> owner_;
  std::vector<std::pair<std::string, std::string>> renamed_;
};

}  // namespace

std::string ExportMps(const Model& model, const std::string& name) {
  const auto problems = model.Validate();
  if (!problems.empty()) throw InvalidArgumentError("invalid model: " + problems.front());

  NameTable names;
  const std::string obj = names.Register(kObjectiveName);
  std::vector<std::string> row_names;
  for (const auto& c : model.constraints()) row_names.push_back(names.Register(c.name));
  std::vector<std::string> col_names;
  for (const auto& v : model.variables()) col_names.push_back(names.Register(v.name));

  // Column-wise coefficient lists.
  std::vector<std::vector<std::pair<int, double>>> columns(model.num_variables());
  for (int i = 0; i < model.num_constraints(); ++i) {
    std::map<int, double> merged;
    for (const auto& t : model.constraint(i).terms) merged[t.var] += t.coef;
    for (const auto& [var, coef] : merged) columns[var].emplace_back(i, coef);
  }

  std::string out;
  for (const auto& [short_name, full] : names.renamed()) out += "* NAMEMAP " + short_name + " " + full + "\n";
  out += "NAME          " + ShortName(name) + "\n";
  out += "ROWS\n";
  out += DataLine("N", obj);
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Sense s = model.constraint(i).sense;
    out += DataLine(s == Sense::kLessEqual ? "L" : (s == Sense::kGreaterEqual ? "G" : "E"), row_names[i]);
  }
  out += "COLUMNS\n";
  bool in_marker = false;
  int marker_count = 0;
  for (int j = 0; j < model.num_variables(); ++j) {
    const bool binary = model.variable(j).kind == VarKind::kBinary;
    if (binary && !in_marker) {
      out += DataLine("", fmt::format("M{:07d}", marker_count++), "'MARKER'", "", "'INTORG'", "");
      in_marker = true;
    } else if (!binary && in_marker) {
      out += DataLine("", fmt::format("M{:07d}", marker_count++), "'MARKER'", "", "'INTEND'", "");
      in_marker = false;
    }
    std::vector<std::pair<std::string, double>> entries;
    if (model.objective()[j] != 0.0) entries.emplace_back(obj, model.objective()[j]);
    for (const auto& [row, coef] : columns[j]) entries.emplace_back(row_names[row], coef);
    if (entries.empty()) entries.emplace_back(obj, 0.0);
    for (std::size_t k = 0; k < entries.size(); k += 2) {
      if (k + 1 < entries.size()) {
        out += DataLine("", col_names[j], entries[k].first, FieldNumber(entries[k].second), entries[k + 1].first,
                        FieldNumber(entries[k + 1].second));
      } else {
        out += DataLine("", col_names[j], entries[k].first, FieldNumber(entries[k].second));
      }
    }
  }
  if (in_marker) out += DataLine("", fmt::format("M{:07d}", marker_count++), "'MARKER'", "", "'INTEND'", "");
  out += "RHS\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    if (model.constraint(i).rhs != 0.0) out += DataLine("", "RHS", row_names[i], FieldNumber(model.constraint(i).rhs));
  }
  out += "BOUNDS\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    const std::string& c = col_names[j];
    if (v.kind == VarKind::kBinary) {
      if (v.lower == 0.0 && v.upper == 1.0) {
        out += DataLine("BV", "BND", c);
      } else {
        out += DataLine("UP", "BND", c, FieldNumber(v.upper));
        if (v.lower != 0.0) out += DataLine("LO", "BND", c, FieldNumber(v.lower));
      }
      continue;
    }
    if (v.lower == v.upper) {
      out += DataLine("FX", "BND", c, FieldNumber(v.lower));
      continue;
    }
    if (v.lower == -kInf && v.upper == kInf) {
      out += DataLine("FR", "BND", c);
      continue;
    }
    if (v.lower == -kInf) {
      out += DataLine("MI", "BND", c);
    } else if (v.lower != 0.0) {
      out += DataLine("LO", "BND", c, FieldNumber(v.lower));
    }
    if (v.upper != kInf) out += DataLine("UP", "BND", c, FieldNumber(v.upper));
  }
  out += "ENDATA\n";
  return out;
}

Model ParseMps(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds, kRanges, kEnd } section = Section::kNone;

  std::unordered_map<std::string, std::string> full_name;
  std::string objective_row;
  struct RowInfo {
    std::string name;
    Sense sense;
    std::vector<Term> terms;
    double rhs = 0.0;
  };
  std::vector<RowInfo> rows;
  std::unordered_map<std::string, int> row_index;
  std::unordered_set<std::string> ignored_free_rows;

  struct ColInfo {
    std::string name;
    bool integer = false;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
    bool upper_set = false;
  };
  std::vector<ColInfo> cols;
  std::unordered_map<std::string, int> col_index;
  bool integer_block = false;

  auto restore = [&](const std::string& s) {
    const auto it = full_name.find(s);
    return it == full_name.end() ? s : it->second;
  };
  auto number_of = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number, found '" + s + "'", number);
    }
  };

  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') {
      std::istringstream cs(line.substr(1));
      std::string tag, short_name, full;
      if (cs >> tag >> short_name >> full && tag == "NAMEMAP") full_name[short_name] = full;
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") section = Section::kNone;
      else if (head == "ROWS") section = Section::kRows;
      else if (head == "COLUMNS") section = Section::kColumns;
      else if (head == "RHS") section = Section::kRhs;
      else if (head == "BOUNDS") section = Section::kBounds;
      else if (head == "RANGES") section = Section::kRanges;
      else if (head == "ENDATA") section = Section::kEnd;
      else throw ParseError("unknown MPS section '" + head + "'", number);
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw ParseError("ROWS entries need a type and a name", number);
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) {
            objective_row = tok[1];
          } else {
            ignored_free_rows.insert(tok[1]);
          }
          break;
        }
        Sense s;
        if (type == "L") s = Sense::kLessEqual;
        else if (type == "G") s = Sense::kGreaterEqual;
        else if (type == "E") s = Sense::kEqual;
        else throw ParseError("unknown row type '" + type + "'", number);
        if (row_index.count(tok[1])) throw ParseError("duplicate row '" + tok[1] + "'", number);
        row_index[tok[1]] = static_cast<int>(rows.size());
        rows.push_back({restore(tok[1]), s, {}, 0.0});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok.back() == "'INTORG'") integer_block = true;
          else if (tok.back() == "'INTEND'") integer_block = false;
          else throw ParseError("unknown marker", number);
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("COLUMNS entries need 3 or 5 fields", number);
        auto it = col_index.find(tok[0]);
        int j;
        if (it == col_index.end()) {
          j = static_cast<int>(cols.size());
          col_index[tok[0]] = j;
          ColInfo info;
          info.name = restore(tok[0]);
          info.integer = integer_block;
          if (integer_block) info.upper = kInf;
          cols.push_back(info);
        } else {
          j = it->second;
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = number_of(tok[k + 1]);
          if (tok[k] == objective_row) {
            cols[j].objective += v;
          } else if (ignored_free_rows.count(tok[k])) {
            continue;
          } else {
            const auto r = row_index.find(tok[k]);
            if (r == row_index.end()) throw ParseError("unknown row '" + tok[k] + "'", number);
            rows[r->second].terms.push_back({j, v});
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("RHS entries need 3 or 5 fields", number);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          if (tok[k] == objective_row) throw ParseError("objective constants are not supported", number);
          const auto r = row_index.find(tok[k]);
          if (r == row_index.end()) throw ParseError("unknown row '" + tok[k] + "'", number);
          rows[r->second].rhs = number_of(tok[k + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) throw ParseError("BOUNDS entries need a type, a set name and a column", number);
        const auto c = col_index.find(tok[2]);
        if (c == col_index.end()) throw ParseError("unknown column '" + tok[2] + "'", number);
        ColInfo& col = cols[c->second];
        const std::string& type = tok[0];
        const bool needs_value = type == "UP" || type == "LO" || type == "FX";
        if (needs_value && tok.size() != 4) throw ParseError("bound '" + type + "' needs a value", number);
        if (type == "UP") {
          col.upper = number_of(tok[3]);
          col.upper_set = true;
        } else if (type == "LO") {
          col.lower = number_of(tok[3]);
        } else if (type == "FX") {
          col.lower = col.upper = number_of(tok[3]);
        } else if (type == "FR") {
          col.lower = -kInf;
          col.upper = kInf;
        } else if (type == "MI") {
          col.lower = -kInf;
        } else if (type == "PL") {
          col.upper = kInf;
        } else if (type == "BV") {
          col.integer = true;
          col.lower = 0.0;
          col.upper = 1.0;
        } else {
          throw ParseError("unsupported bound type '" + type + "'", number);
        }
        break;
      }
      case Section::kRanges:
        throw ParseError("RANGES are not supported", number);
      case Section::kNone:
      case Section::kEnd:
        throw ParseError("data outside of a section", number);
    }
  }

  Model model;
  for (const auto& c : cols) {
    double upper = c.upper;
    if (c.integer && !c.upper_set && c.upper == kInf) upper = 1.0;
    if (c.integer && (c.lower < 0.0 || upper > 1.0)) {
      throw ParseError("integer column '" + c.name + "' is not binary", 0);
    }
    model.AddVariable(c.name, c.lower, upper, c.integer ? VarKind::kBinary : VarKind::kContinuous, c.objective);
  }
  for (auto& r : rows) model.AddConstraint(r.name, std::move(r.terms), r.sense, r.rhs);
  return model;
}

}  // namespace bowser::milp
