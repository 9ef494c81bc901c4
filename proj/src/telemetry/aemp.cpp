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
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/telemetry.hpp"

namespace bowser::telemetry {
namespace {

namespace pt = boost::property_tree;
using namespace std::chrono;

constexpr Millis kMillisPerHour = 3'600'000;

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Element name without its namespace prefix.
std::string LocalName(const std::string& name) {
  const auto colon = name.rfind(':');
  return colon == std::string::npos ? name : name.substr(colon + 1);
}

const pt::ptree* Child(const pt::ptree& node, const std::string& local) {
  for (const auto& [name, child] : node) {
    if (LocalName(name) == local) return &child;
  }
  return nullptr;
}

std::optional<std::string> ChildText(const pt::ptree& node, const std::string& local) {
  const pt::ptree* c = Child(node, local);
  if (c == nullptr) return std::nullopt;
  return Trim(c->data());
}

std::optional<std::string> Attribute(const pt::ptree& node, const std::string& local) {
  const pt::ptree* attrs = Child(node, "<xmlattr>");
  if (attrs == nullptr) return std::nullopt;
  return ChildText(*attrs, local);
}

double Number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("{}: '{}' is not a number", what, text), 0);
  }
  return v;
}

int Digits(const std::string& s, std::size_t& pos, int count, const std::string& text) {
  int v = 0;
  for (int i = 0; i < count; ++i, ++pos) {
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
      throw ParseError("malformed timestamp '" + text + "'", 0);
    }
    v = 10 * v + (s[pos] - '0');
  }
  return v;
}

void Expect(const std::string& s, std::size_t& pos, char c, const std::string& text) {
  if (pos >= s.size() || s[pos] != c) throw ParseError("malformed timestamp '" + text + "'", 0);
  ++pos;
}

}  // namespace

Millis ParseTimestamp(const std::string& raw) {
  const std::string s = Trim(raw);
  std::size_t pos = 0;
  const int year = Digits(s, pos, 4, raw);
  Expect(s, pos, '-', raw);
  const int month = Digits(s, pos, 2, raw);
  Expect(s, pos, '-', raw);
  const int day = Digits(s, pos, 2, raw);
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millis = 0;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    ++pos;
    hour = Digits(s, pos, 2, raw);
    Expect(s, pos, ':', raw);
    minute = Digits(s, pos, 2, raw);
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      second = Digits(s, pos, 2, raw);
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int scale = 100;
        const std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          millis += scale * (s[pos] - '0');
          scale /= 10;
          ++pos;
        }
        if (pos == start) throw ParseError("malformed timestamp '" + raw + "'", 0);
      }
    }
  }
  Millis offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '+' ? 1 : -1;
      ++pos;
      const int oh = Digits(s, pos, 2, raw);
      if (pos < s.size() && s[pos] == ':') ++pos;
      const int om = Digits(s, pos, 2, raw);
      offset = sign * (oh * 60 + om) * Millis{60'000};
    }
  }
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (pos != s.size() || !ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw ParseError("malformed timestamp '" + raw + "'", 0);
  }
  const Millis days = sys_days{ymd}.time_since_epoch().count();
  return days * 24 * kMillisPerHour + hour * kMillisPerHour + minute * Millis{60'000} + second * Millis{1000} +
         millis - offset;
}

std::string FormatTimestamp(Millis t) {
  const Millis day_ms = 24 * kMillisPerHour;
  Millis days = t / day_ms;
  Millis rest = t % day_ms;
  if (rest < 0) {
    rest += day_ms;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const int h = static_cast<int>(rest / kMillisPerHour);
  const int m = static_cast<int>(rest / 60'000 % 60);
  const int s = static_cast<int>(rest / 1000 % 60);
  const int ms = static_cast<int>(rest % 1000);
  std::string out = fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}", static_cast<int>(ymd.year()),
                                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, m, s);
  if (ms != 0) out += fmt::format(".{:03}", ms);
  return out + "Z";
}

// Calendar designators use the conventional 365-day year and 30-day month;
// operating-hour counters in practice only use days and smaller units.
double ParseDurationHours(const std::string& raw) {
  const std::string s = Trim(raw);
  if (s.size() < 2 || s[0] != 'P') throw ParseError("malformed duration '" + raw + "'", 0);
  double hours = 0.0;
  bool time_part = false;
  bool any = false;
  std::size_t pos = 1;
  while (pos < s.size()) {
    if (s[pos] == 'T') {
      if (time_part) throw ParseError("malformed duration '" + raw + "'", 0);
      time_part = true;
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == ',')) {
      ++pos;
    }
    if (pos == start || pos == s.size()) throw ParseError("malformed duration '" + raw + "'", 0);
    std::string number = s.substr(start, pos - start);
    std::replace(number.begin(), number.end(), ',', '.');
    const double v = Number(number, "duration");
    const char unit = s[pos++];
    double scale = 0.0;
    if (!time_part) {
      switch (unit) {
        case 'Y': scale = 365 * 24.0; break;
        case 'M': scale = 30 * 24.0; break;
        case 'W': scale = 7 * 24.0; break;
        case 'D': scale = 24.0; break;
        default: break;
      }
    } else {
      switch (unit) {
        case 'H': scale = 1.0; break;
        case 'M': scale = 1.0 / 60.0; break;
        case 'S': scale = 1.0 / 3600.0; break;
        default: break;
      }
    }
    if (scale == 0.0) throw ParseError("malformed duration '" + raw + "'", 0);
    hours += v * scale;
    any = true;
  }
  if (!any) throw ParseError("malformed duration '" + raw + "'", 0);
  return hours;
}

std::string FormatDurationHours(double hours) {
  const double days = std::floor(hours / 24.0);
  const double rest = hours - 24.0 * days;
  std::string out = "P";
  if (days > 0) out += fmt::format("{}D", days);
  if (rest > 0 || days == 0) out += fmt::format("T{}H", rest);
  return out;
}

std::vector<EquipmentSnapshot> ParseAempFleet(const std::string& xml) {
  pt::ptree doc;
  std::istringstream in(xml);
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed AEMP XML: " + e.message(), e.line());
  }
  const pt::ptree* fleet = Child(doc, "Fleet");
  if (fleet == nullptr) throw ParseError("AEMP XML has no Fleet element", 0);
  std::optional<Millis> fleet_time;
  if (const auto t = Attribute(*fleet, "snapshotTime")) fleet_time = ParseTimestamp(*t);

  std::vector<EquipmentSnapshot> out;
  for (const auto& [name, eq] : *fleet) {
    if (LocalName(name) != "Equipment") continue;
    EquipmentSnapshot s;
    if (const pt::ptree* header = Child(eq, "EquipmentHeader")) {
      s.make = ChildText(*header, "Make").value_or("");
      s.model = ChildText(*header, "Model").value_or("");
      s.equipment_id = ChildText(*header, "EquipmentID").value_or("");
      s.serial_number = ChildText(*header, "SerialNumber").value_or("");
    }
    if (const pt::ptree* loc = Child(eq, "Location")) {
      if (const auto t = Attribute(*loc, "datetime")) s.location_time = ParseTimestamp(*t);
      if (const auto v = ChildText(*loc, "Latitude")) s.latitude = Number(*v, "Latitude");
      if (const auto v = ChildText(*loc, "Longitude")) s.longitude = Number(*v, "Longitude");
    }
    if (const pt::ptree* hours = Child(eq, "CumulativeOperatingHours")) {
      if (const auto v = ChildText(*hours, "Hour")) s.operating_hours = ParseDurationHours(*v);
    }
    if (const pt::ptree* fuel = Child(eq, "FuelUsed")) {
      const std::string units = Lower(ChildText(*fuel, "FuelUnits").value_or("liter"));
      if (units != "liter" && units != "liters" && units != "litre" && units != "litres") {
        throw UnitError(fmt::format("equipment {}: fuel reported in '{}', expected liter", s.equipment_id, units));
      }
      if (const auto t = Attribute(*fuel, "datetime")) s.fuel_time = ParseTimestamp(*t);
      if (const auto v = ChildText(*fuel, "FuelConsumed")) s.fuel_consumed = Number(*v, "FuelConsumed");
    }
    s.missing_fuel = !s.fuel_consumed.has_value();
    if (const pt::ptree* dist = Child(eq, "Distance")) {
      const std::string units = Lower(ChildText(*dist, "OdometerUnits").value_or("kilometer"));
      if (units != "kilometer" && units != "kilometers" && units != "kilometre" && units != "kilometres") {
        throw UnitError(fmt::format("equipment {}: odometer reported in '{}', expected kilometer", s.equipment_id, units));
      }
      if (const auto v = ChildText(*dist, "Odometer")) s.odometer_km = Number(*v, "Odometer");
    }
    if (s.fuel_time) {
      s.timestamp = *s.fuel_time;
    } else if (s.location_time) {
      s.timestamp = *s.location_time;
    } else if (fleet_time) {
      s.timestamp = *fleet_time;
    } else {
      throw ParseError(fmt::format("equipment {} has no timestamp", s.equipment_id), 0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string FormatAempFleet(const std::vector<EquipmentSnapshot>& snapshots) {
  pt::ptree fleet;
  fleet.put("<xmlattr>.version", "0");
  // Snapshots without their own reading times inherit the fleet time.
  for (const auto& s : snapshots) {
    if (!s.fuel_time && !s.location_time) {
      fleet.put("<xmlattr>.snapshotTime", FormatTimestamp(s.timestamp));
      break;
    }
  }
  fleet.put("<xmlattr>.xmlns", "http://schemas.aemp.org/fleet");
  for (const auto& s : snapshots) {
    pt::ptree eq;
    pt::ptree header;
    header.put("Make", s.make);
    header.put("Model", s.model);
    header.put("EquipmentID", s.equipment_id);
    header.put("SerialNumber", s.serial_number);
    eq.add_child("EquipmentHeader", header);
    if (s.location_time || s.latitude || s.longitude) {
      pt::ptree loc;
      if (s.location_time) loc.put("<xmlattr>.datetime", FormatTimestamp(*s.location_time));
      if (s.latitude) loc.put("Latitude", fmt::format("{}", *s.latitude));
      if (s.longitude) loc.put("Longitude", fmt::format("{}", *s.longitude));
      eq.add_child("Location", loc);
    }
    if (s.operating_hours) {
      pt::ptree hours;
      hours.put("Hour", FormatDurationHours(*s.operating_hours));
      eq.add_child("CumulativeOperatingHours", hours);
    }
    if (s.fuel_consumed || s.fuel_time) {
      pt::ptree fuel;
      if (s.fuel_time) fuel.put("<xmlattr>.datetime", FormatTimestamp(*s.fuel_time));
      fuel.put("FuelUnits", "liter");
      if (s.fuel_consumed) fuel.put("FuelConsumed", fmt::format("{}", *s.fuel_consumed));
      eq.add_child("FuelUsed", fuel);
    }
    if (s.odometer_km) {
      pt::ptree dist;
      dist.put("OdometerUnits", "kilometer");
      dist.put("Odometer", fmt::format("{}", *s.odometer_km));
      eq.add_child("Distance", dist);
    }
    fleet.add_child("Equipment", eq);
  }
  pt::ptree doc;
  doc.add_child("Fleet", fleet);
  std::ostringstream out;
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

std::vector<EquipmentSnapshot> Deduplicate(std::vector<EquipmentSnapshot> snapshots) {
  std::stable_sort(snapshots.begin(), snapshots.end(), [](const auto& a, const auto& b) {
    return std::tie(a.equipment_id, a.timestamp) < std::tie(b.equipment_id, b.timestamp);
  });
  snapshots.erase(std::unique(snapshots.begin(), snapshots.end(),
                              [](const auto& a, const auto& b) {
                                return a.equipment_id == b.equipment_id && a.timestamp == b.timestamp;
                              }),
                  snapshots.end());
  return snapshots;
}

std::vector<std::string> EquipmentIds(const std::vector<EquipmentSnapshot>& snapshots) {
  std::vector<std::string> ids;
  for (const auto& s : snapshots) {
    if (std::find(ids.begin(), ids.end(), s.equipment_id) == ids.end()) ids.push_back(s.equipment_id);
  }
  return ids;
}

}  // namespace bowser::telemetry
