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
#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/telemetry.hpp"

namespace bowser::telemetry {
namespace {

constexpr Millis kMinute = 60'000;
constexpr Millis kDay = 24 * 60 * kMinute;

struct Reading {
  Millis t;
  double fuel;
};

Millis FloorTo(Millis t, Millis step) {
  Millis q = t / step;
  if (t % step != 0 && t < 0) --q;
  return q * step;
}

Millis CeilTo(Millis t, Millis step) {
  const Millis f = FloorTo(t, step);
  return f == t ? t : f + step;
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  return s.substr(begin, s.find_last_not_of(" \t") - begin + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(Trim(item));
  return out;
}

// Monday = 0.
int Weekday(Millis t) {
  const std::chrono::sys_days d{std::chrono::days{FloorTo(t, kDay) / kDay}};
  return static_cast<int>(std::chrono::weekday{d}.iso_encoding()) - 1;
}

int ParseDay(const std::string& text) {
  static const std::array<const char*, 7> kNames = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (int d = 0; d < 7; ++d) {
    if (lower.rfind(kNames[d], 0) == 0) return d;
  }
  throw ParseError("activity window: unknown day '" + text + "'", 0);
}

int ParseClock(const std::string& text) {
  int h = 0;
  int m = 0;
  char colon = 0;
  std::istringstream in(text);
  if (!(in >> h >> colon >> m) || colon != ':' || !in.eof() || h < 0 || h > 24 || m < 0 || m > 59 ||
      h * 60 + m > 24 * 60) {
    throw ParseError("activity window: malformed time of day '" + text + "'", 0);
  }
  return h * 60 + m;
}

}  // namespace

std::vector<Bucket> BucketConsumption(const std::vector<EquipmentSnapshot>& snapshots, const BucketOptions& options) {
  if (options.minutes < 1) throw InvalidArgumentError("bucket length must be at least one minute");
  if (options.max_gap_minutes < 0) throw InvalidArgumentError("maximum gap must be nonnegative");
  std::vector<Reading> readings;
  for (const auto& s : snapshots) {
    if (!s.equipment_id.empty() && !snapshots.front().equipment_id.empty() &&
        s.equipment_id != snapshots.front().equipment_id) {
      throw InvalidArgumentError("bucketing mixes equipment " + snapshots.front().equipment_id + " and " +
                                 s.equipment_id);
    }
    if (s.fuel_consumed) readings.push_back({s.timestamp, *s.fuel_consumed});
  }
  std::stable_sort(readings.begin(), readings.end(), [](const Reading& a, const Reading& b) { return a.t < b.t; });
  // Repeated readings of the same instant must agree; keep one.
  std::vector<Reading> unique;
  for (const auto& r : readings) {
    if (!unique.empty() && unique.back().t == r.t) {
      if (unique.back().fuel != r.fuel) {
        throw DataIntegrityError(fmt::format("two fuel readings at {}: {} and {}", FormatTimestamp(r.t),
                                             unique.back().fuel, r.fuel));
      }
      continue;
    }
    unique.push_back(r);
  }
  if (unique.size() < 2) throw InvalidArgumentError("bucketing needs at least two fuel readings");
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
    if (unique[i + 1].fuel < unique[i].fuel) {
      throw DataIntegrityError(fmt::format("cumulative fuel decreases from {} at {} to {} at {}", unique[i].fuel,
                                           FormatTimestamp(unique[i].t), unique[i + 1].fuel,
                                           FormatTimestamp(unique[i + 1].t)));
    }
  }

  const Millis step = options.minutes * kMinute;
  const Millis max_gap = options.max_gap_minutes * kMinute;
  const Millis first = unique.front().t;
  const Millis last = unique.back().t;

  // Cumulative counter at instant b (first <= b <= last) and whether the
  // readings straddling b are close enough to trust the interpolation.
  std::size_t seg = 0;
  auto counter = [&](Millis b, bool& trusted) {
    while (seg + 2 < unique.size() && unique[seg + 1].t < b) ++seg;
    const Reading& lo = unique[seg];
    const Reading& hi = unique[seg + 1];
    if (max_gap > 0 && hi.t - lo.t > max_gap && b > lo.t && b < hi.t) trusted = false;
    if (b <= lo.t) return lo.fuel;
    if (b >= hi.t) return hi.fuel;
    return lo.fuel + (hi.fuel - lo.fuel) * static_cast<double>(b - lo.t) / static_cast<double>(hi.t - lo.t);
  };
  // Long silences strictly inside a bucket also void it.
  auto gap_inside = [&](Millis b0, Millis b1) {
    if (max_gap == 0) return false;
    for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
      if (unique[i + 1].t <= b0) continue;
      if (unique[i].t >= b1) break;
      if (unique[i + 1].t - unique[i].t > max_gap) return true;
    }
    return false;
  };

  std::vector<Bucket> out;
  for (Millis b0 = FloorTo(first, step); b0 < CeilTo(last, step); b0 += step) {
    Bucket bucket;
    bucket.start = b0;
    bucket.minutes = options.minutes;
    const Millis b1 = b0 + step;
    if (b0 >= first && b1 <= last && !gap_inside(b0, b1)) {
      bool trusted = true;
      const double f0 = counter(b0, trusted);
      const double f1 = counter(b1, trusted);
      if (trusted) {
        // Rounding the counter (not the differences) makes bucket sums
        // telescope: over any run of buckets the sum stays within one liter
        // of the true cumulative delta, however long the run.
        bucket.consumption = static_cast<int>(std::llround(f1) - std::llround(f0));
        bucket.missing = false;
      }
    }
    out.push_back(bucket);
  }
  return out;
}

bool ActivityWindow::Contains(const Bucket& bucket) const {
  const Millis end = bucket.start + bucket.minutes * kMinute;
  if (!ranges.empty()) {
    const bool inside = std::any_of(ranges.begin(), ranges.end(), [&](const auto& r) {
      return bucket.start >= r.first && end <= r.second;
    });
    if (!inside) return false;
  }
  if ((day_mask & (1u << Weekday(bucket.start))) == 0) return false;
  const int minute = static_cast<int>((bucket.start - FloorTo(bucket.start, kDay)) / kMinute);
  if (from_minute <= to_minute) return minute >= from_minute && minute < to_minute;
  return minute >= from_minute || minute < to_minute;  // overnight window
}

ActivityWindow ParseActivityWindow(const std::string& text) {
  ActivityWindow w;
  for (const auto& clause : Split(text, ';')) {
    if (clause.empty()) continue;
    if (clause.rfind("days=", 0) == 0) {
      w.day_mask = 0;
      for (const auto& item : Split(clause.substr(5), ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
          w.day_mask |= 1u << ParseDay(item);
          continue;
        }
        const int from = ParseDay(item.substr(0, dash));
        const int to = ParseDay(item.substr(dash + 1));
        for (int d = from;; d = (d + 1) % 7) {
          w.day_mask |= 1u << d;
          if (d == to) break;
        }
      }
    } else if (clause.rfind("hours=", 0) == 0) {
      const std::string span = clause.substr(6);
      const auto dash = span.find('-');
      if (dash == std::string::npos) throw ParseError("activity window: hours needs HH:MM-HH:MM", 0);
      w.from_minute = ParseClock(span.substr(0, dash));
      w.to_minute = ParseClock(span.substr(dash + 1));
    } else if (const auto slash = clause.find('/'); slash != std::string::npos) {
      const Millis from = ParseTimestamp(clause.substr(0, slash));
      const Millis to = ParseTimestamp(clause.substr(slash + 1));
      if (to <= from) throw ParseError("activity window: empty range '" + clause + "'", 0);
      w.ranges.emplace_back(from, to);
    } else {
      throw ParseError("activity window: unrecognized clause '" + clause + "'", 0);
    }
  }
  return w;
}

AssetFit FitAssetDistribution(const std::vector<Bucket>& buckets, const ActivityWindow& window) {
  AssetFit out;
  std::vector<int> samples;
  for (const auto& b : buckets) {
    if (b.missing || !window.Contains(b)) continue;
    if (samples.empty()) out.first = b.start;
    out.last = b.start + b.minutes * kMinute;
    samples.push_back(b.consumption);
  }
  if (static_cast<int>(samples.size()) < kMinimumFitBuckets) {
    throw InsufficientDataError(fmt::format("only {} active buckets in the window; at least {} are needed",
                                            samples.size(), kMinimumFitBuckets));
  }
  out.buckets_used = static_cast<int>(samples.size());
  out.fit = stochproc::FitCompoundPoissonMle(samples);
  return out;
}

std::string FormatBuckets(const std::vector<Bucket>& buckets) {
  std::string out = "bucket_start\tconsumption\n";
  for (const auto& b : buckets) {
    out += FormatTimestamp(b.start) + "\t" + (b.missing ? std::string("NA") : std::to_string(b.consumption)) + "\n";
  }
  return out;
}

std::string FormatFitReport(const std::vector<std::pair<EquipmentSnapshot, AssetFit>>& fits) {
  std::string out = "equipment_id\tmake\tmodel\tlambda\tjump_distribution\tlog_likelihood\tbuckets\twindow_start"
                    "\twindow_end\tdegenerate\n";
  for (const auto& [s, f] : fits) {
    out += fmt::format("{}\t{}\t{}\t{:.6g}\tPoisson({:.6g})\t{:.6f}\t{}\t{}\t{}\t{}\n", s.equipment_id,
                       s.make.empty() ? "-" : s.make, s.model.empty() ? "-" : s.model, f.fit.lambda, f.fit.jump_mean,
                       f.fit.log_likelihood, f.buckets_used, FormatTimestamp(f.first), FormatTimestamp(f.last),
                       f.fit.degenerate ? "yes" : "no");
  }
  return out;
}

}  // namespace bowser::telemetry
