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

// Equipment telematics: AEMP v1.2 fleet snapshots, bucketing of cumulative
// fuel counters into fixed-length consumption buckets, and compound-Poisson
// fitting of the buckets that fall inside a caller-supplied activity window.
//
// All instants are milliseconds since the Unix epoch, UTC. Timestamps
// without a zone designator are read as UTC.

#ifndef BOWSER_TELEMETRY_HPP_
#define BOWSER_TELEMETRY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bowser/stochproc.hpp"

namespace bowser::telemetry {

using Millis = std::int64_t;

// ISO 8601 date-time ("2016-06-18T11:37:59.807", optional "Z" or +hh:mm).
// Throws ParseError on malformed text.
Millis ParseTimestamp(const std::string& text);
std::string FormatTimestamp(Millis t);

// ISO 8601 duration ("P28DT7H", "PT1.5H") in hours. Throws ParseError.
double ParseDurationHours(const std::string& text);
std::string FormatDurationHours(double hours);

struct EquipmentSnapshot {
  std::string make;
  std::string model;
  std::string equipment_id;
  std::string serial_number;
  // Fuel reading time when present, else location time, else the fleet
  // snapshot time.
  Millis timestamp = 0;
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::optional<Millis> location_time;
  std::optional<double> operating_hours;
  std::optional<double> fuel_consumed;  // liters, cumulative
  std::optional<Millis> fuel_time;
  std::optional<double> odometer_km;
  bool missing_fuel = false;  // the Equipment element had no FuelUsed
};

// One snapshot per Equipment element of the Fleet document. Unknown
// elements are ignored and namespace prefixes are disregarded.
// Throws ParseError for malformed XML (with the line when known) and
// UnitError for fuel or odometer units other than liters and kilometers.
std::vector<EquipmentSnapshot> ParseAempFleet(const std::string& xml);

// Inverse of ParseAempFleet for the fields it owns.
std::string FormatAempFleet(const std::vector<EquipmentSnapshot>& snapshots);

// Sorts by (equipment id, timestamp) and drops repeated (id, timestamp)
// pairs, keeping the first occurrence.
std::vector<EquipmentSnapshot> Deduplicate(std::vector<EquipmentSnapshot> snapshots);

// Equipment ids in first-appearance order.
std::vector<std::string> EquipmentIds(const std::vector<EquipmentSnapshot>& snapshots);

struct Bucket {
  Millis start = 0;
  int minutes = 15;
  bool missing = true;
  int consumption = 0;  // liters, rounded; meaningful only when !missing
};

struct BucketOptions {
  int minutes = 15;
  // Interpolation is not trusted across silences longer than this; buckets
  // touching such a gap are missing. Zero disables the check.
  int max_gap_minutes = 0;
};

// Per-bucket consumption of one asset. Buckets are aligned to multiples of
// the bucket length since the epoch and span the readings' time range; a
// bucket is covered when both of its boundaries lie within that range, and
// its consumption is the difference of the cumulative counter at the
// boundaries (linear interpolation between the straddling readings), rounded
// to the nearest liter. Snapshots without fuel readings are ignored.
// Throws InvalidArgumentError for fewer than two readings or mixed
// equipment ids, and DataIntegrityError when the counter decreases.
std::vector<Bucket> BucketConsumption(const std::vector<EquipmentSnapshot>& snapshots,
                                      const BucketOptions& options = {});

// Caller-supplied selection of representative buckets. Text form: clauses
// separated by ';' -- "from/to" instant ranges (any number, union),
// "days=mon-fri" or "days=mon,wed,sat", and "hours=07:00-17:00" (bucket
// start time of day, UTC). An empty text selects every bucket.
struct ActivityWindow {
  std::vector<std::pair<Millis, Millis>> ranges;
  unsigned day_mask = 0x7f;  // bit 0 = Monday
  int from_minute = 0;
  int to_minute = 24 * 60;
  bool Contains(const Bucket& bucket) const;
};
ActivityWindow ParseActivityWindow(const std::string& text);

struct AssetFit {
  stochproc::CompoundPoissonFit fit;
  int buckets_used = 0;
  Millis first = 0;  // start of the first selected bucket
  Millis last = 0;   // end of the last selected bucket
};

inline constexpr int kMinimumFitBuckets = 30;

// Compound-Poisson maximum-likelihood fit over the non-missing buckets
// inside `window`. Missing buckets are never imputed. Throws
// InsufficientDataError when fewer than 30 buckets qualify.
AssetFit FitAssetDistribution(const std::vector<Bucket>& buckets, const ActivityWindow& window);

// Tab-separated "start consumption" lines, "NA" for missing buckets.
std::string FormatBuckets(const std::vector<Bucket>& buckets);

// Report row: id, model, lambda, jump distribution, log-likelihood, data
// window, bucket count.
std::string FormatFitReport(const std::vector<std::pair<EquipmentSnapshot, AssetFit>>& fits);

}  // namespace bowser::telemetry

#endif  // BOWSER_TELEMETRY_HPP_
