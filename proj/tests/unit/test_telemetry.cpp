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
#include <random>

#include <doctest.h>

#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "bowser/telemetry.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::telemetry;

namespace {

constexpr Millis kMin = 60'000;

EquipmentSnapshot Reading(const std::string& id, Millis t, std::optional<double> fuel) {
  EquipmentSnapshot s;
  s.equipment_id = id;
  s.make = "JCB";
  s.model = "JS130";
  s.timestamp = t;
  s.fuel_consumed = fuel;
  if (fuel) s.fuel_time = t;
  s.missing_fuel = !fuel;
  return s;
}

std::string Fleet(const std::string& equipment) {
  return "<?xml version=\"1.0\"?>\n<Fleet version=\"0\" snapshotTime=\"2016-06-18T16:00:00Z\" "
         "xmlns=\"http://schemas.aemp.org/fleet\">\n" +
         equipment + "</Fleet>\n";
}

std::string Equipment(const std::string& id, const std::string& fuel_block) {
  return "<Equipment><EquipmentHeader><Make>JCB</Make><Model>JS130</Model><EquipmentID>" + id +
         "</EquipmentID><SerialNumber>s</SerialNumber></EquipmentHeader>" + fuel_block + "</Equipment>\n";
}

std::string Fuel(const std::string& when, const std::string& liters, const std::string& units = "liter") {
  return "<FuelUsed datetime=\"" + when + "\"><FuelUnits>" + units + "</FuelUnits><FuelConsumed>" + liters +
         "</FuelConsumed></FuelUsed>";
}

// 2024-01-01 is a Monday.
const Millis kMonday = ParseTimestamp("2024-01-01T00:00:00Z");

}  // namespace

TEST_CASE("timestamps and durations") {
  CHECK(ParseTimestamp("1970-01-01T00:00:00Z") == 0);
  CHECK(ParseTimestamp("1970-01-02T00:00:01") == 86'401'000);
  CHECK(ParseTimestamp("2016-06-18T11:37:59.807") == ParseTimestamp("2016-06-18T11:37:59Z") + 807);
  CHECK(ParseTimestamp("2016-06-18T13:37:59+02:00") == ParseTimestamp("2016-06-18T11:37:59Z"));
  CHECK(FormatTimestamp(ParseTimestamp("2016-06-18T11:37:58Z")) == "2016-06-18T11:37:58Z");
  CHECK_THROWS_AS(ParseTimestamp("yesterday"), ParseError);
  CHECK(ParseDurationHours("P28DT7H") == doctest::Approx(679.0));
  CHECK(ParseDurationHours("PT1.5H") == doctest::Approx(1.5));
  CHECK(ParseDurationHours("PT30M") == doctest::Approx(0.5));
  CHECK(ParseDurationHours(FormatDurationHours(679.25)) == doctest::Approx(679.25));
  CHECK_THROWS_AS(ParseDurationHours("28 days"), ParseError);
}

TEST_CASE("the published sample snapshot parses field by field") {
  const auto snaps = ParseAempFleet(ReadFile(bowser::testing::DataPath("telemetry/aemp_sample.xml")));
  REQUIRE(snaps.size() == 1);
  const EquipmentSnapshot& s = snaps[0];
  CHECK(s.make == "JCB");
  CHECK(s.model == "JS130");
  CHECK(s.equipment_id == "Axxxxxx");
  CHECK(s.serial_number == "xxxxxxx");
  CHECK(*s.latitude == doctest::Approx(52.7990309));
  CHECK(*s.longitude == doctest::Approx(-2.2744561));
  CHECK(*s.location_time == ParseTimestamp("2016-06-18T11:37:59.807Z"));
  CHECK(*s.operating_hours == doctest::Approx(679.0));
  CHECK(*s.fuel_consumed == 4902.0);
  CHECK(s.timestamp == ParseTimestamp("2016-06-18T11:37:58Z"));
  CHECK(*s.odometer_km == 0.0);
  CHECK_FALSE(s.missing_fuel);
  const auto again = ParseAempFleet(FormatAempFleet(snaps));
  REQUIRE(again.size() == 1);
  CHECK(again[0].equipment_id == s.equipment_id);
  CHECK(again[0].timestamp == s.timestamp);
  CHECK(*again[0].fuel_consumed == *s.fuel_consumed);
  CHECK(*again[0].operating_hours == doctest::Approx(*s.operating_hours));
}

TEST_CASE("fleet parsing edge cases") {
  CHECK(ParseAempFleet(Fleet("")).empty());
  const auto no_fuel = ParseAempFleet(Fleet(Equipment("E1", "")));
  REQUIRE(no_fuel.size() == 1);
  CHECK(no_fuel[0].missing_fuel);
  CHECK_FALSE(no_fuel[0].fuel_consumed.has_value());
  CHECK(no_fuel[0].timestamp == ParseTimestamp("2016-06-18T16:00:00Z"));
  CHECK_THROWS_AS(ParseAempFleet(Fleet(Equipment("E1", Fuel("2016-06-18T10:00:00Z", "10", "gallon")))), UnitError);
  CHECK_THROWS_AS(ParseAempFleet("<Fleet><Equipment></Fleet>"), ParseError);
  CHECK_THROWS_AS(ParseAempFleet(Fleet(Equipment("E1", Fuel("2016-06-18T10:00:00Z", "ten")))), ParseError);

  // Repeated snapshots of the same reading collapse to one.
  const std::string doc = Fleet(Equipment("E2", Fuel("2016-06-18T10:00:00Z", "10")) +
                                Equipment("E1", Fuel("2016-06-18T10:00:00Z", "5")) +
                                Equipment("E2", Fuel("2016-06-18T10:00:00Z", "10")) +
                                Equipment("E2", Fuel("2016-06-18T09:00:00Z", "8")));
  const auto snaps = ParseAempFleet(doc);
  CHECK(snaps.size() == 4);
  CHECK(EquipmentIds(snaps) == std::vector<std::string>{"E2", "E1"});
  const auto unique = Deduplicate(snaps);
  REQUIRE(unique.size() == 3);
  CHECK(unique[0].equipment_id == "E1");
  CHECK(*unique[1].fuel_consumed == 8.0);
  CHECK(*unique[2].fuel_consumed == 10.0);
}

TEST_CASE("bucketing interpolates the cumulative counter") {
  const Millis t0 = kMonday + 8 * 60 * kMin;
  // 100 L at 08:00 and 106 L at 08:30: two covered buckets of 3 L.
  auto b = BucketConsumption({Reading("A", t0, 100.0), Reading("A", t0 + 30 * kMin, 106.0)});
  REQUIRE(b.size() == 2);
  CHECK_FALSE(b[0].missing);
  CHECK(b[0].consumption == 3);
  CHECK(b[1].consumption == 3);
  CHECK(b[0].start == t0);

  // Off-grid readings: only buckets with both boundaries inside are covered.
  b = BucketConsumption({Reading("A", t0 + 5 * kMin, 0.0), Reading("A", t0 + 40 * kMin, 35.0)});
  REQUIRE(b.size() == 3);
  CHECK(b[0].missing);
  CHECK_FALSE(b[1].missing);
  CHECK(b[1].consumption == 15);
  CHECK(b[2].missing);

  // Snapshots without fuel are ignored; the sparse gap voids its buckets.
  BucketOptions strict;
  strict.max_gap_minutes = 20;
  b = BucketConsumption({Reading("A", t0, 0.0), Reading("A", t0 + 15 * kMin, 2.0), Reading("A", t0 + 20 * kMin, std::nullopt),
                         Reading("A", t0 + 75 * kMin, 9.0), Reading("A", t0 + 90 * kMin, 10.0)},
                        strict);
  REQUIRE(b.size() == 6);
  CHECK_FALSE(b[0].missing);
  CHECK(b[1].missing);
  CHECK(b[4].missing);
  CHECK_FALSE(b[5].missing);
  CHECK(b[5].consumption == 1);
}

TEST_CASE("bucketing rejects inconsistent series") {
  const Millis t0 = kMonday;
  CHECK_THROWS_AS(BucketConsumption({Reading("A", t0, 10.0)}), InvalidArgumentError);
  CHECK_THROWS_AS(BucketConsumption({Reading("A", t0, 10.0), Reading("B", t0 + kMin, 11.0)}), InvalidArgumentError);
  CHECK_THROWS_AS(BucketConsumption({Reading("A", t0, 10.0), Reading("A", t0 + 15 * kMin, 9.0)}), DataIntegrityError);
  CHECK_THROWS_AS(BucketConsumption({Reading("A", t0, 10.0), Reading("A", t0, 11.0), Reading("A", t0 + kMin, 12.0)}),
                  DataIntegrityError);
}

TEST_CASE("bucket sums telescope to the counter delta") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EquipmentSnapshot> snaps;
    Millis t = kMonday + static_cast<Millis>(rng() % (24 * 60)) * kMin;
    double fuel = 1000.0;
    for (int i = 0; i < 40; ++i) {
      snaps.push_back(Reading("A", t, fuel));
      t += static_cast<Millis>(1 + rng() % 40) * kMin + static_cast<Millis>(rng() % 60'000);
      fuel += std::uniform_real_distribution<double>(0.0, 12.0)(rng);
    }
    // Independent interpolation of the counter.
    auto counter = [&](Millis b) {
      for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
        if (snaps[i + 1].timestamp >= b) {
          const double w = static_cast<double>(b - snaps[i].timestamp) /
                           static_cast<double>(snaps[i + 1].timestamp - snaps[i].timestamp);
          return *snaps[i].fuel_consumed + w * (*snaps[i + 1].fuel_consumed - *snaps[i].fuel_consumed);
        }
      }
      return *snaps.back().fuel_consumed;
    };
    const auto buckets = BucketConsumption(snaps);
    long sum = 0;
    Millis first = -1, end = -1;
    for (const auto& bk : buckets) {
      if (bk.missing) continue;
      CHECK(bk.consumption >= 0);
      const double exact = counter(bk.start + 15 * kMin) - counter(bk.start);
      CHECK(std::abs(bk.consumption - exact) < 1.0);
      if (first < 0) first = bk.start;
      end = bk.start + 15 * kMin;
      sum += bk.consumption;
    }
    REQUIRE(first >= 0);
    CHECK(std::abs(sum - (counter(end) - counter(first))) < 1.0);
  }
}

TEST_CASE("bucket series text form") {
  const Millis t0 = kMonday;
  const auto b = BucketConsumption({Reading("A", t0 + 5 * kMin, 0.0), Reading("A", t0 + 40 * kMin, 35.0)});
  const std::string text = FormatBuckets(b);
  CHECK(text.find("NA") != std::string::npos);
  CHECK(text.find(FormatTimestamp(t0 + 15 * kMin) + "\t15") != std::string::npos);
}

TEST_CASE("activity windows select by range, weekday and time of day") {
  const ActivityWindow w = ParseActivityWindow("days=mon-fri;hours=07:00-17:00");
  CHECK(w.day_mask == 0x1f);
  CHECK(w.from_minute == 420);
  CHECK(w.to_minute == 1020);
  Bucket b;
  b.start = kMonday + 7 * 60 * kMin;
  CHECK(w.Contains(b));
  b.start = kMonday + 17 * 60 * kMin;
  CHECK_FALSE(w.Contains(b));
  b.start = kMonday + 5 * 24 * 60 * kMin + 8 * 60 * kMin;  // Saturday 08:00
  CHECK_FALSE(w.Contains(b));
  const ActivityWindow r = ParseActivityWindow("2024-01-01T00:00:00Z/2024-01-01T01:00:00Z;days=mon,sat");
  REQUIRE(r.ranges.size() == 1);
  b.start = kMonday + 45 * kMin;
  CHECK(r.Contains(b));
  b.start = kMonday + 50 * kMin;  // ends after the range
  CHECK_FALSE(r.Contains(b));
  CHECK(ParseActivityWindow("").day_mask == 0x7f);
  CHECK_THROWS_AS(ParseActivityWindow("days=funday"), ParseError);
  CHECK_THROWS_AS(ParseActivityWindow("hours=7-17"), ParseError);
}

TEST_CASE("fitting recovers synthetic compound-Poisson consumption") {
  std::mt19937_64 rng(12);
  const double lambda = 1.04, mu = 1.01;
  std::poisson_distribution<int> events(lambda), jump(mu);
  std::vector<EquipmentSnapshot> snaps;
  double fuel = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    snaps.push_back(Reading("A", kMonday + i * 15 * kMin, fuel));
    for (int m = events(rng); m > 0; --m) fuel += jump(rng);
  }
  const auto buckets = BucketConsumption(snaps);
  REQUIRE(buckets.size() == static_cast<std::size_t>(n));
  const AssetFit fit = FitAssetDistribution(buckets, ActivityWindow{});
  CHECK(fit.buckets_used == n);
  CHECK(fit.fit.lambda == doctest::Approx(lambda).epsilon(0.1));
  CHECK(fit.fit.jump_mean == doctest::Approx(mu).epsilon(0.1));
  CHECK(fit.first == kMonday);
  CHECK(fit.last == kMonday + n * 15 * kMin);
  std::vector<int> samples;
  for (const auto& b : buckets) samples.push_back(b.consumption);
  CHECK(fit.fit.log_likelihood ==
        doctest::Approx(stochproc::CompoundPoissonLogLikelihood(samples, fit.fit.lambda, fit.fit.jump_mean)));

  // A weekday window uses only the selected buckets.
  const AssetFit weekdays = FitAssetDistribution(buckets, ParseActivityWindow("days=mon-fri"));
  CHECK(weekdays.buckets_used < n);
  CHECK(weekdays.buckets_used > n * 5 / 7 - 200);

  const std::string report = FormatFitReport({{snaps.front(), fit}});
  CHECK(report.find("Poisson(") != std::string::npos);
  CHECK(report.find("JS130") != std::string::npos);
}

TEST_CASE("fitting needs enough observed buckets") {
  std::vector<EquipmentSnapshot> snaps;
  for (int i = 0; i <= 29; ++i) snaps.push_back(Reading("A", kMonday + i * 15 * kMin, i * 2.0));
  const auto buckets = BucketConsumption(snaps);
  REQUIRE(buckets.size() == 29);
  CHECK_THROWS_AS(FitAssetDistribution(buckets, ActivityWindow{}), InsufficientDataError);
  snaps.push_back(Reading("A", kMonday + 30 * 15 * kMin, 60.0));
  CHECK(FitAssetDistribution(BucketConsumption(snaps), ActivityWindow{}).buckets_used == 30);

  std::vector<EquipmentSnapshot> idle;
  for (int i = 0; i <= 40; ++i) idle.push_back(Reading("A", kMonday + i * 15 * kMin, 7.0));
  CHECK(FitAssetDistribution(BucketConsumption(idle), ActivityWindow{}).fit.degenerate);
}
