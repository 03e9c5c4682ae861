#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pwvcast/errors.hpp"
#include "pwvcast/time_series.hpp"

using namespace pwvcast;

namespace {

TimeSeries ingest(const std::string& text, SeriesKind kind = SeriesKind::kPwv,
                  std::optional<StationMeta> station = std::nullopt) {
  std::istringstream in(text);
  return ingest_csv(in, kind, station);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    ingest(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("calendar helpers") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_iso8601("2022-01-01T00:00:00Z") == 1640995200);
  CHECK(parse_iso8601("2024-02-29T12:30:15Z") == 1709209815);
  CHECK_FALSE(parse_iso8601("2023-02-29T00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2022-01-01 00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2022-01-01T24:00:00Z").has_value());
  CHECK(format_iso8601(1709209815) == "2024-02-29T12:30:15Z");
  CHECK(format_iso8601(-300) == "1969-12-31T23:55:00Z");
  CHECK(day_of_year_utc(1640995200) == 1.0);
  CHECK(day_of_year_utc(1640995200 + 43200) == 1.5);
  CHECK(day_of_year_utc(*parse_iso8601("2024-12-31T00:00:00Z")) == 366.0);
}

TEST_CASE("ingest: consecutive rows give a gap-free series") {
  const TimeSeries s = ingest("timestamp,value\n1000200,1.5\n1000500,2.5\n1000800,3.5\n");
  REQUIRE(s.size() == 3);
  CHECK(s.start_epoch_s() == 1000200);
  CHECK(s.present_count() == 3);
  CHECK(*s[2] == 3.5);
}

TEST_CASE("ingest: skipped slot becomes a gap") {
  const TimeSeries s = ingest("timestamp,value\n2022-01-01T00:00:00Z,1\n2022-01-01T00:10:00Z,3\n");
  REQUIRE(s.size() == 3);
  CHECK(s[0].has_value());
  CHECK_FALSE(s[1].has_value());
  CHECK(s[2].has_value());
}

TEST_CASE("ingest: misaligned timestamp raises AlignmentError naming the row") {
  const std::string text = "timestamp,value\n0,1\n300,1\n750,1\n";
  CHECK_THROWS_AS(ingest(text), AlignmentError);
  CHECK(parse_error_line(text) == 4);
}

TEST_CASE("ingest: malformed input") {
  CHECK(parse_error_line("time,value\n0,1\n") == 1);
  CHECK(parse_error_line("timestamp,value\n0,abc\n") == 2);
  CHECK(parse_error_line("timestamp,value\n0,1\n300,\n") == 3);
  CHECK(parse_error_line("timestamp,value\n0,1,2\n") == 2);
  CHECK(parse_error_line("timestamp,value\n0,1\n2022-01-01T00:00:00Z,1\n") == 3);  // format is per file
  CHECK(parse_error_line("timestamp,value\n2022-13-01T00:00:00Z,1\n") == 2);
  CHECK(parse_error_line("timestamp,value\n300,1\n300,2\n") == 3);   // duplicate
  CHECK(parse_error_line("timestamp,value\n600,1\n300,2\n") == 3);   // unsorted
  CHECK(parse_error_line("timestamp,value\n0,nan\n") == 2);
  CHECK(parse_error_line("") == 1);
  CHECK(ingest("timestamp,value\n").empty());
  CHECK(ingest("timestamp,value\r\n0,1\r\n\r\n").size() == 1);
}

TEST_CASE("ingest: ZWD requires a station and is converted") {
  CHECK_THROWS_AS(ingest("timestamp,value\n0,100\n", SeriesKind::kZwd), ConfigError);
  const auto t = *parse_iso8601("2022-01-28T00:00:00Z");
  const TimeSeries s =
      ingest("timestamp,value\n" + std::to_string(t) + ",100\n", SeriesKind::kZwd, StationMeta(0, 0));
  CHECK(*s[0] == doctest::Approx(16.49).epsilon(1e-15));
  CHECK(parse_series_kind("zwd") == SeriesKind::kZwd);
  CHECK_THROWS_AS(parse_series_kind("ZTD"), ConfigError);
}

TEST_CASE("export then ingest reproduces the series exactly") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 400;
    std::vector<std::optional<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != 0 && i + 1 != n && rng() % 5 == 0) continue;  // endpoints stay present
      v[i] = std::ldexp(static_cast<double>(rng() >> 11), -40) - 1000.0;
    }
    const TimeSeries s(1640995200 + 300 * static_cast<std::int64_t>(rng() % 1000), v);
    for (auto fmt : {TimestampFormat::kIso8601, TimestampFormat::kEpochSeconds}) {
      std::stringstream buf;
      write_csv(s, buf, fmt);
      std::istringstream in(buf.str());
      CHECK(ingest_csv(in, SeriesKind::kPwv) == s);
    }
  }
}

TEST_CASE("segment_gaps") {
  const TimeSeries none(0, {1.0, 2.0, 3.0});
  auto segs = segment_gaps(none);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0] == none);

  const TimeSeries two(0, {1.0, 2.0, std::nullopt, 4.0});
  segs = segment_gaps(two);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].size() == 2);
  CHECK(segs[1].size() == 1);
  CHECK(segs[1].start_epoch_s() == 900);

  CHECK(segment_gaps(TimeSeries{}).empty());
  CHECK(segment_gaps(TimeSeries(0, {std::nullopt, std::nullopt})).empty());
}

TEST_CASE("segment_gaps matches a marking-scan oracle and reconstructs the input") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 300;
    const double density = static_cast<double>(rng() % 50) / 100.0;
    std::vector<std::optional<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<double>(rng() % 1000) / 1000.0 >= density) v[i] = static_cast<double>(i);
    }
    const TimeSeries s(12000, v);
    const auto segs = segment_gaps(s);
    const auto runs = oracle::present_runs(s);
    REQUIRE(segs.size() == runs.size());
    std::vector<std::optional<double>> rebuilt(n);
    for (std::size_t k = 0; k < segs.size(); ++k) {
      CHECK(segs[k].start_epoch_s() == s.epoch_at(runs[k].begin));
      CHECK(segs[k].size() == runs[k].length);
      CHECK(segs[k].present_count() == segs[k].size());
      for (std::size_t j = 0; j < segs[k].size(); ++j) rebuilt[runs[k].begin + j] = segs[k][j];
    }
    CHECK(TimeSeries(12000, rebuilt) == s);
  }
}

TEST_CASE("TimeSeries invariants") {
  CHECK_THROWS_AS(TimeSeries(0, {1.0, INFINITY}), DomainError);
  CHECK_THROWS_AS(TimeSeries(0, {1.0}, 0), DomainError);
  const TimeSeries s(600, {1.0, 2.0});
  CHECK(s.index_of(900) == 1u);
  CHECK_FALSE(s.index_of(1200).has_value());
  CHECK_FALSE(s.index_of(750).has_value());
  CHECK_FALSE(s.index_of(300).has_value());
}
