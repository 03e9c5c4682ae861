#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pwvcast/errors.hpp"
#include "pwvcast/pwv_convert.hpp"
#include "pwvcast/time_series.hpp"

using namespace pwvcast;

namespace {
double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("station constructor validates latitude and height") {
  CHECK_THROWS_AS(StationMeta(90.5, 0.0), DomainError);
  CHECK_THROWS_AS(StationMeta(-91.0, 0.0), DomainError);
  CHECK_THROWS_AS(StationMeta(10.0, -600.0), DomainError);
  CHECK_THROWS_AS(StationMeta(std::nan(""), 0.0), DomainError);
  CHECK_NOTHROW(StationMeta(90.0, -500.0));
  CHECK_NOTHROW(StationMeta(-90.0, 8848.0));
}

TEST_CASE("h_fac and height correction") {
  CHECK(StationMeta(1.3, 0).h_fac() == 1.48);
  CHECK(StationMeta(-1.3, 0).h_fac() == 1.25);
  CHECK(StationMeta(0.0, 0).h_fac() == 1.48);
  CHECK(StationMeta(0.0, 100.0).height_correction() == -2.38e-6 * 100.0);
}

TEST_CASE("pi_factor anchors") {
  // Equator, sea level, DoY 28: -1e-4 * cos(0) + 0.165.
  CHECK(pi_factor(StationMeta(0, 0), 28.0).value == doctest::Approx(0.1649).epsilon(1e-15));
  CHECK(pi_factor(StationMeta(1.30, 0), 28.0).value == doctest::Approx(0.16484872469540487173).epsilon(1e-12));
  // Frozen from a 50-digit evaluation.
  CHECK(rel_err(pi_factor(StationMeta(-45, 100), 210.0).value, 0.15379731975922546814) < 1e-12);
  CHECK(pi_factor(StationMeta(1.30, 0), 28.0).day_of_year == 28.0);
}

TEST_CASE("pi_factor matches the multiprecision oracle on random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lat(-90, 90), doy(1, 366.999), h(-500, 5000);
  for (int k = 0; k < 500; ++k) {
    const double la = lat(rng), d = doy(rng), hh = h(rng);
    CHECK(rel_err(pi_factor(StationMeta(la, hh), d).value, oracle::pi_factor(la, hh, d)) < 1e-12);
  }
}

TEST_CASE("pi_factor rejects out-of-range day of year") {
  const StationMeta s(1.3, 15);
  CHECK_THROWS_AS(pi_factor(s, 0.999), DomainError);
  CHECK_THROWS_AS(pi_factor(s, 367.0), DomainError);
  CHECK_THROWS_AS(pi_factor(s, std::nan("")), DomainError);
  CHECK_NOTHROW(pi_factor(s, 1.0));
  CHECK_NOTHROW(pi_factor(s, 366.99));
}

TEST_CASE("latitude sign flip changes PI only through the sgn term") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(0.1, 85), doy(1, 366);
  for (int k = 0; k < 200; ++k) {
    const double la = lat(rng), d = doy(rng), hf = 1.48;
    const double north = detail::pi_formula(la, hf, 0.0, d);
    const double south = detail::pi_formula(-la, hf, 0.0, d);
    const double expected = 2 * 1.7e-5 * std::pow(la, hf) * std::cos(2 * M_PI * (d - 28) / 365.25);
    CHECK(south - north == doctest::Approx(expected).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("PI is periodic in day of year with period 365.25") {
  for (double d : {1.0, 28.0, 100.5, 200.25, 366.0}) {
    const double a = detail::pi_formula(37.0, 1.48, -1e-4, d);
    const double b = detail::pi_formula(37.0, 1.48, -1e-4, d + 365.25);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("zwd_to_pwv") {
  const PiFactor pi{0.1649, 28};
  CHECK(zwd_to_pwv(0.0, pi) == 0.0);
  CHECK(zwd_to_pwv(100.0, pi) == doctest::Approx(16.49).epsilon(1e-15));
  CHECK_THROWS_AS(zwd_to_pwv(-1.0, pi), DomainError);
  CHECK_THROWS_AS(zwd_to_pwv(INFINITY, pi), DomainError);

  // NTUS latitude with a user-supplied height of 15 m, DoY 100; frozen 50-digit product.
  const auto ntus = pi_factor(StationMeta(1.30, 15.0, "NTUS"), 100.0);
  CHECK(rel_err(zwd_to_pwv(250.0, ntus), 41.224325288135254125) < 1e-12);

  for (double a : {0.5, 2.0, 3.7, 1e3}) {
    CHECK(zwd_to_pwv(a * 123.4, ntus) == doctest::Approx(a * zwd_to_pwv(123.4, ntus)).epsilon(1e-15));
  }
}

TEST_CASE("convert_series") {
  const StationMeta equator(0.0, 0.0);
  CHECK(convert_series(TimeSeries{}, equator).empty());

  const auto doy28 = *parse_iso8601("2022-01-28T00:00:00Z");
  const TimeSeries one(doy28, {100.0});
  const TimeSeries pwv = convert_series(one, equator);
  REQUIRE(pwv.size() == 1);
  CHECK(*pwv[0] == doctest::Approx(16.49).epsilon(1e-15));

  // One day across a midnight with a gap: each present sample uses its own DoY.
  const StationMeta ntus(1.30, 15.0);
  const auto start = *parse_iso8601("2022-04-09T12:00:00Z");
  std::vector<std::optional<double>> zwd;
  for (int i = 0; i < 288; ++i) zwd.emplace_back(200.0 + i * 0.1);
  zwd[100].reset();
  const TimeSeries day(start, zwd);
  const TimeSeries out = convert_series(day, ntus);
  REQUIRE(out.size() == day.size());
  CHECK(out.start_epoch_s() == day.start_epoch_s());
  CHECK_FALSE(out[100].has_value());
  for (std::size_t i = 0; i < day.size(); ++i) {
    if (!day[i]) continue;
    const double doy = 99.5 + static_cast<double>(i) * 300.0 / 86400.0;
    CHECK(rel_err(*out[i], *day[i] * oracle::pi_factor(1.30, 15.0, doy)) < 1e-12);
  }
  // Samples straddling midnight get different factors.
  const std::size_t before = 143, after = 144;  // 23:55 and 00:00
  CHECK(*out[before] / *day[before] != *out[after] / *day[after]);

  const TimeSeries negative(start, {1.0, -2.0});
  try {
    convert_series(negative, ntus);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("2022-04-09T12:05:00Z") != std::string::npos);
  }
}
