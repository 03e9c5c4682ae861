#include "pwvcast/pwv_convert.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "pwvcast/errors.hpp"
#include "pwvcast/time_series.hpp"

namespace pwvcast {

namespace {

constexpr double kLatitudeCoefficient = 1.7e-5;
constexpr double kSeasonalOffset = 1.0e-4;
constexpr double kMeanFactor = 0.165;
constexpr double kLatitudeExponent = 1.65;
constexpr double kReferenceDay = 28.0;
constexpr double kYearLength = 365.25;

double signum(double x) noexcept { return static_cast<double>((x > 0.0) - (x < 0.0)); }

}  // namespace

StationMeta::StationMeta(double latitude_deg, double height_m, std::string station_id)
    : latitude_deg_(latitude_deg), height_m_(height_m), station_id_(std::move(station_id)) {
  if (!std::isfinite(latitude_deg) || latitude_deg < -90.0 || latitude_deg > 90.0) {
    throw DomainError("station latitude must lie in [-90, 90] degrees, got " +
                      std::to_string(latitude_deg));
  }
  if (!std::isfinite(height_m) || height_m < -500.0) {
    throw DomainError("station height must be a finite value >= -500 m, got " +
                      std::to_string(height_m));
  }
}

double StationMeta::h_fac() const noexcept {
  return latitude_deg_ < 0.0 ? kSouthernHfac : kNorthernHfac;
}

namespace detail {

double pi_formula(double latitude_deg, double h_fac, double height_correction,
                  double day_of_year) noexcept {
  const double abs_lat = std::abs(latitude_deg);
  const double seasonal_amplitude =
      -signum(latitude_deg) * kLatitudeCoefficient * std::pow(abs_lat, h_fac) - kSeasonalOffset;
  const double phase = 2.0 * std::numbers::pi * (day_of_year - kReferenceDay) / kYearLength;
  return seasonal_amplitude * std::cos(phase) + kMeanFactor -
         kLatitudeCoefficient * std::pow(abs_lat, kLatitudeExponent) + height_correction;
}

}  // namespace detail

PiFactor pi_factor(const StationMeta& station, double day_of_year) {
  if (!std::isfinite(day_of_year) || day_of_year < 1.0 || day_of_year >= 367.0) {
    throw DomainError("day of year must lie in [1, 367), got " + std::to_string(day_of_year));
  }
  const double value = detail::pi_formula(station.latitude_deg(), station.h_fac(),
                                          station.height_correction(), day_of_year);
  if (!std::isfinite(value)) throw DomainError("PI factor evaluated to a non-finite value");
  return {value, day_of_year};
}

double zwd_to_pwv(double zwd_mm, const PiFactor& pi) {
  if (!std::isfinite(zwd_mm) || zwd_mm < 0.0) {
    throw DomainError("ZWD must be finite and non-negative, got " + std::to_string(zwd_mm));
  }
  return pi.value * zwd_mm;
}

TimeSeries convert_series(const TimeSeries& zwd, const StationMeta& station) {
  std::vector<std::optional<double>> out;
  out.reserve(zwd.size());
  for (std::size_t i = 0; i < zwd.size(); ++i) {
    const auto& sample = zwd.samples()[i];
    if (!sample) {
      out.emplace_back();
      continue;
    }
    const std::int64_t epoch = zwd.epoch_at(i);
    try {
      out.emplace_back(zwd_to_pwv(*sample, pi_factor(station, day_of_year_utc(epoch))));
    } catch (const DomainError& e) {
      throw DomainError(format_iso8601(epoch) + ": " + e.what());
    }
  }
  return TimeSeries(zwd.start_epoch_s(), std::move(out), zwd.cadence_s());
}

}  // namespace pwvcast
