#pragma once

// Conversion of GPS zenith wet delay (ZWD) to precipitable water vapor (PWV).
//
//   PWV = PI * ZWD
//   PI  = [-sgn(lat) * 1.7e-5 * |lat|^h_fac - 1e-4] * cos(2*pi*(doy - 28) / 365.25)
//         + 0.165 - 1.7e-5 * |lat|^1.65 + f,          f = -2.38e-6 * height
//
// h_fac is 1.48 north of the equator and 1.25 south of it. Both ZWD and PWV
// are carried in millimeters, height in meters.

#include <string>

namespace pwvcast {

class TimeSeries;

class StationMeta {
 public:
  static constexpr double kNorthernHfac = 1.48;
  static constexpr double kSouthernHfac = 1.25;
  static constexpr double kHeightCoefficient = -2.38e-6;

  // Throws DomainError unless latitude is in [-90, 90] and height >= -500 m.
  StationMeta(double latitude_deg, double height_m, std::string station_id = {});

  double latitude_deg() const noexcept { return latitude_deg_; }
  double height_m() const noexcept { return height_m_; }
  const std::string& station_id() const noexcept { return station_id_; }

  // 1.48 for latitude >= 0 (the equator uses the northern constant; the
  // h_fac term vanishes there anyway), 1.25 for latitude < 0.
  double h_fac() const noexcept;
  double height_correction() const noexcept { return kHeightCoefficient * height_m_; }

 private:
  double latitude_deg_;
  double height_m_;
  std::string station_id_;
};

struct PiFactor {
  double value;
  double day_of_year;
};

namespace detail {
// The PI formula with no domain checks; any real day_of_year is accepted.
double pi_formula(double latitude_deg, double h_fac, double height_correction,
                  double day_of_year) noexcept;
}  // namespace detail

// day_of_year is a real in [1, 367); fractional days are allowed.
PiFactor pi_factor(const StationMeta& station, double day_of_year);

// zwd_mm must be finite and non-negative.
double zwd_to_pwv(double zwd_mm, const PiFactor& pi);

// Converts every present sample using the PI of its own (fractional, UTC)
// day of year. Gaps are preserved. Domain errors name the offending epoch.
TimeSeries convert_series(const TimeSeries& zwd, const StationMeta& station);

}  // namespace pwvcast
