#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pwvcast/pwv_convert.hpp"

namespace pwvcast {

inline constexpr std::int64_t kCadenceSeconds = 300;

// Fixed-cadence scalar series. Sample i sits at start + i * cadence; an empty
// optional is a missing reading. Immutable once built.
class TimeSeries {
 public:
  TimeSeries() = default;
  // Throws DomainError on a non-positive cadence or a non-finite sample.
  TimeSeries(std::int64_t start_epoch_s, std::vector<std::optional<double>> samples,
             std::int64_t cadence_s = kCadenceSeconds);

  std::int64_t start_epoch_s() const noexcept { return start_epoch_s_; }
  std::int64_t cadence_s() const noexcept { return cadence_s_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::span<const std::optional<double>> samples() const noexcept { return samples_; }
  const std::optional<double>& operator[](std::size_t i) const { return samples_[i]; }

  std::int64_t epoch_at(std::size_t i) const noexcept {
    return start_epoch_s_ + static_cast<std::int64_t>(i) * cadence_s_;
  }
  // Slot index of an epoch on this series' grid, if it falls inside it.
  std::optional<std::size_t> index_of(std::int64_t epoch_s) const noexcept;
  std::size_t present_count() const noexcept;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::int64_t start_epoch_s_ = 0;
  std::int64_t cadence_s_ = kCadenceSeconds;
  std::vector<std::optional<double>> samples_;
};

enum class SeriesKind { kZwd, kPwv };
enum class TimestampFormat { kIso8601, kEpochSeconds };

SeriesKind parse_series_kind(std::string_view text);

// Reads `timestamp,value` CSV into a PWV series at 300 s cadence. Slots with
// no row become gaps. kind == kZwd converts through convert_series and
// requires a station (ConfigError otherwise).
TimeSeries ingest_csv(std::istream& in, SeriesKind kind,
                      const std::optional<StationMeta>& station = std::nullopt);
TimeSeries ingest_csv(const std::filesystem::path& path, SeriesKind kind,
                      const std::optional<StationMeta>& station = std::nullopt);

// One row per present sample, values at 17 significant digits.
void write_csv(const TimeSeries& series, std::ostream& out,
               TimestampFormat format = TimestampFormat::kIso8601);
void write_csv(const TimeSeries& series, const std::filesystem::path& path,
               TimestampFormat format = TimestampFormat::kIso8601);

// Maximal gap-free runs, in time order.
std::vector<TimeSeries> segment_gaps(const TimeSeries& series);

// Calendar helpers (UTC, proleptic Gregorian).
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t epoch_s);
// 1-based fractional day of year: midnight on January 1st is 1.0.
double day_of_year_utc(std::int64_t epoch_s);

// Shortest-round-trip-safe text for a double (17 significant digits).
std::string format_double(double value);

}  // namespace pwvcast
