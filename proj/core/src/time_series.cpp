#include "pwvcast/time_series.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "pwvcast/errors.hpp"
#include "pwvcast/pwv_convert.hpp"

namespace pwvcast {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
// Upper bound on slots spanned by one file (~950 years at 5 minutes).
constexpr std::int64_t kMaxSlots = 100'000'000;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool looks_like_epoch(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s.front() == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

std::optional<std::int64_t> parse_epoch(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<int> parse_fixed_digits(std::string_view s) {
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

TimeSeries::TimeSeries(std::int64_t start_epoch_s, std::vector<std::optional<double>> samples,
                       std::int64_t cadence_s)
    : start_epoch_s_(start_epoch_s), cadence_s_(cadence_s), samples_(std::move(samples)) {
  if (cadence_s_ <= 0) throw DomainError("cadence must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i] && !std::isfinite(*samples_[i])) {
      throw DomainError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::optional<std::size_t> TimeSeries::index_of(std::int64_t epoch_s) const noexcept {
  const std::int64_t offset = epoch_s - start_epoch_s_;
  if (offset < 0 || offset % cadence_s_ != 0) return std::nullopt;
  const auto index = static_cast<std::size_t>(offset / cadence_s_);
  if (index >= samples_.size()) return std::nullopt;
  return index;
}

std::size_t TimeSeries::present_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : samples_) n += s.has_value();
  return n;
}

SeriesKind parse_series_kind(std::string_view text) {
  if (text == "zwd") return SeriesKind::kZwd;
  if (text == "pwv") return SeriesKind::kPwv;
  throw ConfigError("series kind must be 'zwd' or 'pwv', got '" + std::string(text) + "'");
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  // YYYY-MM-DDThh:mm:ssZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  const auto year = parse_fixed_digits(text.substr(0, 4));
  const auto month = parse_fixed_digits(text.substr(5, 2));
  const auto day = parse_fixed_digits(text.substr(8, 2));
  const auto hour = parse_fixed_digits(text.substr(11, 2));
  const auto minute = parse_fixed_digits(text.substr(14, 2));
  const auto second = parse_fixed_digits(text.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  if (*hour > 23 || *minute > 59 || *second > 59) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{*year}, std::chrono::month{static_cast<unsigned>(*month)},
                           std::chrono::day{static_cast<unsigned>(*day)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return days_since_epoch * kSecondsPerDay + *hour * 3600 + *minute * 60 + *second;
}

std::string format_iso8601(std::int64_t epoch_s) {
  using namespace std::chrono;
  const std::int64_t day_index = floor_div(epoch_s, kSecondsPerDay);
  const std::int64_t sec_of_day = epoch_s - day_index * kSecondsPerDay;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(sec_of_day / 3600), static_cast<int>(sec_of_day / 60 % 60),
                static_cast<int>(sec_of_day % 60));
  return buf;
}

double day_of_year_utc(std::int64_t epoch_s) {
  using namespace std::chrono;
  const std::int64_t day_index = floor_div(epoch_s, kSecondsPerDay);
  const year_month_day ymd{sys_days{days{day_index}}};
  const std::int64_t jan1 = sys_days{ymd.year() / January / 1}.time_since_epoch().count();
  return 1.0 + static_cast<double>(epoch_s - jan1 * kSecondsPerDay) /
                   static_cast<double>(kSecondsPerDay);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

TimeSeries ingest_csv(std::istream& in, SeriesKind kind, const std::optional<StationMeta>& station) {
  if (kind == SeriesKind::kZwd && !station) {
    throw ConfigError("ZWD input requires station latitude and height for conversion");
  }

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::optional<TimestampFormat> format;
  std::vector<std::pair<std::int64_t, double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (!header_seen) {
      if (text != "timestamp,value") {
        throw ParseError(line_no, "expected header 'timestamp,value'");
      }
      header_seen = true;
      continue;
    }
    if (text.empty()) continue;

    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected exactly two fields");
    }
    const std::string_view ts_field = trim(text.substr(0, comma));
    const std::string_view value_field = trim(text.substr(comma + 1));

    if (!format) {
      format = looks_like_epoch(ts_field) ? TimestampFormat::kEpochSeconds
                                          : TimestampFormat::kIso8601;
    }
    const auto epoch = (*format == TimestampFormat::kEpochSeconds) ? parse_epoch(ts_field)
                                                                    : parse_iso8601(ts_field);
    if (!epoch) {
      throw ParseError(line_no, "bad timestamp '" + std::string(ts_field) + "' (expected " +
                                    (*format == TimestampFormat::kEpochSeconds
                                         ? "integer epoch seconds"
                                         : "YYYY-MM-DDThh:mm:ssZ") +
                                    ")");
    }

    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(value_field.data(), value_field.data() + value_field.size(), value);
    if (value_field.empty() || ec != std::errc{} || ptr != value_field.data() + value_field.size() ||
        !std::isfinite(value)) {
      throw ParseError(line_no, "bad value '" + std::string(value_field) + "'");
    }

    if (!rows.empty()) {
      const std::int64_t prev = rows.back().first;
      if (*epoch == prev) throw ParseError(line_no, "duplicate timestamp " + std::string(ts_field));
      if (*epoch < prev) throw ParseError(line_no, "timestamps not sorted ascending");
      const std::int64_t offset = *epoch - rows.front().first;
      if (offset % kCadenceSeconds != 0) {
        throw AlignmentError(line_no, "timestamp " + std::string(ts_field) +
                                          " is not on the 300 s grid of the first row");
      }
      if (offset / kCadenceSeconds >= kMaxSlots) {
        throw ParseError(line_no, "series spans too many cadence slots");
      }
    }
    rows.emplace_back(*epoch, value);
  }
  if (!header_seen) throw ParseError(1, "missing header 'timestamp,value'");

  if (rows.empty()) return TimeSeries{};
  const std::int64_t start = rows.front().first;
  const auto slots = static_cast<std::size_t>((rows.back().first - start) / kCadenceSeconds + 1);
  std::vector<std::optional<double>> samples(slots);
  for (const auto& [epoch, value] : rows) {
    samples[static_cast<std::size_t>((epoch - start) / kCadenceSeconds)] = value;
  }
  TimeSeries series(start, std::move(samples));
  if (kind == SeriesKind::kZwd) return convert_series(series, *station);
  return series;
}

TimeSeries ingest_csv(const std::filesystem::path& path, SeriesKind kind,
                      const std::optional<StationMeta>& station) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_csv(in, kind, station);
}

void write_csv(const TimeSeries& series, std::ostream& out, TimestampFormat format) {
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i]) continue;
    const std::int64_t epoch = series.epoch_at(i);
    if (format == TimestampFormat::kIso8601) {
      out << format_iso8601(epoch);
    } else {
      out << epoch;
    }
    out << ',' << format_double(*series[i]) << '\n';
  }
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path,
               TimestampFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(series, out, format);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<TimeSeries> segment_gaps(const TimeSeries& series) {
  std::vector<TimeSeries> segments;
  std::size_t i = 0;
  const std::size_t n = series.size();
  while (i < n) {
    if (!series[i]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && series[end]) ++end;
    std::vector<std::optional<double>> run(series.samples().begin() + static_cast<std::ptrdiff_t>(i),
                                           series.samples().begin() + static_cast<std::ptrdiff_t>(end));
    segments.emplace_back(series.epoch_at(i), std::move(run), series.cadence_s());
    i = end;
  }
  return segments;
}

}  // namespace pwvcast
