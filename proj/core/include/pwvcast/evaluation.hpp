#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pwvcast/lstm.hpp"
#include "pwvcast/time_series.hpp"
#include "pwvcast/windows.hpp"

namespace pwvcast {

// sqrt(mean((p - t)^2)), summed in sequence order. Throws DomainError on
// empty or unequal-length input.
double rmse(std::span<const double> predictions, std::span<const double> truths);

struct LeadTimeRow {
  std::size_t lead_steps = 0;
  std::size_t lead_minutes = 0;
  double model_rmse_mm = 0.0;
  double naive_rmse_mm = 0.0;
  double average_rmse_mm = 0.0;
  std::size_t sample_count = 0;

  friend bool operator==(const LeadTimeRow&, const LeadTimeRow&) = default;
};

struct LeadTimeReport {
  std::vector<LeadTimeRow> rows;  // sorted by lead_steps
  std::vector<std::string> warnings;
};

// Produces lead_steps predictions for one window (the model side of the sweep).
using IterativeForecaster = std::function<std::vector<double>(const Window&, std::size_t lead_steps)>;

// For each lead k in 1..max_lead, every test window whose k-step ground truth
// lies in the same gap-free run of `source` is scored; truth for lead k is the
// source sample k - 1 slots after the window's label. Leads with no eligible
// window are omitted and reported in warnings.
LeadTimeReport lead_time_sweep(const IterativeForecaster& model, const WindowSet& test,
                               const TimeSeries& source, std::size_t max_lead = 12);
LeadTimeReport lead_time_sweep(const LstmModel& model, const WindowSet& test,
                               const TimeSeries& source, std::size_t max_lead = 12);

// CSV: lead_minutes,samples,model_rmse_mm,naive_rmse_mm,average_rmse_mm
void write_report(const LeadTimeReport& report, std::ostream& out);
void write_report(const LeadTimeReport& report, const std::filesystem::path& path);
// Inverse of write_report; lead_steps is lead_minutes / 5.
LeadTimeReport read_report(std::istream& in);

}  // namespace pwvcast
