#include "pwvcast/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pwvcast/errors.hpp"
#include "pwvcast/forecast.hpp"

namespace pwvcast {

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw DomainError("rmse: " + std::to_string(predictions.size()) + " predictions vs " +
                      std::to_string(truths.size()) + " truths");
  }
  if (predictions.empty()) throw DomainError("rmse of an empty sequence");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

LeadTimeReport lead_time_sweep(const IterativeForecaster& model, const WindowSet& test,
                               const TimeSeries& source, std::size_t max_lead) {
  if (max_lead == 0) throw DomainError("lead range must include at least one step");

  struct LeadSamples {
    std::vector<double> truth, model, naive, average;
  };
  std::vector<LeadSamples> leads(max_lead);

  for (const Window& w : test.windows) {
    const auto label_index = source.index_of(w.label_epoch_s);
    if (!label_index || !source[*label_index]) {
      throw ContractError("test window labelled at " + format_iso8601(w.label_epoch_s) +
                          " is not a present sample of the source series");
    }
    std::size_t depth = 0;
    while (depth < max_lead && *label_index + depth < source.size() && source[*label_index + depth]) {
      ++depth;
    }
    const std::vector<double> predicted = model(w, depth);
    if (predicted.size() != depth) throw ContractError("forecaster returned the wrong number of steps");
    const double naive = naive_forecast(w.inputs, 1).front();
    const double average = average_forecast(w.inputs, 1).front();
    for (std::size_t k = 0; k < depth; ++k) {
      LeadSamples& s = leads[k];
      s.truth.push_back(*source[*label_index + k]);
      s.model.push_back(predicted[k]);
      s.naive.push_back(naive);
      s.average.push_back(average);
    }
  }

  LeadTimeReport report;
  for (std::size_t k = 0; k < max_lead; ++k) {
    const LeadSamples& s = leads[k];
    const std::size_t lead_steps = k + 1;
    const auto lead_minutes = static_cast<std::size_t>(static_cast<std::int64_t>(lead_steps) *
                                                       source.cadence_s() / 60);
    if (s.truth.empty()) {
      report.warnings.push_back("no eligible test window at lead " + std::to_string(lead_minutes) +
                                " min; row omitted");
      continue;
    }
    report.rows.push_back({lead_steps, lead_minutes, rmse(s.model, s.truth), rmse(s.naive, s.truth),
                           rmse(s.average, s.truth), s.truth.size()});
  }
  return report;
}

LeadTimeReport lead_time_sweep(const LstmModel& model, const WindowSet& test,
                               const TimeSeries& source, std::size_t max_lead) {
  return lead_time_sweep(
      [&model](const Window& w, std::size_t k) { return predict_iterative(model, w.inputs, k); }, test,
      source, max_lead);
}

void write_report(const LeadTimeReport& report, std::ostream& out) {
  out << "lead_minutes,samples,model_rmse_mm,naive_rmse_mm,average_rmse_mm\n";
  for (const auto& row : report.rows) {
    out << row.lead_minutes << ',' << row.sample_count << ',' << format_double(row.model_rmse_mm) << ','
        << format_double(row.naive_rmse_mm) << ',' << format_double(row.average_rmse_mm) << '\n';
  }
}

void write_report(const LeadTimeReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_report(report, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

LeadTimeReport read_report(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "lead_minutes,samples,model_rmse_mm,naive_rmse_mm,average_rmse_mm") {
    throw ParseError(1, "missing report header");
  }
  LeadTimeReport report;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");

    auto parse_uint = [&](const std::string& s) {
      std::size_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(line_no, "bad integer '" + s + "'");
      return v;
    };
    auto parse_real = [&](const std::string& s) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(line_no, "bad number '" + s + "'");
      return v;
    };
    LeadTimeRow row;
    row.lead_minutes = parse_uint(fields[0]);
    row.lead_steps = row.lead_minutes / 5;
    row.sample_count = parse_uint(fields[1]);
    row.model_rmse_mm = parse_real(fields[2]);
    row.naive_rmse_mm = parse_real(fields[3]);
    row.average_rmse_mm = parse_real(fields[4]);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pwvcast
