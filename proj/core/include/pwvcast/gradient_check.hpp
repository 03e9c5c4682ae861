#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "pwvcast/lstm.hpp"

namespace pwvcast {

// Analytic gradient of huber_loss(model(window), target, delta).
using GradientFn = std::function<ParameterSet(const LstmModel&, std::span<const double> window,
                                              double target, double delta)>;

ParameterSet analytic_gradient(const LstmModel& model, std::span<const double> window, double target,
                               double delta);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
  std::string worst_tensor;  // "<layer>.<name>[row,col]" or "w[0,c]" / "b[0,0]"
};

inline constexpr std::size_t kMaxGradientCheckParameters = 100'000;

// Central differences on every parameter; relative error per entry is
// |a - n| / max(|a|, |n|, 1e-8). Throws ConfigError for models with more than
// kMaxGradientCheckParameters parameters.
GradientCheckResult gradient_check(const LstmModel& model, std::span<const double> window,
                                   double target, double delta, double step = 1e-5,
                                   const GradientFn& gradient = analytic_gradient);

}  // namespace pwvcast
