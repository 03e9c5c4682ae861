#include "pwvcast/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pwvcast/errors.hpp"
#include "pwvcast/optim.hpp"

namespace pwvcast {

namespace {

double loss_at(const LstmModel& model, std::span<const double> window, double target, double delta) {
  return huber_loss(model_predict(model, window), target, delta).loss;
}

}  // namespace

ParameterSet analytic_gradient(const LstmModel& model, std::span<const double> window, double target,
                               double delta) {
  ForwardResult fwd = model_forward(model, window);
  return backward(model, fwd.cache, huber_loss(fwd.prediction, target, delta).gradient);
}

GradientCheckResult gradient_check(const LstmModel& model, std::span<const double> window,
                                   double target, double delta, double step,
                                   const GradientFn& gradient) {
  if (model.params.parameter_count() > kMaxGradientCheckParameters) {
    throw ConfigError("model too large for a finite-difference check");
  }
  const ParameterSet analytic = gradient(model, window, target, delta);

  std::vector<TensorView<const double>> analytic_views;
  for_each_tensor(analytic, [&](const TensorView<const double>& t) { analytic_views.push_back(t); });

  LstmModel probe = model;
  std::vector<TensorView<double>> probe_views;
  for_each_tensor(probe.params, [&](const TensorView<double>& t) { probe_views.push_back(t); });
  if (probe_views.size() != analytic_views.size()) {
    throw ShapeError("analytic gradient does not match the model structure");
  }

  GradientCheckResult result;
  const std::size_t lstm_tensors = kLayerTensorNames.size();
  for (std::size_t k = 0; k < probe_views.size(); ++k) {
    const auto& p = probe_views[k];
    const auto& a = analytic_views[k];
    if (a.rows != p.rows || a.cols != p.cols) {
      throw ShapeError("analytic gradient shape differs in tensor " + std::string(p.name));
    }
    for (Index r = 0; r < p.rows; ++r) {
      for (Index c = 0; c < p.cols; ++c) {
        double& theta = p.at(r, c);
        const double saved = theta;
        theta = saved + step;
        const double up = loss_at(probe, window, target, delta);
        theta = saved - step;
        const double down = loss_at(probe, window, target, delta);
        theta = saved;

        const double numeric = (up - down) / (2.0 * step);
        const double exact = a.at(r, c);
        const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
        const double rel = std::abs(exact - numeric) / denom;
        ++result.parameters_checked;
        if (rel > result.max_relative_error || result.worst_tensor.empty()) {
          result.max_relative_error = std::max(rel, result.max_relative_error);
          std::string label = std::string(p.name) + "[" + std::to_string(r) + "," + std::to_string(c) + "]";
          if (k < lstm_tensors * probe.params.layers.size()) {
            label = std::to_string(k / lstm_tensors) + "." + label;
          }
          result.worst_tensor = std::move(label);
        }
      }
    }
  }
  return result;
}

}  // namespace pwvcast
