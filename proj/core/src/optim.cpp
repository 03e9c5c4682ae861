#include "pwvcast/optim.hpp"

#include <cmath>
#include <vector>

#include "pwvcast/errors.hpp"

namespace pwvcast {

namespace {

template <typename Scalar>
std::vector<TensorView<Scalar>> collect(auto& params) {
  std::vector<TensorView<Scalar>> views;
  for_each_tensor(params, [&views](const TensorView<Scalar>& t) { views.push_back(t); });
  return views;
}

}  // namespace

HuberResult huber_loss(double prediction, double target, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("Huber delta must be positive");
  const double r = prediction - target;
  const double a = std::abs(r);
  if (a <= delta) return {0.5 * r * r, r};
  return {delta * (a - 0.5 * delta), r > 0.0 ? delta : -delta};
}

double lr_schedule(std::size_t epoch) noexcept {
  const double candidate = 1e-4 * std::pow(10.0, static_cast<double>(epoch) / 20.0);
  return candidate < 1e-2 ? candidate : 1e-2;
}

AdamState AdamState::fresh(const ParameterSet& params, AdamConfig config) {
  AdamState state;
  state.m = params.zeros_like();
  state.v = params.zeros_like();
  state.config = config;
  return state;
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state, double eta) {
  auto theta = collect<double>(params);
  auto g = collect<const double>(grads);
  auto m = collect<double>(state.m);
  auto v = collect<double>(state.v);
  if (g.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size()) {
    throw ShapeError("Adam: parameter, gradient and moment structures differ");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (g[k].size() != theta[k].size() || m[k].size() != theta[k].size() ||
        v[k].size() != theta[k].size()) {
      throw ShapeError("Adam: shape mismatch in tensor " + std::string(theta[k].name));
    }
  }

  const auto& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double m_correction = 1.0 - std::pow(cfg.beta1, t);
  const double v_correction = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t k = 0; k < theta.size(); ++k) {
    for (Index j = 0; j < theta[k].size(); ++j) {
      const double gj = g[k].data[j];
      double& mj = m[k].data[j];
      double& vj = v[k].data[j];
      mj = cfg.beta1 * mj + (1.0 - cfg.beta1) * gj;
      vj = cfg.beta2 * vj + (1.0 - cfg.beta2) * gj * gj;
      const double m_hat = mj / m_correction;
      const double v_hat = vj / v_correction;
      theta[k].data[j] -= eta * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

double squared_norm(const ParameterSet& params) {
  double total = 0.0;
  for_each_tensor(params, [&total](const TensorView<const double>& t) {
    for (Index j = 0; j < t.size(); ++j) total += t.data[j] * t.data[j];
  });
  return total;
}

void scale(ParameterSet& params, double factor) {
  for_each_tensor(params, [factor](const TensorView<double>& t) {
    for (Index j = 0; j < t.size(); ++j) t.data[j] *= factor;
  });
}

}  // namespace pwvcast
