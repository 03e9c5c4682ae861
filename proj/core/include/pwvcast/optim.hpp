#pragma once

#include <cstddef>
#include <cstdint>

#include "pwvcast/lstm.hpp"

namespace pwvcast {

struct HuberResult {
  double loss;
  double gradient;  // d loss / d prediction
};

// r = pred - target; r^2 / 2 for |r| <= delta, delta * (|r| - delta / 2) beyond.
// Throws ConfigError unless delta > 0.
HuberResult huber_loss(double prediction, double target, double delta);

// 1e-4 * 10^(epoch / 20), capped at 1e-2. Epochs are 0-based.
double lr_schedule(std::size_t epoch) noexcept;

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct AdamState {
  ParameterSet m;
  ParameterSet v;
  std::uint64_t step = 0;
  AdamConfig config;

  // Zero moments shaped like params.
  static AdamState fresh(const ParameterSet& params, AdamConfig config = {});
};

// One bias-corrected Adam update:
//   m = b1 m + (1 - b1) g     v = b2 v + (1 - b2) g^2
//   theta -= eta * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state, double eta);

// Squared L2 norm over all tensors.
double squared_norm(const ParameterSet& params);
void scale(ParameterSet& params, double factor);

}  // namespace pwvcast
