#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pwvcast/lstm.hpp"
#include "pwvcast/optim.hpp"
#include "pwvcast/windows.hpp"

namespace pwvcast {

struct TrainConfig {
  std::size_t epochs = 150;
  std::size_t batch_size = 32;
  double huber_delta = 1.0;
  std::uint64_t seed = 0;
  bool shuffle = true;
  // Fit (mean, stddev) on the training inputs and store them in the model.
  bool normalize = false;
  // Rescale each batch gradient to at most this global L2 norm.
  std::optional<double> clip_norm;
  AdamConfig adam;
  // Learning rate per 0-based epoch; lr_schedule when empty.
  std::function<double(std::size_t)> learning_rate;
  std::function<void(std::size_t epoch, double mean_loss)> on_epoch;
};

struct TrainResult {
  LstmModel model;
  std::vector<double> epoch_losses;  // mean per-window Huber loss per epoch
};

// Mini-batch Adam on mean Huber loss. Deterministic in (data, config).
// Throws DomainError on an empty training set, NumericError on a non-finite
// loss (naming epoch and batch).
TrainResult train(const WindowSet& train_windows, const TrainConfig& config,
                  std::span<const std::size_t> hidden_sizes);
TrainResult train(const SplitSet& split, const TrainConfig& config,
                  std::span<const std::size_t> hidden_sizes);

// Population mean and standard deviation of all training inputs.
Normalization fit_normalization(const WindowSet& train_windows);

}  // namespace pwvcast
