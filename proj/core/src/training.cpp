#include "pwvcast/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "pwvcast/errors.hpp"

namespace pwvcast {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

// Unbiased integer in [0, bound) by rejection; portable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

void fisher_yates(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

Normalization fit_normalization(const WindowSet& train_windows) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : train_windows.windows) {
    for (double x : w.inputs) sum += x;
    n += w.inputs.size();
  }
  if (n == 0) throw DomainError("cannot fit normalization on an empty window set");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& w : train_windows.windows) {
    for (double x : w.inputs) ss += (x - mean) * (x - mean);
  }
  const double stddev = std::sqrt(ss / static_cast<double>(n));
  if (!(stddev > 0.0)) {
    throw ConfigError("normalization needs non-constant training data (stddev is 0)");
  }
  return {mean, stddev};
}

TrainResult train(const WindowSet& train_windows, const TrainConfig& config,
                  std::span<const std::size_t> hidden_sizes) {
  if (train_windows.empty()) throw DomainError("training set is empty");
  if (config.epochs == 0) throw ConfigError("epochs must be at least 1");
  if (config.batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(config.huber_delta > 0.0)) throw ConfigError("Huber delta must be positive");
  if (config.clip_norm && !(*config.clip_norm > 0.0)) throw ConfigError("clip norm must be positive");

  TrainResult result;
  result.model = init_model(hidden_sizes, config.seed, train_windows.width);
  LstmModel& model = result.model;
  if (config.normalize) model.normalization = fit_normalization(train_windows);

  AdamState adam = AdamState::fresh(model.params, config.adam);
  ParameterSet grads = model.params.zeros_like();
  std::mt19937_64 shuffle_rng(config.seed ^ kShuffleStream);

  const std::size_t n = train_windows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) fisher_yates(order, shuffle_rng);
    const double eta = config.learning_rate ? config.learning_rate(epoch) : lr_schedule(epoch);
    double epoch_loss = 0.0;

    for (std::size_t begin = 0, batch = 0; begin < n; begin += config.batch_size, ++batch) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const double inv_count = 1.0 / static_cast<double>(end - begin);
      grads = model.params.zeros_like();
      double batch_loss = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const Window& w = train_windows.windows[order[k]];
        ForwardResult fwd = model_forward(model, w.inputs);
        const HuberResult h = huber_loss(fwd.prediction, w.label, config.huber_delta);
        batch_loss += h.loss;
        backward_accumulate(model, fwd.cache, h.gradient * inv_count, grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch));
      }
      if (config.clip_norm) {
        const double norm = std::sqrt(squared_norm(grads));
        if (norm > *config.clip_norm) scale(grads, *config.clip_norm / norm);
      }
      adam_step(model.params, grads, adam, eta);
      epoch_loss += batch_loss;
    }

    const double mean_loss = epoch_loss / static_cast<double>(n);
    result.epoch_losses.push_back(mean_loss);
    if (config.on_epoch) config.on_epoch(epoch, mean_loss);
  }
  return result;
}

TrainResult train(const SplitSet& split, const TrainConfig& config,
                  std::span<const std::size_t> hidden_sizes) {
  return train(split.train, config, hidden_sizes);
}

}  // namespace pwvcast
