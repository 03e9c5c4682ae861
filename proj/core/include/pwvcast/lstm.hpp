#pragma once

// LSTM regression model: a stack of standard LSTM layers (no peepholes, no
// projection) followed by a single linear output neuron that reads the last
// hidden state of the top layer.
//
// Per step, for each layer:
//   i = sigmoid(W_i x + U_i h + b_i)      f = sigmoid(W_f x + U_f h + b_f)
//   g = tanh(W_g x + U_g h + b_g)         o = sigmoid(W_o x + U_o h + b_o)
//   c' = f * c + i * g                    h' = o * tanh(c')

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pwvcast {

using Eigen::Index;

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };
inline constexpr std::size_t kGateCount = 4;

struct LstmLayerParams {
  std::array<Eigen::MatrixXd, kGateCount> W;  // hidden x input
  std::array<Eigen::MatrixXd, kGateCount> U;  // hidden x hidden
  std::array<Eigen::VectorXd, kGateCount> b;  // hidden

  static LstmLayerParams zeros(Index hidden_size, Index input_size);
  Index hidden_size() const noexcept { return b[0].size(); }
  Index input_size() const noexcept { return W[0].cols(); }
};

struct DenseParams {
  Eigen::VectorXd w;
  double b = 0.0;
};

// The learnable tensors of a model. Also used for gradients and optimizer
// moments, which share the model's shapes.
struct ParameterSet {
  std::vector<LstmLayerParams> layers;
  DenseParams head;

  ParameterSet zeros_like() const;
  std::size_t parameter_count() const noexcept;
};

struct Normalization {
  double mean = 0.0;
  double stddev = 1.0;
};

struct LstmModel {
  ParameterSet params;
  std::size_t window_width = 48;
  // Applied to inputs as (x - mean) / stddev, inverted on the output.
  std::optional<Normalization> normalization;

  std::vector<std::size_t> architecture() const;
};

// Bitwise equality of every parameter and of the metadata.
bool bit_identical(const ParameterSet& a, const ParameterSet& b) noexcept;
bool bit_identical(const LstmModel& a, const LstmModel& b) noexcept;

// A named dense block of parameters, shown with logical (rows, cols) shape.
// Storage is column-major: element (r, c) is data[c * rows + r].
template <typename Scalar>
struct TensorView {
  std::string_view name;
  Scalar* data;
  Index rows;
  Index cols;

  Index size() const noexcept { return rows * cols; }
  Scalar& at(Index r, Index c) const noexcept { return data[c * rows + r]; }
};

inline constexpr std::array<std::string_view, 3 * kGateCount> kLayerTensorNames = {
    "W_i", "W_f", "W_g", "W_o", "U_i", "U_f", "U_g", "U_o", "b_i", "b_f", "b_g", "b_o"};

// Visits every tensor in serialization order: per layer W_i..W_o, U_i..U_o,
// b_i..b_o; then the dense head's w (1 x hidden) and b (1 x 1).
template <typename Params, typename Visitor>
void for_each_tensor(Params& params, Visitor&& visit) {
  using Scalar = std::conditional_t<std::is_const_v<Params>, const double, double>;
  for (auto& layer : params.layers) {
    for (std::size_t g = 0; g < kGateCount; ++g) {
      visit(TensorView<Scalar>{kLayerTensorNames[g], layer.W[g].data(), layer.W[g].rows(),
                               layer.W[g].cols()});
    }
    for (std::size_t g = 0; g < kGateCount; ++g) {
      visit(TensorView<Scalar>{kLayerTensorNames[kGateCount + g], layer.U[g].data(),
                               layer.U[g].rows(), layer.U[g].cols()});
    }
    for (std::size_t g = 0; g < kGateCount; ++g) {
      visit(TensorView<Scalar>{kLayerTensorNames[2 * kGateCount + g], layer.b[g].data(),
                               layer.b[g].size(), 1});
    }
  }
  visit(TensorView<Scalar>{"w", params.head.w.data(), 1, params.head.w.size()});
  visit(TensorView<Scalar>{"b", &params.head.b, 1, 1});
}

// Uniform(-bound, bound) weights with bound = sqrt(6 / (fan_in + fan_out))
// per matrix, zero biases except forget-gate biases of 1. Deterministic in
// the seed. Throws ConfigError on an empty or zero-sized architecture.
LstmModel init_model(std::span<const std::size_t> hidden_sizes, std::uint64_t seed,
                     std::size_t window_width = 48);

struct LstmLayerCache {
  Eigen::MatrixXd inputs;  // input x T
  Eigen::VectorXd h0;
  Eigen::VectorXd c0;
  // hidden x T, column t is the value after step t.
  Eigen::MatrixXd i, f, g, o, c, tanh_c, h;

  Index steps() const noexcept { return inputs.cols(); }
};

struct LstmLayerOutput {
  Eigen::MatrixXd hidden;  // hidden x T
  Eigen::VectorXd final_cell;
  LstmLayerCache cache;
};

// inputs holds one column per time step. Throws ShapeError on mismatch.
LstmLayerOutput lstm_forward(const LstmLayerParams& layer, const Eigen::MatrixXd& inputs,
                             const Eigen::VectorXd& h0, const Eigen::VectorXd& c0);

struct LstmLayerInputGradients {
  Eigen::MatrixXd d_inputs;  // input x T
  Eigen::VectorXd d_h0;
  Eigen::VectorXd d_c0;
};

// BPTT through one layer. d_hidden is dL/dh_t for every step (hidden x T),
// excluding the recurrent contribution. Parameter gradients are added to grads.
LstmLayerInputGradients lstm_backward(const LstmLayerParams& layer, const LstmLayerCache& cache,
                                      const Eigen::MatrixXd& d_hidden, LstmLayerParams& grads);

struct ForwardCache {
  std::vector<LstmLayerCache> layers;
  double output_scale = 1.0;  // d prediction / d head output
};

struct ForwardResult {
  double prediction = 0.0;
  ForwardCache cache;
};

// Prediction in millimeters for one window of window_width values.
ForwardResult model_forward(const LstmModel& model, std::span<const double> window);
// Same value as model_forward(...).prediction without keeping the cache.
double model_predict(const LstmModel& model, std::span<const double> window);

// Exact gradient of a scalar loss whose derivative w.r.t. the prediction is
// dloss_dpred. Throws ContractError if the cache does not match the model.
ParameterSet backward(const LstmModel& model, const ForwardCache& cache, double dloss_dpred);
void backward_accumulate(const LstmModel& model, const ForwardCache& cache, double dloss_dpred,
                         ParameterSet& grads);

}  // namespace pwvcast
