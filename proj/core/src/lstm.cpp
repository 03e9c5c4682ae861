#include "pwvcast/lstm.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "pwvcast/errors.hpp"

namespace pwvcast {

namespace {

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

// 53-bit uniform in [0, 1) from the raw engine output; unlike
// std::uniform_real_distribution this is identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_uniform(Eigen::MatrixXd& m, double bound, std::mt19937_64& rng) {
  // Row-major draw order so the stream matches the serialized layout.
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = (2.0 * unit_uniform(rng) - 1.0) * bound;
  }
}

double glorot_bound(Index fan_in, Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

struct StepState {
  Eigen::VectorXd i, f, g, o, c, tanh_c, h;
};

// One recurrence step; both the caching and the inference paths go through
// here so their arithmetic is identical.
void lstm_step(const LstmLayerParams& p, const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& h_prev,
               const Eigen::Ref<const Eigen::VectorXd>& c_prev, StepState& s) {
  s.i = (p.W[kInputGate] * x + p.U[kInputGate] * h_prev + p.b[kInputGate]).unaryExpr(&sigmoid);
  s.f = (p.W[kForgetGate] * x + p.U[kForgetGate] * h_prev + p.b[kForgetGate]).unaryExpr(&sigmoid);
  s.g = (p.W[kCellGate] * x + p.U[kCellGate] * h_prev + p.b[kCellGate]).array().tanh().matrix();
  s.o = (p.W[kOutputGate] * x + p.U[kOutputGate] * h_prev + p.b[kOutputGate]).unaryExpr(&sigmoid);
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = s.o.cwiseProduct(s.tanh_c);
}

void check_layer_shapes(const LstmLayerParams& p, Index input_rows, Index h0_size, Index c0_size) {
  const Index hidden = p.hidden_size();
  if (input_rows != p.input_size()) {
    throw ShapeError("LSTM input has " + std::to_string(input_rows) + " features, layer expects " +
                     std::to_string(p.input_size()));
  }
  if (h0_size != hidden || c0_size != hidden) {
    throw ShapeError("initial state size does not match hidden size " + std::to_string(hidden));
  }
}

Eigen::MatrixXd window_to_inputs(const LstmModel& model, std::span<const double> window) {
  if (window.size() != model.window_width) {
    throw ShapeError("window has " + std::to_string(window.size()) + " values, model expects " +
                     std::to_string(model.window_width));
  }
  if (model.params.layers.empty()) throw ShapeError("model has no LSTM layers");
  Eigen::MatrixXd inputs(1, static_cast<Index>(window.size()));
  for (std::size_t t = 0; t < window.size(); ++t) {
    const double x = window[t];
    if (!std::isfinite(x)) throw DomainError("non-finite value in input window");
    inputs(0, static_cast<Index>(t)) =
        model.normalization ? (x - model.normalization->mean) / model.normalization->stddev : x;
  }
  return inputs;
}

double finish_output(const LstmModel& model, const Eigen::VectorXd& last_hidden) {
  if (last_hidden.size() != model.params.head.w.size()) {
    throw ShapeError("dense head width does not match the top LSTM layer");
  }
  const double z = model.params.head.w.dot(last_hidden) + model.params.head.b;
  const double y = model.normalization ? z * model.normalization->stddev + model.normalization->mean : z;
  if (!std::isfinite(y)) throw NumericError("model output is not finite");
  return y;
}

template <typename T>
bool same_bits(const T& a, const T& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index k = 0; k < a.size(); ++k) {
    if (std::bit_cast<std::uint64_t>(a.data()[k]) != std::bit_cast<std::uint64_t>(b.data()[k])) {
      return false;
    }
  }
  return true;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

LstmLayerParams LstmLayerParams::zeros(Index hidden_size, Index input_size) {
  LstmLayerParams p;
  for (std::size_t g = 0; g < kGateCount; ++g) {
    p.W[g] = Eigen::MatrixXd::Zero(hidden_size, input_size);
    p.U[g] = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
    p.b[g] = Eigen::VectorXd::Zero(hidden_size);
  }
  return p;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet z;
  z.layers.reserve(layers.size());
  for (const auto& layer : layers) {
    z.layers.push_back(LstmLayerParams::zeros(layer.hidden_size(), layer.input_size()));
  }
  z.head.w = Eigen::VectorXd::Zero(head.w.size());
  z.head.b = 0.0;
  return z;
}

std::size_t ParameterSet::parameter_count() const noexcept {
  std::size_t n = 0;
  for_each_tensor(*this, [&n](const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

std::vector<std::size_t> LstmModel::architecture() const {
  std::vector<std::size_t> arch;
  for (const auto& layer : params.layers) arch.push_back(static_cast<std::size_t>(layer.hidden_size()));
  return arch;
}

bool bit_identical(const ParameterSet& a, const ParameterSet& b) noexcept {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    for (std::size_t g = 0; g < kGateCount; ++g) {
      if (!same_bits(a.layers[l].W[g], b.layers[l].W[g]) ||
          !same_bits(a.layers[l].U[g], b.layers[l].U[g]) ||
          !same_bits(a.layers[l].b[g], b.layers[l].b[g])) {
        return false;
      }
    }
  }
  return same_bits(a.head.w, b.head.w) && same_bits(a.head.b, b.head.b);
}

bool bit_identical(const LstmModel& a, const LstmModel& b) noexcept {
  if (a.window_width != b.window_width) return false;
  if (a.normalization.has_value() != b.normalization.has_value()) return false;
  if (a.normalization && (!same_bits(a.normalization->mean, b.normalization->mean) ||
                          !same_bits(a.normalization->stddev, b.normalization->stddev))) {
    return false;
  }
  return bit_identical(a.params, b.params);
}

LstmModel init_model(std::span<const std::size_t> hidden_sizes, std::uint64_t seed,
                     std::size_t window_width) {
  if (hidden_sizes.empty()) throw ConfigError("architecture must list at least one LSTM layer");
  if (window_width == 0) throw ConfigError("window width must be at least 1");
  std::mt19937_64 rng(seed);
  LstmModel model;
  model.window_width = window_width;
  Index input_size = 1;
  for (const std::size_t h : hidden_sizes) {
    if (h == 0) throw ConfigError("LSTM hidden size must be positive");
    const auto hidden = static_cast<Index>(h);
    auto layer = LstmLayerParams::zeros(hidden, input_size);
    for (std::size_t g = 0; g < kGateCount; ++g) {
      fill_uniform(layer.W[g], glorot_bound(input_size, hidden), rng);
    }
    for (std::size_t g = 0; g < kGateCount; ++g) {
      fill_uniform(layer.U[g], glorot_bound(hidden, hidden), rng);
    }
    layer.b[kForgetGate].setOnes();
    model.params.layers.push_back(std::move(layer));
    input_size = hidden;
  }
  Eigen::MatrixXd w(1, input_size);
  fill_uniform(w, glorot_bound(input_size, 1), rng);
  model.params.head.w = w.row(0).transpose();
  model.params.head.b = 0.0;
  return model;
}

LstmLayerOutput lstm_forward(const LstmLayerParams& layer, const Eigen::MatrixXd& inputs,
                             const Eigen::VectorXd& h0, const Eigen::VectorXd& c0) {
  check_layer_shapes(layer, inputs.rows(), h0.size(), c0.size());
  const Index hidden = layer.hidden_size();
  const Index steps = inputs.cols();

  LstmLayerOutput out;
  LstmLayerCache& cache = out.cache;
  cache.inputs = inputs;
  cache.h0 = h0;
  cache.c0 = c0;
  for (Eigen::MatrixXd* m : {&cache.i, &cache.f, &cache.g, &cache.o, &cache.c, &cache.tanh_c, &cache.h}) {
    m->resize(hidden, steps);
  }

  StepState s;
  for (Index t = 0; t < steps; ++t) {
    if (t == 0) {
      lstm_step(layer, inputs.col(0), h0, c0, s);
    } else {
      lstm_step(layer, inputs.col(t), cache.h.col(t - 1), cache.c.col(t - 1), s);
    }
    cache.i.col(t) = s.i;
    cache.f.col(t) = s.f;
    cache.g.col(t) = s.g;
    cache.o.col(t) = s.o;
    cache.c.col(t) = s.c;
    cache.tanh_c.col(t) = s.tanh_c;
    cache.h.col(t) = s.h;
  }
  out.hidden = cache.h;
  out.final_cell = steps > 0 ? Eigen::VectorXd(cache.c.col(steps - 1)) : c0;
  return out;
}

LstmLayerInputGradients lstm_backward(const LstmLayerParams& layer, const LstmLayerCache& cache,
                                      const Eigen::MatrixXd& d_hidden, LstmLayerParams& grads) {
  const Index hidden = layer.hidden_size();
  const Index steps = cache.steps();
  if (cache.inputs.rows() != layer.input_size() || cache.h.rows() != hidden ||
      d_hidden.rows() != hidden || d_hidden.cols() != steps) {
    throw ContractError("LSTM cache or upstream gradient does not match the layer");
  }
  if (grads.hidden_size() != hidden || grads.input_size() != layer.input_size()) {
    throw ShapeError("gradient accumulator does not match the layer");
  }

  LstmLayerInputGradients out;
  out.d_inputs = Eigen::MatrixXd::Zero(layer.input_size(), steps);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hidden);
  std::array<Eigen::VectorXd, kGateCount> da;

  for (Index t = steps - 1; t >= 0; --t) {
    const auto i = cache.i.col(t).array();
    const auto f = cache.f.col(t).array();
    const auto g = cache.g.col(t).array();
    const auto o = cache.o.col(t).array();
    const auto tc = cache.tanh_c.col(t).array();
    const Eigen::VectorXd c_prev = t > 0 ? Eigen::VectorXd(cache.c.col(t - 1)) : cache.c0;
    const Eigen::VectorXd h_prev = t > 0 ? Eigen::VectorXd(cache.h.col(t - 1)) : cache.h0;

    const Eigen::ArrayXd dh = d_hidden.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dh * o * (1.0 - tc * tc) + dc_next.array();

    da[kInputGate] = (dc * g * i * (1.0 - i)).matrix();
    da[kForgetGate] = (dc * c_prev.array() * f * (1.0 - f)).matrix();
    da[kCellGate] = (dc * i * (1.0 - g * g)).matrix();
    da[kOutputGate] = (dh * tc * o * (1.0 - o)).matrix();
    dc_next = (dc * f).matrix();

    dh_next.setZero();
    for (std::size_t k = 0; k < kGateCount; ++k) {
      grads.W[k].noalias() += da[k] * cache.inputs.col(t).transpose();
      grads.U[k].noalias() += da[k] * h_prev.transpose();
      grads.b[k] += da[k];
      out.d_inputs.col(t).noalias() += layer.W[k].transpose() * da[k];
      dh_next.noalias() += layer.U[k].transpose() * da[k];
    }
  }
  out.d_h0 = dh_next;
  out.d_c0 = dc_next;
  return out;
}

ForwardResult model_forward(const LstmModel& model, std::span<const double> window) {
  ForwardResult result;
  Eigen::MatrixXd inputs = window_to_inputs(model, window);
  result.cache.layers.reserve(model.params.layers.size());
  for (const auto& layer : model.params.layers) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(layer.hidden_size());
    LstmLayerOutput out = lstm_forward(layer, inputs, zero, zero);
    inputs = std::move(out.hidden);
    result.cache.layers.push_back(std::move(out.cache));
  }
  result.prediction = finish_output(model, inputs.col(inputs.cols() - 1));
  result.cache.output_scale = model.normalization ? model.normalization->stddev : 1.0;
  return result;
}

double model_predict(const LstmModel& model, std::span<const double> window) {
  Eigen::MatrixXd inputs = window_to_inputs(model, window);
  const Index steps = inputs.cols();
  StepState s;
  for (const auto& layer : model.params.layers) {
    const Index hidden = layer.hidden_size();
    check_layer_shapes(layer, inputs.rows(), hidden, hidden);
    Eigen::MatrixXd next(hidden, steps);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
    for (Index t = 0; t < steps; ++t) {
      lstm_step(layer, inputs.col(t), h, c, s);
      std::swap(h, s.h);
      std::swap(c, s.c);
      next.col(t) = h;
    }
    inputs = std::move(next);
  }
  return finish_output(model, inputs.col(steps - 1));
}

void backward_accumulate(const LstmModel& model, const ForwardCache& cache, double dloss_dpred,
                         ParameterSet& grads) {
  const auto& layers = model.params.layers;
  if (cache.layers.size() != layers.size() || grads.layers.size() != layers.size()) {
    throw ContractError("forward cache was produced by a model with a different layer count");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& lc = cache.layers[l];
    if (lc.h.rows() != layers[l].hidden_size() || lc.inputs.rows() != layers[l].input_size() ||
        lc.steps() != static_cast<Index>(model.window_width)) {
      throw ContractError("forward cache does not match layer " + std::to_string(l));
    }
  }

  const double dz = dloss_dpred * cache.output_scale;
  const auto& top = cache.layers.back();
  const Index steps = top.steps();
  const Eigen::VectorXd last_hidden = top.h.col(steps - 1);
  grads.head.w += dz * last_hidden;
  grads.head.b += dz;

  Eigen::MatrixXd d_hidden = Eigen::MatrixXd::Zero(top.h.rows(), steps);
  d_hidden.col(steps - 1) = dz * model.params.head.w;
  for (std::size_t l = layers.size(); l-- > 0;) {
    LstmLayerInputGradients lg = lstm_backward(layers[l], cache.layers[l], d_hidden, grads.layers[l]);
    d_hidden = std::move(lg.d_inputs);
  }
}

ParameterSet backward(const LstmModel& model, const ForwardCache& cache, double dloss_dpred) {
  ParameterSet grads = model.params.zeros_like();
  backward_accumulate(model, cache, dloss_dpred, grads);
  return grads;
}

}  // namespace pwvcast
