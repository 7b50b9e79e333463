#include "irsrl/nn.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::nn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFinalActorScale = 1e-2;

}  // namespace

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) throw DomainError("NetworkSpec: need at least input and output sizes");
  for (int n : layer_sizes) {
    if (n < 1) throw DomainError("NetworkSpec: layer sizes must be >= 1");
  }
}

template <class S>
std::size_t MlpParams<S>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

template <class S>
bool MlpParams<S>::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

template <class S>
MlpParams<S> MlpParams<S>::zeros_like() const {
  MlpParams out;
  for (const auto& w : weights) out.weights.push_back(Matrix<S>::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) out.biases.push_back(Vector<S>::Zero(b.size()));
  return out;
}

template <class S>
bool MlpParams<S>::same_shape(const MlpParams& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != other.weights[i].rows() || weights[i].cols() != other.weights[i].cols())
      return false;
  }
  for (std::size_t i = 0; i < biases.size(); ++i) {
    if (biases[i].size() != other.biases[i].size()) return false;
  }
  return true;
}

template <class S>
Mlp<S> init_params(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  Mlp<S> net{spec, {}};
  const std::size_t layers = spec.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    Matrix<S> w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<S>(uniform(rng));
    if (l + 1 == layers && spec.head == OutputHead::tanh_scaled_pi) {
      w *= static_cast<S>(kFinalActorScale);
    }
    net.params.weights.push_back(std::move(w));
    net.params.biases.push_back(Vector<S>::Zero(fan_out));
  }
  return net;
}

template <class S>
Matrix<S> actor_head(const Matrix<S>& raw) {
  return static_cast<S>(kPi) * raw.array().tanh().matrix();
}

template <class S>
Matrix<S> mlp_forward(const Mlp<S>& net, const Matrix<S>& input, ForwardCache<S>* cache) {
  const auto& p = net.params;
  if (p.weights.empty()) throw DimensionError("mlp_forward: empty network");
  if (input.rows() != p.weights.front().cols()) {
    throw DimensionError(fmt::format("mlp_forward: input has {} rows, network expects {}",
                                     input.rows(), p.weights.front().cols()));
  }
  if (!input.allFinite()) throw NumericalError("mlp_forward: non-finite input");

  if (cache) {
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  Matrix<S> a = input;
  const std::size_t layers = p.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix<S> z = p.weights[l] * a;
    z.colwise() += p.biases[l];
    if (cache) {
      cache->inputs.push_back(std::move(a));
      cache->pre_activations.push_back(z);
    }
    if (l + 1 < layers) {
      a = z.cwiseMax(S(0));
    } else {
      a = net.spec.head == OutputHead::tanh_scaled_pi ? actor_head<S>(z) : std::move(z);
    }
  }
  if (cache) cache->output = a;
  return a;
}

template <class S>
BackwardResult<S> mlp_backward(const Mlp<S>& net, const ForwardCache<S>& cache,
                               const Matrix<S>& output_grad) {
  const auto& p = net.params;
  const std::size_t layers = p.num_layers();
  if (cache.inputs.size() != layers || cache.pre_activations.size() != layers) {
    throw DimensionError("mlp_backward: cache does not match the network depth");
  }
  const Eigen::Index batch = cache.output.cols();
  if (output_grad.rows() != cache.output.rows() || output_grad.cols() != batch) {
    throw DimensionError("mlp_backward: output gradient shape does not match the cached output");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (cache.inputs[l].rows() != p.weights[l].cols() || cache.inputs[l].cols() != batch ||
        cache.pre_activations[l].rows() != p.weights[l].rows()) {
      throw DimensionError("mlp_backward: stale cache");
    }
  }

  BackwardResult<S> out;
  out.param_grads.weights.resize(layers);
  out.param_grads.biases.resize(layers);

  Matrix<S> delta;
  if (net.spec.head == OutputHead::tanh_scaled_pi) {
    const auto t = cache.pre_activations.back().array().tanh();
    delta = (output_grad.array() * static_cast<S>(kPi) * (S(1) - t * t)).matrix();
  } else {
    delta = output_grad;
  }

  for (std::size_t l = layers; l-- > 0;) {
    out.param_grads.weights[l].noalias() = delta * cache.inputs[l].transpose();
    out.param_grads.biases[l] = delta.rowwise().sum();
    Matrix<S> upstream = p.weights[l].transpose() * delta;
    if (l > 0) {
      // ReLU'(0) = 0.
      delta = (upstream.array() * (cache.pre_activations[l - 1].array() > S(0)).template cast<S>())
                  .matrix();
    } else {
      out.input_grad = std::move(upstream);
    }
  }
  return out;
}

template <class S>
FourierKernel<S>::FourierKernel(int num_features, int input_dim, double stddev, Rng& rng)
    : projection_(num_features, input_dim) {
  if (num_features < 1 || input_dim < 1) throw DomainError("FourierKernel: dimensions must be >= 1");
  if (!(stddev >= 0.0)) throw DomainError("FourierKernel: stddev must be >= 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < projection_.size(); ++i) {
    projection_.data()[i] = static_cast<S>(stddev * normal(rng));
  }
}

template <class S>
FourierKernel<S>::FourierKernel(Matrix<S> projection) : projection_(std::move(projection)) {}

template <class S>
Matrix<S> fourier_features(const FourierKernel<S>& kernel, const Matrix<S>& input) {
  if (input.rows() != kernel.input_dim()) {
    throw DimensionError(fmt::format("fourier_features: input has {} rows, kernel expects {}",
                                     input.rows(), kernel.input_dim()));
  }
  const Eigen::Index k = kernel.projection().rows();
  const Matrix<S> z = static_cast<S>(2.0 * kPi) * (kernel.projection() * input);
  Matrix<S> v(2 * k, input.cols());
  v.topRows(k) = z.array().cos().matrix();
  v.bottomRows(k) = z.array().sin().matrix();
  return v;
}

template <class S>
Matrix<S> fourier_backward(const FourierKernel<S>& kernel, const Matrix<S>& input,
                           const Matrix<S>& feature_grad) {
  const Eigen::Index k = kernel.projection().rows();
  if (feature_grad.rows() != 2 * k || feature_grad.cols() != input.cols()) {
    throw DimensionError("fourier_backward: gradient shape mismatch");
  }
  const Matrix<S> z = static_cast<S>(2.0 * kPi) * (kernel.projection() * input);
  const Matrix<S> dz = (feature_grad.bottomRows(k).array() * z.array().cos() -
                        feature_grad.topRows(k).array() * z.array().sin())
                           .matrix();
  return static_cast<S>(2.0 * kPi) * (kernel.projection().transpose() * dz);
}

template <class S>
AdamState<S> make_adam(const MlpParams<S>& params, const AdamConfig& config) {
  return {config, params.zeros_like(), params.zeros_like(), 0};
}

template <class S>
void adam_step(MlpParams<S>& params, const MlpParams<S>& grads, AdamState<S>& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment)) {
    throw DimensionError("adam_step: parameter, gradient and moment shapes differ");
  }
  if (!grads.all_finite()) throw NumericalError("adam_step: non-finite gradient");

  const auto& c = state.config;
  ++state.step;
  const S b1 = static_cast<S>(c.beta1);
  const S b2 = static_cast<S>(c.beta2);
  const S correction1 = static_cast<S>(1.0 - std::pow(c.beta1, state.step));
  const S correction2 = static_cast<S>(1.0 - std::pow(c.beta2, state.step));
  const S lr = static_cast<S>(c.learning_rate);
  const S eps = static_cast<S>(c.epsilon);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (S(1) - b1) * grad;
    v = b2 * v + (S(1) - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    update(params.weights[l], grads.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(params.biases[l], grads.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

template <class S>
void polyak_update(MlpParams<S>& target, const MlpParams<S>& main, double tau) {
  if (!target.same_shape(main)) throw DimensionError("polyak_update: shape mismatch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("polyak_update: tau must be in [0, 1]");
  const S a = static_cast<S>(tau);
  const S b = static_cast<S>(1.0 - tau);
  for (std::size_t l = 0; l < target.num_layers(); ++l) {
    target.weights[l] = a * main.weights[l] + b * target.weights[l];
    target.biases[l] = a * main.biases[l] + b * target.biases[l];
  }
}

int critic_input_dim(int state_dim, int action_dim, int fourier_features_k, bool use_fourier) {
  return use_fourier ? 2 * fourier_features_k : state_dim + action_dim;
}

template <class S>
Matrix<S> critic_forward(const Critic<S>& critic, const Matrix<S>& states,
                         const Matrix<S>& actions, CriticCache<S>* cache) {
  if (states.rows() != critic.state_dim || actions.rows() != critic.action_dim ||
      states.cols() != actions.cols()) {
    throw DimensionError(fmt::format("critic_forward: got states {}x{}, actions {}x{}",
                                     states.rows(), states.cols(), actions.rows(), actions.cols()));
  }
  Matrix<S> joint(states.rows() + actions.rows(), states.cols());
  joint.topRows(states.rows()) = states;
  joint.bottomRows(actions.rows()) = actions;

  ForwardCache<S>* mlp_cache = cache ? &cache->mlp : nullptr;
  Matrix<S> q = critic.features
                    ? mlp_forward(critic.net, fourier_features(*critic.features, joint), mlp_cache)
                    : mlp_forward(critic.net, joint, mlp_cache);
  if (cache) cache->joint = std::move(joint);
  return q;
}

template <class S>
CriticGrads<S> critic_backward(const Critic<S>& critic, const CriticCache<S>& cache,
                               const Matrix<S>& q_grad) {
  BackwardResult<S> back = mlp_backward(critic.net, cache.mlp, q_grad);
  Matrix<S> joint_grad = critic.features
                             ? fourier_backward(*critic.features, cache.joint, back.input_grad)
                             : std::move(back.input_grad);
  return {std::move(back.param_grads), joint_grad.bottomRows(critic.action_dim)};
}

#define IRSRL_NN_INSTANTIATE(S)                                                                   \
  template struct MlpParams<S>;                                                                   \
  template class FourierKernel<S>;                                                                \
  template Mlp<S> init_params<S>(const NetworkSpec&, Rng&);                                       \
  template Matrix<S> actor_head<S>(const Matrix<S>&);                                             \
  template Matrix<S> mlp_forward<S>(const Mlp<S>&, const Matrix<S>&, ForwardCache<S>*);            \
  template BackwardResult<S> mlp_backward<S>(const Mlp<S>&, const ForwardCache<S>&,                \
                                             const Matrix<S>&);                                   \
  template Matrix<S> fourier_features<S>(const FourierKernel<S>&, const Matrix<S>&);               \
  template Matrix<S> fourier_backward<S>(const FourierKernel<S>&, const Matrix<S>&,                \
                                         const Matrix<S>&);                                       \
  template AdamState<S> make_adam<S>(const MlpParams<S>&, const AdamConfig&);                      \
  template void adam_step<S>(MlpParams<S>&, const MlpParams<S>&, AdamState<S>&);                   \
  template void polyak_update<S>(MlpParams<S>&, const MlpParams<S>&, double);                      \
  template Matrix<S> critic_forward<S>(const Critic<S>&, const Matrix<S>&, const Matrix<S>&,       \
                                       CriticCache<S>*);                                          \
  template CriticGrads<S> critic_backward<S>(const Critic<S>&, const CriticCache<S>&,              \
                                             const Matrix<S>&);

IRSRL_NN_INSTANTIATE(float)
IRSRL_NN_INSTANTIATE(double)

#undef IRSRL_NN_INSTANTIATE

}  // namespace irsrl::nn
