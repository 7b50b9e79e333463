#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "irsrl/rng.hpp"

// Dense networks with hand-written reverse mode.
//
// Everything is templated on the scalar: training runs in float, gradient
// checks instantiate double. Batches are stored column-wise (features x
// batch).
namespace irsrl::nn {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class OutputHead {
  linear,          // critics
  tanh_scaled_pi,  // actor: pi * tanh(z)
};

struct NetworkSpec {
  std::vector<int> layer_sizes;  // {in, hidden..., out}
  OutputHead head = OutputHead::linear;

  void validate() const;
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

/// Weights are (fan_out x fan_in). Also used as the gradient container.
template <class S>
struct MlpParams {
  std::vector<Matrix<S>> weights;
  std::vector<Vector<S>> biases;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_parameters() const;
  bool all_finite() const;
  MlpParams zeros_like() const;
  bool same_shape(const MlpParams& other) const;

  template <class T>
  MlpParams<T> cast() const {
    MlpParams<T> out;
    for (const auto& w : weights) out.weights.push_back(w.template cast<T>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<T>());
    return out;
  }
};

template <class S>
struct Mlp {
  NetworkSpec spec;
  MlpParams<S> params;

  template <class T>
  Mlp<T> cast() const {
    return {spec, params.template cast<T>()};
  }
};

template <class S>
struct ForwardCache {
  std::vector<Matrix<S>> inputs;          // input of each layer
  std::vector<Matrix<S>> pre_activations; // W a + b of each layer
  Matrix<S> output;
};

template <class S>
struct BackwardResult {
  MlpParams<S> param_grads;  // summed over the batch
  Matrix<S> input_grad;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases. Actor heads
/// get their last layer scaled by 1e-2 so initial phase increments are small.
template <class S>
Mlp<S> init_params(const NetworkSpec& spec, Rng& rng);

/// ReLU between layers, head applied at the end. `cache` may be null.
template <class S>
Matrix<S> mlp_forward(const Mlp<S>& net, const Matrix<S>& input, ForwardCache<S>* cache = nullptr);

template <class S>
BackwardResult<S> mlp_backward(const Mlp<S>& net, const ForwardCache<S>& cache,
                               const Matrix<S>& output_grad);

/// pi * tanh(raw), componentwise.
template <class S>
Matrix<S> actor_head(const Matrix<S>& raw);

/// Random Fourier feature map v = [cos(2 pi B x); sin(2 pi B x)]. B is fixed
/// at construction.
template <class S>
class FourierKernel {
 public:
  FourierKernel(int num_features, int input_dim, double stddev, Rng& rng);
  explicit FourierKernel(Matrix<S> projection);

  const Matrix<S>& projection() const { return projection_; }
  int input_dim() const { return static_cast<int>(projection_.cols()); }
  int output_dim() const { return 2 * static_cast<int>(projection_.rows()); }

  template <class T>
  FourierKernel<T> cast() const {
    return FourierKernel<T>(projection_.template cast<T>());
  }

 private:
  Matrix<S> projection_;  // k x d
};

template <class S>
Matrix<S> fourier_features(const FourierKernel<S>& kernel, const Matrix<S>& input);

/// Gradient with respect to the input of fourier_features.
template <class S>
Matrix<S> fourier_backward(const FourierKernel<S>& kernel, const Matrix<S>& input,
                           const Matrix<S>& feature_grad);

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <class S>
struct AdamState {
  AdamConfig config;
  MlpParams<S> first_moment;
  MlpParams<S> second_moment;
  long step = 0;
};

template <class S>
AdamState<S> make_adam(const MlpParams<S>& params, const AdamConfig& config);

/// Bias-corrected Adam descent step. Throws NumericalError (and leaves
/// everything untouched) if a gradient is not finite.
template <class S>
void adam_step(MlpParams<S>& params, const MlpParams<S>& grads, AdamState<S>& state);

/// target <- tau * main + (1 - tau) * target.
template <class S>
void polyak_update(MlpParams<S>& target, const MlpParams<S>& main, double tau);

/// Q(s, a): an MLP over [s; a], optionally passed through a shared Fourier
/// feature map first.
template <class S>
struct Critic {
  Mlp<S> net;
  std::shared_ptr<const FourierKernel<S>> features;
  int state_dim = 0;
  int action_dim = 0;

  template <class T>
  Critic<T> cast() const {
    Critic<T> out{net.template cast<T>(), nullptr, state_dim, action_dim};
    if (features) out.features = std::make_shared<const FourierKernel<T>>(features->template cast<T>());
    return out;
  }
};

template <class S>
struct CriticCache {
  Matrix<S> joint;  // [s; a]
  ForwardCache<S> mlp;
};

template <class S>
struct CriticGrads {
  MlpParams<S> param_grads;
  Matrix<S> action_grad;
};

/// Input width of the critic MLP: 2k with Fourier features, else ds + da.
int critic_input_dim(int state_dim, int action_dim, int fourier_features_k, bool use_fourier);

/// Returns a 1 x batch row of Q values.
template <class S>
Matrix<S> critic_forward(const Critic<S>& critic, const Matrix<S>& states,
                         const Matrix<S>& actions, CriticCache<S>* cache = nullptr);

template <class S>
CriticGrads<S> critic_backward(const Critic<S>& critic, const CriticCache<S>& cache,
                               const Matrix<S>& q_grad);

}  // namespace irsrl::nn
