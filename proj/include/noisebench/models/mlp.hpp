#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "noisebench/error.hpp"
#include "noisebench/models.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

// Fully connected net: ReLU hidden layers, softmax output, mean-reduced
// cross-entropy. Templated on the scalar so training runs in float while
// the finite-difference harness runs the identical code in double.
template <class T>
struct MlpNet {
  struct Layer {
    std::size_t in = 0, out = 0;
    std::vector<T> weights;  // out x in, row-major
    std::vector<T> biases;   // out
  };
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t output_dim() const { return layers.back().out; }

  // He-scaled seeded Gaussian init: W ~ N(0, 2 / fan_in), biases zero.
  static MlpNet he_init(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw argument_error("mlp: need at least input and output dims");
    MlpNet net;
    Rng rng(mix64_seq({seed, 0x4D4C'5049'4E49'5400ULL}));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      Layer layer;
      layer.in = dims[l];
      layer.out = dims[l + 1];
      layer.weights.resize(layer.in * layer.out);
      layer.biases.assign(layer.out, T(0));
      double scale = std::sqrt(2.0 / static_cast<double>(layer.in));
      for (T& w : layer.weights) w = static_cast<T>(scale * rng.next_gaussian());
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  MlpNet zeros_like() const {
    MlpNet g;
    for (const Layer& layer : layers) {
      Layer zero;
      zero.in = layer.in;
      zero.out = layer.out;
      zero.weights.assign(layer.weights.size(), T(0));
      zero.biases.assign(layer.biases.size(), T(0));
      g.layers.push_back(std::move(zero));
    }
    return g;
  }

  struct Workspace {
    // pre[l] and act[l] are batch x layers[l].out; act of the last layer
    // holds softmax probabilities.
    std::vector<std::vector<T>> pre, act;
  };

  void forward(const T* X, std::size_t batch, Workspace& ws) const {
    const std::size_t n_layers = layers.size();
    ws.pre.resize(n_layers);
    ws.act.resize(n_layers);
    const T* input = X;
    std::size_t input_width = layers.front().in;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const Layer& layer = layers[l];
      ws.pre[l].assign(batch * layer.out, T(0));
      for (std::size_t i = 0; i < batch; ++i) {
        const T* x = input + i * input_width;
        T* z = ws.pre[l].data() + i * layer.out;
        for (std::size_t o = 0; o < layer.out; ++o) {
          const T* w = layer.weights.data() + o * layer.in;
          T acc = layer.biases[o];
          for (std::size_t k = 0; k < layer.in; ++k) acc += w[k] * x[k];
          z[o] = acc;
        }
      }
      ws.act[l] = ws.pre[l];
      if (l + 1 < n_layers) {
        for (T& v : ws.act[l])
          if (v < T(0)) v = T(0);
      } else {
        for (std::size_t i = 0; i < batch; ++i) {
          T* row = ws.act[l].data() + i * layer.out;
          T peak = row[0];
          for (std::size_t o = 1; o < layer.out; ++o) peak = std::max(peak, row[o]);
          T total = T(0);
          for (std::size_t o = 0; o < layer.out; ++o) {
            row[o] = std::exp(row[o] - peak);
            total += row[o];
          }
          for (std::size_t o = 0; o < layer.out; ++o) row[o] /= total;
        }
      }
      input = ws.act[l].data();
      input_width = layer.out;
    }
  }

  // Mean cross-entropy of the workspace's probabilities against 1-based labels.
  double mean_cross_entropy(const Workspace& ws, const int* y, std::size_t batch) const {
    const std::size_t n_out = layers.back().out;
    const std::vector<T>& probs = ws.act.back();
    double loss = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      double p = static_cast<double>(probs[i * n_out + static_cast<std::size_t>(y[i] - 1)]);
      loss -= std::log(std::max(p, 1e-300));
    }
    return loss / static_cast<double>(batch);
  }

  // Gradients of the mean cross-entropy; grads must be zeros_like(*this).
  void backward(const T* X, std::size_t batch, const int* y, const Workspace& ws,
                MlpNet& grads) const {
    const std::size_t n_layers = layers.size();
    // (softmax - onehot) / batch
    std::vector<T> delta = ws.act.back();
    {
      const std::size_t n_out = layers.back().out;
      T inv = T(1) / static_cast<T>(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        delta[i * n_out + static_cast<std::size_t>(y[i] - 1)] -= T(1);
        for (std::size_t o = 0; o < n_out; ++o) delta[i * n_out + o] *= inv;
      }
    }
    for (std::size_t l = n_layers; l-- > 0;) {
      const Layer& layer = layers[l];
      typename MlpNet::Layer& g = grads.layers[l];
      const T* below = l == 0 ? X : ws.act[l - 1].data();
      for (std::size_t i = 0; i < batch; ++i) {
        const T* dz = delta.data() + i * layer.out;
        const T* a = below + i * layer.in;
        for (std::size_t o = 0; o < layer.out; ++o) {
          T dzo = dz[o];
          if (dzo == T(0)) continue;
          g.biases[o] += dzo;
          T* gw = g.weights.data() + o * layer.in;
          for (std::size_t k = 0; k < layer.in; ++k) gw[k] += dzo * a[k];
        }
      }
      if (l == 0) break;
      std::vector<T> next(batch * layer.in, T(0));
      for (std::size_t i = 0; i < batch; ++i) {
        const T* dz = delta.data() + i * layer.out;
        T* dn = next.data() + i * layer.in;
        for (std::size_t o = 0; o < layer.out; ++o) {
          T dzo = dz[o];
          if (dzo == T(0)) continue;
          const T* w = layer.weights.data() + o * layer.in;
          for (std::size_t k = 0; k < layer.in; ++k) dn[k] += dzo * w[k];
        }
        const T* z = ws.pre[l - 1].data() + i * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k)
          if (z[k] <= T(0)) dn[k] = T(0);  // ReLU gate (derivative 0 at 0)
      }
      delta = std::move(next);
    }
  }
};

// Max relative backprop-vs-central-difference error over all parameters
// (step 1e-5, double precision). Relative error uses
// |a - b| / max(|a|, |b|, 1e-6).
double mlp_gradient_check(MlpNet<double>& net, const Matrix& X, const std::vector<int>& y);
double mlp_gradient_check(const std::vector<std::size_t>& dims, const Matrix& X,
                          const std::vector<int>& y, std::uint64_t seed);

class MlpModel final : public TrainedModel {
 public:
  MlpModel(MlpNet<float> net, std::vector<double> epoch_losses, int n_classes);

  // Mean training loss per epoch, in order.
  const std::vector<double>& training_loss_history() const { return epoch_losses_; }
  std::uint64_t param_hash() const override;

 protected:
  std::vector<int> do_predict(const Matrix& X) const override;
  Matrix do_predict_proba(const Matrix& X) const override;

 private:
  MlpNet<float> net_;
  std::vector<double> epoch_losses_;
};

// Adam-trained MLP; epoch shuffles and the He init derive from spec seed.
std::unique_ptr<MlpModel> fit_mlp(const MlpParams& params, std::uint64_t seed, const Matrix& X,
                                  const std::vector<int>& y, int n_classes);

}  // namespace noisebench
