#include "noisebench/models/mlp.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace noisebench {

namespace {

// Adam state per layer, bias-corrected.
struct AdamState {
  std::vector<float> m_w, v_w, m_b, v_b;
};

void adam_step(MlpNet<float>::Layer& layer, const MlpNet<float>::Layer& grad, AdamState& state,
               const MlpParams& p, long step) {
  auto update = [&](std::vector<float>& theta, const std::vector<float>& g, std::vector<float>& m,
                    std::vector<float>& v) {
    const auto beta1 = static_cast<float>(p.beta1);
    const auto beta2 = static_cast<float>(p.beta2);
    const auto lr = static_cast<float>(p.learning_rate);
    const auto eps = static_cast<float>(p.adam_epsilon);
    const auto bias1 = static_cast<float>(1.0 - std::pow(p.beta1, static_cast<double>(step)));
    const auto bias2 = static_cast<float>(1.0 - std::pow(p.beta2, static_cast<double>(step)));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
      float m_hat = m[i] / bias1;
      float v_hat = v[i] / bias2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  };
  update(layer.weights, grad.weights, state.m_w, state.v_w);
  update(layer.biases, grad.biases, state.m_b, state.v_b);
}

std::vector<float> to_float_rows(const Matrix& X) {
  std::vector<float> out(X.rows() * X.cols());
  const double* src = X.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(src[i]);
  return out;
}

}  // namespace

double mlp_gradient_check(MlpNet<double>& net, const Matrix& X, const std::vector<int>& y) {
  const std::size_t batch = X.rows();
  std::vector<double> flat(X.data(), X.data() + X.rows() * X.cols());

  MlpNet<double>::Workspace ws;
  net.forward(flat.data(), batch, ws);
  MlpNet<double> analytic = net.zeros_like();
  net.backward(flat.data(), batch, y.data(), ws, analytic);

  constexpr double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& theta, double analytic_grad) {
    const double saved = theta;
    theta = saved + h;
    net.forward(flat.data(), batch, ws);
    double up = net.mean_cross_entropy(ws, y.data(), batch);
    theta = saved - h;
    net.forward(flat.data(), batch, ws);
    double down = net.mean_cross_entropy(ws, y.data(), batch);
    theta = saved;
    double numeric = (up - down) / (2.0 * h);
    double rel = std::fabs(analytic_grad - numeric) /
                 std::max({std::fabs(analytic_grad), std::fabs(numeric), 1e-6});
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    auto& grad = analytic.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) probe(layer.weights[i], grad.weights[i]);
    for (std::size_t i = 0; i < layer.biases.size(); ++i) probe(layer.biases[i], grad.biases[i]);
  }
  return worst;
}

double mlp_gradient_check(const std::vector<std::size_t>& dims, const Matrix& X,
                          const std::vector<int>& y, std::uint64_t seed) {
  MlpNet<double> net = MlpNet<double>::he_init(dims, seed);
  return mlp_gradient_check(net, X, y);
}

MlpModel::MlpModel(MlpNet<float> net, std::vector<double> epoch_losses, int n_classes)
    : net_(std::move(net)), epoch_losses_(std::move(epoch_losses)) {
  family_ = ModelFamily::Mlp;
  input_dim_ = net_.input_dim();
  n_classes_ = n_classes;
}

std::uint64_t MlpModel::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb = [&h](const std::vector<float>& v) {
    for (float x : v) {
      std::uint32_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      h ^= bits;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& layer : net_.layers) {
    absorb(layer.weights);
    absorb(layer.biases);
  }
  return h;
}

std::vector<int> MlpModel::do_predict(const Matrix& X) const {
  Matrix proba = do_predict_proba(X);
  std::vector<int> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto row = proba.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
      if (row[c] > row[best]) best = c;  // ties keep the lowest label
    out[i] = static_cast<int>(best) + 1;
  }
  return out;
}

Matrix MlpModel::do_predict_proba(const Matrix& X) const {
  const std::size_t batch = X.rows();
  std::vector<float> flat = to_float_rows(X);
  MlpNet<float>::Workspace ws;
  net_.forward(flat.data(), batch, ws);

  const std::size_t n_out = net_.output_dim();
  Matrix proba(batch, n_out);
  for (std::size_t i = 0; i < batch; ++i) {
    auto row = proba.row(i);
    double total = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) {
      row[o] = static_cast<double>(ws.act.back()[i * n_out + o]);
      total += row[o];
    }
    for (std::size_t o = 0; o < n_out; ++o) row[o] /= total;
  }
  return proba;
}

std::unique_ptr<MlpModel> fit_mlp(const MlpParams& params, std::uint64_t seed, const Matrix& X,
                                  const std::vector<int>& y, int n_classes) {
  if (params.epochs < 1) throw argument_error("mlp: epochs must be >= 1");
  if (params.batch_size < 1) throw argument_error("mlp: batch_size must be >= 1");

  const std::size_t n = X.rows(), d = X.cols();
  std::vector<std::size_t> dims;
  dims.push_back(d);
  for (std::size_t width : params.hidden_layers) dims.push_back(width);
  dims.push_back(static_cast<std::size_t>(n_classes));

  MlpNet<float> net = MlpNet<float>::he_init(dims, seed);
  std::vector<AdamState> adam(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    adam[l].m_w.assign(net.layers[l].weights.size(), 0.0f);
    adam[l].v_w.assign(net.layers[l].weights.size(), 0.0f);
    adam[l].m_b.assign(net.layers[l].biases.size(), 0.0f);
    adam[l].v_b.assign(net.layers[l].biases.size(), 0.0f);
  }

  std::vector<float> flat = to_float_rows(X);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const auto batch_size = static_cast<std::size_t>(params.batch_size);
  std::vector<float> batch_x(batch_size * d);
  std::vector<int> batch_y(batch_size);
  MlpNet<float>::Workspace ws;
  MlpNet<float> grads = net.zeros_like();

  std::vector<double> epoch_losses;
  epoch_losses.reserve(static_cast<std::size_t>(params.epochs));
  long step = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    Rng shuffle_rng(mix64_seq({seed, 0x4D4C'5053'4855'4600ULL, static_cast<std::uint64_t>(epoch)}));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      for (std::size_t i = 0; i < count; ++i) {
        std::memcpy(batch_x.data() + i * d, flat.data() + order[start + i] * d,
                    d * sizeof(float));
        batch_y[i] = y[order[start + i]];
      }
      net.forward(batch_x.data(), count, ws);
      epoch_loss += net.mean_cross_entropy(ws, batch_y.data(), count) * static_cast<double>(count);
      for (auto& layer : grads.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0f);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0f);
      }
      net.backward(batch_x.data(), count, batch_y.data(), ws, grads);
      ++step;
      for (std::size_t l = 0; l < net.layers.size(); ++l)
        adam_step(net.layers[l], grads.layers[l], adam[l], params, step);
    }
    epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }

  return std::make_unique<MlpModel>(std::move(net), std::move(epoch_losses), n_classes);
}

}  // namespace noisebench
