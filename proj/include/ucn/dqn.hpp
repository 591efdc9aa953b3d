// DQN update machinery: exact backprop through the norm layers, global
// gradient-norm clipping, adaptive-moment or plain gradient-descent
// parameter updates, double-DQN target construction, hard target copies.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucn/mlp.hpp"
#include "ucn/replay.hpp"

namespace ucn {

struct LayerGrads {
  Eigen::MatrixXd dw;
  Eigen::VectorXd db;
  Eigen::VectorXd dgamma;
  Eigen::VectorXd dbeta;
};

struct MlpGrads {
  std::vector<LayerGrads> layers;

  static MlpGrads zeros_like(const Mlp& net) {
    MlpGrads g;
    g.layers.reserve(net.layers.size());
    for (const auto& l : net.layers) {
      LayerGrads lg;
      lg.dw = Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols());
      lg.db = Eigen::VectorXd::Zero(l.b.size());
      if (l.norm) {
        lg.dgamma = Eigen::VectorXd::Zero(l.gamma.size());
        lg.dbeta = Eigen::VectorXd::Zero(l.beta.size());
      }
      g.layers.push_back(std::move(lg));
    }
    return g;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& l : layers) {
      s += l.dw.squaredNorm() + l.db.squaredNorm();
      if (l.dgamma.size()) s += l.dgamma.squaredNorm() + l.dbeta.squaredNorm();
    }
    return s;
  }

  void scale(double f) {
    for (auto& l : layers) {
      l.dw *= f;
      l.db *= f;
      if (l.dgamma.size()) {
        l.dgamma *= f;
        l.dbeta *= f;
      }
    }
  }
};

// Caps the global gradient norm at clip_norm; returns the pre-clip norm.
inline double clip_global_norm(MlpGrads& g, double clip_norm) {
  const double norm = std::sqrt(g.squared_norm());
  if (clip_norm > 0.0 && norm > clip_norm) g.scale(clip_norm / norm);
  return norm;
}

struct LayerCache {
  Eigen::MatrixXd x_in;        // input to the affine stage
  Eigen::MatrixXd xhat;        // normalized pre-scale activations
  Eigen::RowVectorXd inv_std;  // per-sample 1/sqrt(var+eps)
  Eigen::MatrixXd y;           // post-norm, pre-rectifier
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::MatrixXd out;
};

inline ForwardCache forward_cached(const Mlp& net, const Eigen::MatrixXd& x) {
  if (x.rows() != net.input_dim())
    throw std::invalid_argument("forward_cached: input dimension mismatch");
  ForwardCache cache;
  cache.layers.resize(net.layers.size());
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    auto& c = cache.layers[l];
    c.x_in = h;
    Eigen::MatrixXd z = (layer.w * h).colwise() + layer.b;
    if (layer.norm) {
      const Eigen::RowVectorXd mu = z.colwise().mean();
      Eigen::MatrixXd centered = z.rowwise() - mu;
      const Eigen::RowVectorXd var =
          centered.array().square().colwise().mean();
      c.inv_std = (var.array() + kNormEps).sqrt().inverse();
      c.xhat = centered.array().rowwise() * c.inv_std.array();
      c.y = (c.xhat.array().colwise() * layer.gamma.array()).colwise() +
            layer.beta.array();
      h = c.y.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  cache.out = std::move(h);
  return cache;
}

// Mean squared error between targets and the predicted Q at the taken
// actions; fills g with exact gradients. Returns the loss.
inline double mse_loss_and_grads(const Mlp& net, const ForwardCache& cache,
                                 std::span<const int> actions,
                                 std::span<const double> targets,
                                 MlpGrads& g) {
  const int batch = static_cast<int>(cache.out.cols());
  if (static_cast<int>(actions.size()) != batch ||
      static_cast<int>(targets.size()) != batch)
    throw std::invalid_argument("mse_loss_and_grads: batch size mismatch");

  double loss = 0.0;
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(cache.out.rows(), batch);
  for (int m = 0; m < batch; ++m) {
    const double diff =
        cache.out(actions[static_cast<std::size_t>(m)], m) -
        targets[static_cast<std::size_t>(m)];
    loss += diff * diff;
    dh(actions[static_cast<std::size_t>(m)], m) = 2.0 * diff / batch;
  }
  loss /= batch;

  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const auto& layer = net.layers[static_cast<std::size_t>(l)];
    const auto& c = cache.layers[static_cast<std::size_t>(l)];
    auto& lg = g.layers[static_cast<std::size_t>(l)];
    Eigen::MatrixXd dz;
    if (layer.norm) {
      // through the rectifier
      Eigen::MatrixXd dy =
          dh.array() * (c.y.array() > 0.0).cast<double>();
      lg.dgamma = (dy.array() * c.xhat.array()).rowwise().sum();
      lg.dbeta = dy.rowwise().sum();
      Eigen::MatrixXd dxhat = dy.array().colwise() * layer.gamma.array();
      // through the normalization: per sample,
      // dz = inv/H * (H*dxhat - sum(dxhat) - xhat * sum(dxhat .* xhat))
      const double h_units = static_cast<double>(dxhat.rows());
      const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
      const Eigen::RowVectorXd sum_dxhat_xhat =
          (dxhat.array() * c.xhat.array()).colwise().sum();
      dz = (h_units * dxhat.array() -
            (Eigen::MatrixXd::Ones(dxhat.rows(), 1) * sum_dxhat).array() -
            c.xhat.array().rowwise() * sum_dxhat_xhat.array())
               .rowwise() *
           (c.inv_std.array() / h_units);
    } else {
      dz = dh;
    }
    lg.dw = dz * c.x_in.transpose();
    lg.db = dz.rowwise().sum();
    if (l > 0) dh = layer.w.transpose() * dz;
  }
  return loss;
}

enum class OptimizerKind { kAdam, kSgd };

// Parameter updater. Adam moments are laid out like the gradients.
class Optimizer {
 public:
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 2.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;

  Optimizer() = default;
  Optimizer(OptimizerKind k, double learning_rate) : kind(k), lr(learning_rate) {}

  void apply(Mlp& net, const MlpGrads& g) {
    if (kind == OptimizerKind::kSgd) {
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        const auto& lg = g.layers[l];
        layer.w -= lr * lg.dw;
        layer.b -= lr * lg.db;
        if (layer.norm) {
          layer.gamma -= lr * lg.dgamma;
          layer.beta -= lr * lg.dbeta;
        }
      }
      ++step;
      return;
    }
    if (m_.layers.empty()) {
      m_ = MlpGrads::zeros_like(net);
      v_ = MlpGrads::zeros_like(net);
    }
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto& layer = net.layers[l];
      const auto& lg = g.layers[l];
      adam_tensor(layer.w, lg.dw, m_.layers[l].dw, v_.layers[l].dw, bc1, bc2);
      adam_tensor(layer.b, lg.db, m_.layers[l].db, v_.layers[l].db, bc1, bc2);
      if (layer.norm) {
        adam_tensor(layer.gamma, lg.dgamma, m_.layers[l].dgamma,
                    v_.layers[l].dgamma, bc1, bc2);
        adam_tensor(layer.beta, lg.dbeta, m_.layers[l].dbeta,
                    v_.layers[l].dbeta, bc1, bc2);
      }
    }
  }

  MlpGrads& moments_m() { return m_; }
  MlpGrads& moments_v() { return v_; }
  const MlpGrads& moments_m() const { return m_; }
  const MlpGrads& moments_v() const { return v_; }

 private:
  template <typename T>
  void adam_tensor(T& param, const T& grad, T& m, T& v, double bc1,
                   double bc2) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v.array() = beta2 * v.array() + (1.0 - beta2) * grad.array().square();
    param.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  }

  MlpGrads m_;
  MlpGrads v_;
};

// Double-DQN targets: the online net selects the next action, the target
// net evaluates it. Terminal transitions collapse to the raw reward.
inline std::vector<double> ddqn_targets(
    std::span<const Experience* const> batch, const Mlp& main,
    const Mlp& target, double gamma) {
  if (batch.empty()) throw std::invalid_argument("ddqn_targets: empty batch");
  const int b = static_cast<int>(batch.size());
  Eigen::MatrixXd s_next(main.input_dim(), b);
  for (int m = 0; m < b; ++m)
    s_next.col(m) = batch[static_cast<std::size_t>(m)]->s_next;
  const Eigen::MatrixXd q_main = main.forward(s_next);
  const Eigen::MatrixXd q_target = target.forward(s_next);

  std::vector<double> out(static_cast<std::size_t>(b));
  for (int m = 0; m < b; ++m) {
    const Experience& e = *batch[static_cast<std::size_t>(m)];
    if (e.terminal) {
      out[static_cast<std::size_t>(m)] = e.r;
      continue;
    }
    int best = 0;
    for (int a = 1; a < q_main.rows(); ++a)
      if (q_main(a, m) > q_main(best, m)) best = a;
    out[static_cast<std::size_t>(m)] = e.r + gamma * q_target(best, m);
  }
  return out;
}

inline void hard_update(Mlp& target, const Mlp& main) {
  if (!target.same_shape(main))
    throw std::invalid_argument("hard_update: architecture mismatch");
  target.layers = main.layers;
}

struct TrainStats {
  double loss = 0.0;
  double grad_norm = 0.0;  // before clipping
};

// One mini-batch update: DDQN targets, MSE loss at taken actions, exact
// gradients, global-norm clip, parameter step.
inline TrainStats train_step(Mlp& net, const Mlp& target,
                             std::span<const Experience* const> batch,
                             Optimizer& opt, double gamma, double clip_norm) {
  const auto targets = ddqn_targets(batch, net, target, gamma);

  const int b = static_cast<int>(batch.size());
  Eigen::MatrixXd s(net.input_dim(), b);
  std::vector<int> actions(static_cast<std::size_t>(b));
  for (int m = 0; m < b; ++m) {
    s.col(m) = batch[static_cast<std::size_t>(m)]->s;
    actions[static_cast<std::size_t>(m)] = batch[static_cast<std::size_t>(m)]->a;
  }

  const ForwardCache cache = forward_cached(net, s);
  MlpGrads g = MlpGrads::zeros_like(net);
  const double loss = mse_loss_and_grads(net, cache, actions, targets, g);
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "train_step: non-finite loss " << loss << " (batch " << b
       << ", optimizer step " << opt.step << ")";
    throw std::runtime_error(os.str());
  }
  const double norm = clip_global_norm(g, clip_norm);
  opt.apply(net, g);
  return TrainStats{loss, norm};
}

}  // namespace ucn
