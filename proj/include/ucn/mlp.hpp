// Per-agent Q-network: feed-forward net with a layer-norm after each hidden
// affine stage, rectifier nonlinearity, linear 5-output head.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ucn/rng.hpp"

namespace ucn {

inline constexpr double kNormEps = 1e-5;
inline constexpr int kQOutputs = 5;  // |A_i|

struct MlpLayer {
  Eigen::MatrixXd w;      // out x in
  Eigen::VectorXd b;      // out
  Eigen::VectorXd gamma;  // norm scale (hidden layers only)
  Eigen::VectorXd beta;   // norm shift
  bool norm = false;
};

class Mlp {
 public:
  std::vector<int> dims;        // input, hidden..., output
  std::vector<MlpLayer> layers;

  static Mlp make(std::vector<int> layer_dims, Rng& rng) {
    if (layer_dims.size() < 2)
      throw std::invalid_argument("Mlp::make: need at least input and output dims");
    Mlp net;
    net.dims = std::move(layer_dims);
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
      const int fan_in = net.dims[l];
      const int fan_out = net.dims[l + 1];
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      MlpLayer layer;
      layer.w.resize(fan_out, fan_in);
      layer.b.resize(fan_out);
      for (int r = 0; r < fan_out; ++r)
        for (int c = 0; c < fan_in; ++c)
          layer.w(r, c) = rng.uniform(-bound, bound);
      for (int r = 0; r < fan_out; ++r) layer.b(r) = rng.uniform(-bound, bound);
      layer.norm = l + 2 < net.dims.size();  // all but the output head
      if (layer.norm) {
        layer.gamma = Eigen::VectorXd::Ones(fan_out);
        layer.beta = Eigen::VectorXd::Zero(fan_out);
      }
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }

  // X: input_dim x batch. Returns output_dim x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
    if (x.rows() != input_dim())
      throw std::invalid_argument("Mlp::forward: input dimension mismatch");
    Eigen::MatrixXd h = x;
    for (const auto& layer : layers) {
      Eigen::MatrixXd z = (layer.w * h).colwise() + layer.b;
      if (layer.norm) {
        const Eigen::RowVectorXd mu = z.colwise().mean();
        Eigen::MatrixXd centered = z.rowwise() - mu;
        const Eigen::RowVectorXd var =
            centered.array().square().colwise().mean();
        const Eigen::RowVectorXd inv =
            (var.array() + kNormEps).sqrt().inverse();
        Eigen::MatrixXd xhat = centered.array().rowwise() * inv.array();
        Eigen::MatrixXd y =
            (xhat.array().colwise() * layer.gamma.array()).colwise() +
            layer.beta.array();
        h = y.cwiseMax(0.0);
      } else {
        h = std::move(z);
      }
    }
    return h;
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& s) const {
    return forward(Eigen::MatrixXd(s)).col(0);
  }

  // Greedy action; ties resolve to the lowest action code.
  int argmax_action(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd q = forward(s);
    int best = 0;
    for (int a = 1; a < q.size(); ++a)
      if (q(a) > q(best)) best = a;
    return best;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
      n += static_cast<std::size_t>(l.w.size()) + static_cast<std::size_t>(l.b.size());
      if (l.norm)
        n += static_cast<std::size_t>(l.gamma.size()) +
             static_cast<std::size_t>(l.beta.size());
    }
    return n;
  }

  bool same_shape(const Mlp& other) const { return dims == other.dims; }
};

}  // namespace ucn
