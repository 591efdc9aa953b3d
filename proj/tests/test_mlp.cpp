#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ucn/mlp.hpp"

using namespace ucn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("zero parameters produce zero outputs") {
  Rng rng(1);
  Mlp net = Mlp::make({3, 8, 8, 5}, rng);
  for (auto& l : net.layers) {
    l.w.setZero();
    l.b.setZero();
    if (l.norm) l.beta.setZero();
  }
  VectorXd s(3);
  s << 0.2, -1.0, 3.5;
  const VectorXd q = net.forward(s);
  REQUIRE(q.size() == 5);
  for (int i = 0; i < 5; ++i) REQUIRE(q(i) == 0.0);
}

TEST_CASE("normalization removes a constant pre-activation") {
  // All hidden units get the same pre-activation, so the normalized value
  // is zero everywhere and the output equals the head bias.
  Rng rng(2);
  Mlp net = Mlp::make({2, 4, 5}, rng);
  net.layers[0].w.setOnes();
  net.layers[0].b.setConstant(0.7);
  net.layers[0].beta.setZero();
  net.layers[1].w.setRandom();
  net.layers[1].b << 1, 2, 3, 4, 5;
  VectorXd s(2);
  s << 0.3, -0.9;
  const VectorXd q = net.forward(s);
  for (int i = 0; i < 5; ++i) REQUIRE(q(i) == Catch::Approx(i + 1.0));
}

TEST_CASE("toy forward pass matches a scalar recomputation") {
  Rng rng(3);
  Mlp net = Mlp::make({2, 3, 5}, rng);
  net.layers[0].w << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  net.layers[0].b << 0.5, -0.5, 0.0;
  net.layers[0].gamma << 1.0, 2.0, 1.0;
  net.layers[0].beta << 0.1, 0.2, 0.3;
  net.layers[1].w << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1, 0.5, -0.5, 2.0;
  net.layers[1].b << 0.0, 0.1, -0.1, 0.0, 1.0;

  const double x0 = 1.0, x1 = 2.0;
  // Scalar re-derivation of the same architecture.
  double z[3] = {x0 + 0.5, x1 - 0.5, x0 + x1};
  const double mu = (z[0] + z[1] + z[2]) / 3.0;
  double var = 0.0;
  for (double v : z) var += (v - mu) * (v - mu);
  var /= 3.0;
  const double inv = 1.0 / std::sqrt(var + kNormEps);
  double h[3], g[3] = {1.0, 2.0, 1.0}, be[3] = {0.1, 0.2, 0.3};
  for (int i = 0; i < 3; ++i)
    h[i] = std::max(0.0, g[i] * (z[i] - mu) * inv + be[i]);
  const double expect[5] = {h[0], h[1] + 0.1, h[2] - 0.1, h[0] + h[1] + h[2],
                            0.5 * h[0] - 0.5 * h[1] + 2.0 * h[2] + 1.0};

  VectorXd s(2);
  s << x0, x1;
  const VectorXd q = net.forward(s);
  for (int i = 0; i < 5; ++i)
    REQUIRE(q(i) == Catch::Approx(expect[i]).margin(1e-9));
}

TEST_CASE("batched forward equals per-column forward") {
  Rng rng(4);
  Mlp net = Mlp::make({3, 16, 16, 5}, rng);
  MatrixXd x = MatrixXd::Random(3, 7);
  const MatrixXd batch = net.forward(x);
  for (int c = 0; c < 7; ++c) {
    const VectorXd single = net.forward(VectorXd(x.col(c)));
    for (int r = 0; r < 5; ++r)
      REQUIRE(batch(r, c) == Catch::Approx(single(r)).margin(1e-12));
  }
}

TEST_CASE("argmax tie-break picks the lowest action code") {
  Rng rng(5);
  Mlp net = Mlp::make({2, 4, 5}, rng);
  for (auto& l : net.layers) {
    l.w.setZero();
    l.b.setZero();
    if (l.norm) l.beta.setZero();
  }
  VectorXd s(2);
  s << 0.4, 0.6;
  REQUIRE(net.argmax_action(s) == 0);  // all Q equal
  net.layers[1].b << 0.0, 1.0, 1.0, 0.5, 0.0;
  REQUIRE(net.argmax_action(s) == 1);  // tie between 1 and 2 -> lower code
}

TEST_CASE("argmax is invariant under positive rescaling of Q") {
  Rng rng(6);
  Mlp net = Mlp::make({3, 8, 5}, rng);
  Mlp scaled = net;
  scaled.layers[1].w *= 7.0;
  scaled.layers[1].b *= 7.0;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd s(3);
    s << rng.uniform(), rng.uniform(), rng.uniform();
    REQUIRE(net.argmax_action(s) == scaled.argmax_action(s));
  }
}

TEST_CASE("construction invariants") {
  Rng rng(7);
  Mlp net = Mlp::make({4, 10, 11, 5}, rng);
  REQUIRE(net.input_dim() == 4);
  REQUIRE(net.output_dim() == 5);
  REQUIRE(net.layers.size() == 3);
  REQUIRE(net.layers[0].norm);
  REQUIRE(net.layers[1].norm);
  REQUIRE_FALSE(net.layers[2].norm);
  // Uniform fan-in initialization bound.
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const double bound = 1.0 / std::sqrt(net.dims[l]);
    REQUIRE(net.layers[l].w.cwiseAbs().maxCoeff() <= bound);
    REQUIRE(net.layers[l].b.cwiseAbs().maxCoeff() <= bound);
  }
  // Norm parameters start at identity.
  REQUIRE(net.layers[0].gamma.isOnes());
  REQUIRE(net.layers[0].beta.isZero());
  // 2-3-5: 6 + 3 + 3 + 3 + 15 + 5.
  Mlp small = Mlp::make({2, 3, 5}, rng);
  REQUIRE(small.param_count() == 35);
  REQUIRE(small.same_shape(Mlp::make({2, 3, 5}, rng)));
  REQUIRE_FALSE(small.same_shape(net));
  // Deterministic init for a fixed stream.
  Rng ra(99), rb(99);
  Mlp a = Mlp::make({3, 6, 5}, ra);
  Mlp b = Mlp::make({3, 6, 5}, rb);
  REQUIRE(a.layers[0].w == b.layers[0].w);
  REQUIRE(a.layers[1].b == b.layers[1].b);
  REQUIRE_THROWS_AS(Mlp::make({3}, ra), std::invalid_argument);
}

TEST_CASE("forward rejects dimension mismatches") {
  Rng rng(8);
  Mlp net = Mlp::make({3, 4, 5}, rng);
  VectorXd bad(2);
  bad << 1.0, 2.0;
  REQUIRE_THROWS_AS(net.forward(bad), std::invalid_argument);
}
