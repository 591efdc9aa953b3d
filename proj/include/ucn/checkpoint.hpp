// Training snapshots: networks, optimizer moments, replay contents, and
// every random stream, serialized as JSON with exact double round-tripping
// so a resumed run continues bit-identically.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucn/agent.hpp"
#include "ucn/ducm1.hpp"
#include "ucn/ducm2.hpp"
#include "ucn/io.hpp"

namespace ucn {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  const auto d = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(d.data(),
                                           static_cast<Eigen::Index>(d.size()));
}

inline nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;  // row-major
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(flat)}};
}

inline Eigen::MatrixXd mat_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
    throw std::runtime_error("corrupt checkpoint: matrix size mismatch");
  Eigen::MatrixXd m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[i++];
  return m;
}

inline nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers) {
    nlohmann::json lj = {{"w", mat_to_json(l.w)},
                         {"b", vec_to_json(l.b)},
                         {"norm", l.norm}};
    if (l.norm) {
      lj["gamma"] = vec_to_json(l.gamma);
      lj["beta"] = vec_to_json(l.beta);
    }
    layers.push_back(std::move(lj));
  }
  return {{"dims", net.dims}, {"layers", std::move(layers)}};
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp net;
  net.dims = j.at("dims").get<std::vector<int>>();
  for (const auto& lj : j.at("layers")) {
    MlpLayer l;
    l.w = mat_from_json(lj.at("w"));
    l.b = vec_from_json(lj.at("b"));
    l.norm = lj.at("norm").get<bool>();
    if (l.norm) {
      l.gamma = vec_from_json(lj.at("gamma"));
      l.beta = vec_from_json(lj.at("beta"));
    }
    net.layers.push_back(std::move(l));
  }
  if (net.layers.size() + 1 != net.dims.size())
    throw std::runtime_error("corrupt checkpoint: layer count mismatch");
  return net;
}

inline nlohmann::json grads_to_json(const MlpGrads& g) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : g.layers) {
    nlohmann::json lj = {{"dw", mat_to_json(l.dw)}, {"db", vec_to_json(l.db)}};
    if (l.dgamma.size()) {
      lj["dgamma"] = vec_to_json(l.dgamma);
      lj["dbeta"] = vec_to_json(l.dbeta);
    }
    layers.push_back(std::move(lj));
  }
  return layers;
}

inline MlpGrads grads_from_json(const nlohmann::json& j) {
  MlpGrads g;
  for (const auto& lj : j) {
    LayerGrads l;
    l.dw = mat_from_json(lj.at("dw"));
    l.db = vec_from_json(lj.at("db"));
    if (lj.contains("dgamma")) {
      l.dgamma = vec_from_json(lj.at("dgamma"));
      l.dbeta = vec_from_json(lj.at("dbeta"));
    }
    g.layers.push_back(std::move(l));
  }
  return g;
}

inline nlohmann::json agent_to_json(const Agent& a) {
  nlohmann::json j;
  j["net"] = mlp_to_json(a.net);
  j["target"] = mlp_to_json(a.target);
  j["opt"] = {{"step", a.opt.step}};
  if (!a.opt.moments_m().layers.empty()) {
    j["opt"]["m"] = grads_to_json(a.opt.moments_m());
    j["opt"]["v"] = grads_to_json(a.opt.moments_v());
  }
  j["explore_rng"] = a.explore.state();
  j["sample_rng"] = a.sample.state();
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < a.replay.size(); ++i) {
    const Experience& e = a.replay[i];
    items.push_back({{"s", vec_to_json(e.s)},
                     {"a", e.a},
                     {"sn", vec_to_json(e.s_next)},
                     {"r", e.r},
                     {"t", e.terminal}});
  }
  j["replay"] = {{"capacity", a.replay.capacity()}, {"items", std::move(items)}};
  return j;
}

inline void agent_from_json(const nlohmann::json& j, Agent& a) {
  Mlp net = mlp_from_json(j.at("net"));
  Mlp target = mlp_from_json(j.at("target"));
  if (!net.same_shape(a.net) || !target.same_shape(a.target))
    throw std::runtime_error(
        "checkpoint: network architecture does not match the configuration");
  a.net = std::move(net);
  a.target = std::move(target);
  a.opt.step = j.at("opt").at("step").get<long>();
  if (j.at("opt").contains("m")) {
    a.opt.moments_m() = grads_from_json(j.at("opt").at("m"));
    a.opt.moments_v() = grads_from_json(j.at("opt").at("v"));
  } else {
    a.opt.moments_m() = MlpGrads{};
    a.opt.moments_v() = MlpGrads{};
  }
  a.explore.set_state(j.at("explore_rng").get<std::string>());
  a.sample.set_state(j.at("sample_rng").get<std::string>());
  const auto& rj = j.at("replay");
  if (rj.at("capacity").get<std::size_t>() != a.replay.capacity())
    throw std::runtime_error(
        "checkpoint: replay capacity does not match the configuration");
  a.replay.clear();
  for (const auto& ej : rj.at("items")) {
    Experience e;
    e.s = vec_from_json(ej.at("s"));
    e.a = ej.at("a").get<int>();
    e.s_next = vec_from_json(ej.at("sn"));
    e.r = ej.at("r").get<double>();
    e.terminal = ej.at("t").get<bool>();
    if (e.s.size() != a.net.input_dim() || e.s_next.size() != a.net.input_dim())
      throw std::runtime_error("corrupt checkpoint: experience dimension");
    a.replay.push(std::move(e));
  }
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const std::string& algo,
                            const std::string& config_hash, int episode,
                            const std::vector<Agent>& agents,
                            const Rng* plan_rng = nullptr) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash;
  j["algo"] = algo;
  j["episode"] = episode;
  if (plan_rng) j["plan_rng"] = plan_rng->state();
  nlohmann::json agents_j = nlohmann::json::array();
  for (const auto& a : agents) agents_j.push_back(detail::agent_to_json(a));
  j["agents"] = std::move(agents_j);
  auto out = open_output(path);
  out << j.dump() << '\n';
}

inline nlohmann::json read_checkpoint_file(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt checkpoint " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("corrupt checkpoint " + path);
  return j;
}

inline std::string checkpoint_algo(const nlohmann::json& j) {
  try {
    return j.at("algo").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corrupt checkpoint: ") + e.what());
  }
}

// Returns the episode index the snapshot was taken at.
inline int restore_checkpoint(const nlohmann::json& j,
                              const std::string& config_hash,
                              std::vector<Agent>& agents,
                              Rng* plan_rng = nullptr) {
  try {
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw std::runtime_error("checkpoint: unsupported version");
    if (j.at("config_hash").get<std::string>() != config_hash)
      throw std::runtime_error(
          "checkpoint: config hash mismatch (refusing to resume under a "
          "different configuration)");
    const auto& agents_j = j.at("agents");
    if (agents_j.size() != agents.size())
      throw std::runtime_error("checkpoint: agent count mismatch");
    for (std::size_t i = 0; i < agents.size(); ++i)
      detail::agent_from_json(agents_j[i], agents[i]);
    if (plan_rng) plan_rng->set_state(j.at("plan_rng").get<std::string>());
    return j.at("episode").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corrupt checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::string& path, const Ducm1Trainer& tr,
                            const std::string& config_hash) {
  save_checkpoint(path, "ducm1", config_hash, tr.episodes_done(), tr.agents());
}

inline void save_checkpoint(const std::string& path, Ducm2Trainer& tr,
                            const std::string& config_hash) {
  save_checkpoint(path, "ducm2", config_hash, tr.episodes_done(), tr.agents(),
                  &tr.plan_rng());
}

inline void load_checkpoint(const std::string& path, Ducm1Trainer& tr,
                            const std::string& config_hash) {
  const nlohmann::json j = read_checkpoint_file(path);
  if (checkpoint_algo(j) != "ducm1")
    throw std::runtime_error("checkpoint: wrong algorithm for this trainer");
  tr.set_episodes_done(restore_checkpoint(j, config_hash, tr.agents()));
}

inline void load_checkpoint(const std::string& path, Ducm2Trainer& tr,
                            const std::string& config_hash) {
  const nlohmann::json j = read_checkpoint_file(path);
  if (checkpoint_algo(j) != "ducm2")
    throw std::runtime_error("checkpoint: wrong algorithm for this trainer");
  tr.set_episodes_done(
      restore_checkpoint(j, config_hash, tr.agents(), &tr.plan_rng()));
}

}  // namespace ucn
