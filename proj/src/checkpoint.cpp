#include "exrw/checkpoint.hpp"

#include <fstream>

namespace exrw {

namespace {

nlohmann::json mlp_to_json(const Mlp& p) {
  return {{"in_dim", p.in_dim()},
          {"weights", std::vector<double>(p.weights.data(), p.weights.data() + p.weights.size())},
          {"bias", p.bias}};
}

Mlp mlp_from_json(const nlohmann::json& j, const std::string& name) {
  const auto in_dim = j.at("in_dim").get<Eigen::Index>();
  const auto weights = j.at("weights").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(weights.size()) != in_dim) {
    throw CheckpointError("model " + name + ": in_dim " + std::to_string(in_dim) + " but " +
                          std::to_string(weights.size()) + " weights");
  }
  Mlp p;
  p.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), in_dim);
  p.bias = j.at("bias").get<double>();
  return p;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  nlohmann::json j;
  j["format"] = "exrw-ckpt";
  j["version"] = kCheckpointVersion;
  j["dim"] = checkpoint.dim;
  j["models"] = nlohmann::json::object();
  for (const auto& [name, p] : checkpoint.models) {
    if (p.in_dim() != 5 * checkpoint.dim) {
      throw CheckpointError("model " + name + " has in_dim " + std::to_string(p.in_dim()) +
                            ", expected " + std::to_string(5 * checkpoint.dim));
    }
    j["models"][name] = mlp_to_json(p);
  }
  j["config"] = to_json(checkpoint.config);

  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "exrw-ckpt") throw CheckpointError("not an exrw checkpoint: " + path.string());
  const auto version = j.value("version", -1);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ckpt;
  ckpt.dim = j.at("dim").get<int>();
  if (expected_dim > 0 && ckpt.dim != expected_dim) {
    throw CheckpointError("checkpoint dim mismatch: expected " + std::to_string(expected_dim) + ", found " +
                          std::to_string(ckpt.dim));
  }
  for (const auto& [name, m] : j.at("models").items()) {
    auto p = mlp_from_json(m, name);
    if (p.in_dim() != 5 * ckpt.dim) {
      throw CheckpointError("model " + name + ": expected in_dim " + std::to_string(5 * ckpt.dim) +
                            ", found " + std::to_string(p.in_dim()));
    }
    ckpt.models.emplace(name, std::move(p));
  }
  if (auto it = j.find("config"); it != j.end()) ckpt.config = control_from_json(*it);
  return ckpt;
}

}  // namespace exrw
