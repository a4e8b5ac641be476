#include "exrw/control.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exrw {

RegressionSign parse_regression_sign(std::string_view name) {
  if (name == "paper" || name == "literal") return RegressionSign::literal;
  if (name == "penalty") return RegressionSign::penalty;
  throw std::invalid_argument("unknown regression_sign: " + std::string(name));
}

std::string_view to_string(RegressionSign sign) {
  return sign == RegressionSign::literal ? "paper" : "penalty";
}

void ControlConfig::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0) throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  };
  nonneg(cl1, "cl1");
  nonneg(cl2, "cl2");
  nonneg(k, "k");
  nonneg(c, "c");
  nonneg(lambda, "lambda");
  nonneg(lr_pretrain, "lr_pretrain");
  nonneg(lr_rl, "lr_rl");
  nonneg(lr_coherence, "lr_coherence");
  if (!std::isfinite(margin) || margin <= 0) throw std::invalid_argument("margin must be > 0");
  if (max_tn < 1) throw std::invalid_argument("max_tn must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (coherence_epochs < 0 || pretrain_epochs < 0 || rl_epochs < 0) {
    throw std::invalid_argument("epoch counts must be >= 0");
  }
}

nlohmann::json to_json(const ControlConfig& c) {
  return {
      {"cl1", c.cl1},
      {"cl2", c.cl2},
      {"k", c.k},
      {"c", c.c},
      {"lambda", c.lambda},
      {"margin", c.margin},
      {"lr_pretrain", c.lr_pretrain},
      {"lr_rl", c.lr_rl},
      {"lr_coherence", c.lr_coherence},
      {"seed", c.seed},
      {"max_tn", c.max_tn},
      {"coherence_epochs", c.coherence_epochs},
      {"pretrain_epochs", c.pretrain_epochs},
      {"rl_epochs", c.rl_epochs},
      {"batch_size", c.batch_size},
      {"regression_sign", std::string(to_string(c.regression_sign))},
  };
}

ControlConfig control_from_json(const nlohmann::json& j, ControlConfig c) {
  auto get = [&](const char* key, auto& field) {
    if (auto it = j.find(key); it != j.end()) it->get_to(field);
  };
  get("cl1", c.cl1);
  get("cl2", c.cl2);
  get("k", c.k);
  get("c", c.c);
  get("lambda", c.lambda);
  get("margin", c.margin);
  get("lr_pretrain", c.lr_pretrain);
  get("lr_rl", c.lr_rl);
  get("lr_coherence", c.lr_coherence);
  get("seed", c.seed);
  get("max_tn", c.max_tn);
  get("coherence_epochs", c.coherence_epochs);
  get("pretrain_epochs", c.pretrain_epochs);
  get("rl_epochs", c.rl_epochs);
  get("batch_size", c.batch_size);
  if (auto it = j.find("regression_sign"); it != j.end()) {
    c.regression_sign = parse_regression_sign(it->get<std::string>());
  }
  return c;
}

}  // namespace exrw
