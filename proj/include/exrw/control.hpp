#pragma once

#include <cstdint>
#include <string_view>

#include "json.hpp"

namespace exrw {

/// Sign of the probability-regression term in the trajectory loss.
/// `literal` subtracts it from the REINFORCE term; `penalty` adds it.
enum class RegressionSign { literal, penalty };

RegressionSign parse_regression_sign(std::string_view name);
std::string_view to_string(RegressionSign sign);

/// Every knob of the extraction policy and its training schedule.
struct ControlConfig {
  double cl1 = 1.0;     // coverage weight
  double cl2 = 1.0;     // coherence weight
  double k = 3.0;       // sentence budget: floor(k + c * variance)
  double c = 20.0;
  double lambda = 0.5;  // regression-term weight
  double margin = 0.4;  // triplet margin
  double lr_pretrain = 1e-4;
  double lr_rl = 1e-6;
  double lr_coherence = 0.5;
  std::uint64_t seed = 0;
  int max_tn = 20;
  int coherence_epochs = 200;
  int pretrain_epochs = 5;
  int rl_epochs = 5;
  int batch_size = 1;  // trajectories per cluster per pretraining epoch
  RegressionSign regression_sign = RegressionSign::literal;

  /// Throws std::invalid_argument on a non-finite or out-of-range field.
  void validate() const;

  bool operator==(const ControlConfig&) const = default;
};

nlohmann::json to_json(const ControlConfig& config);

/// Fields absent from `j` keep the values already in `base`.
ControlConfig control_from_json(const nlohmann::json& j, ControlConfig base = {});

}  // namespace exrw
