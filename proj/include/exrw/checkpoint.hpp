#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "exrw/control.hpp"
#include "exrw/neural.hpp"

namespace exrw {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int dim = 0;
  std::map<std::string, Mlp> models;  // "coverage_fwd", "coverage_bwd", "coherence"
  ControlConfig config;
};

/// Versioned JSON. Doubles are written in shortest round-trip form, so a
/// load reproduces every parameter bit-for-bit.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// `expected_dim` <= 0 skips the dimension check.
Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_dim = 0);

}  // namespace exrw
