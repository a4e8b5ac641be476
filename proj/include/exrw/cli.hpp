#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exrw/control.hpp"
#include "exrw/embedding.hpp"
#include "exrw/trainer.hpp"

namespace exrw::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

enum class RewriterKind { identity, remote };

struct RewriterConfig {
  RewriterKind kind = RewriterKind::identity;
  std::optional<std::string> endpoint;
  int timeout_ms = 60000;
  int max_in_flight = 4;
};

/// Everything a subcommand needs, merged from defaults, the JSON config
/// file, the environment and command-line flags (in increasing precedence).
struct CliConfig {
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> dev;
  std::optional<std::filesystem::path> test;
  std::optional<std::filesystem::path> checkpoint;
  std::filesystem::path out = "out";
  ControlConfig control;
  EmbeddingProviderConfig embedding;
  RewriterConfig rewriter;
  ExtractionMode mode = ExtractionMode::greedy;
  GridSpec grid;
};

/// Parses the JSON config file layout:
/// {"train","dev","test","checkpoint","out","mode","control":{...},
///  "embedding":{...},"rewriter":{...},"grid":{...}}
CliConfig config_from_json(const nlohmann::json& j);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace exrw::cli
