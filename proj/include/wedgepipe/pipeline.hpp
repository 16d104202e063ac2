#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wedgepipe/config.hpp"

namespace wedgepipe {

struct RunReport {
  bool ok = true;
  std::string failed_stage;  ///< empty when every stage succeeded
  std::string error;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> warnings;
};

/// Runs the enabled stages in dependency order and writes manifest.json into
/// the output directory. A failing stage stops the run; the manifest is still
/// written and lists the files produced so far. Never throws for stage
/// errors; the report carries them.
RunReport run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

/// Manifest JSON: tool version, config hash and snapshot, stage statuses and
/// every output (path relative to the output directory, SHA-256, size).
nlohmann::json build_manifest(const PipelineConfig& config, const std::vector<std::filesystem::path>& outputs,
                              const nlohmann::json& stages, bool ok);

}  // namespace wedgepipe
