#include "wedgepipe/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "wedgepipe/errors.hpp"
#include "wedgepipe/hash.hpp"
#include "wedgepipe/stages.hpp"

#ifndef WEDGEPIPE_VERSION
#define WEDGEPIPE_VERSION "0.0.0"
#endif

namespace wedgepipe {

namespace fs = std::filesystem;
using nlohmann::json;

json build_manifest(const PipelineConfig& config, const std::vector<fs::path>& outputs, const json& stages, bool ok) {
  std::vector<fs::path> sorted = outputs;
  std::sort(sorted.begin(), sorted.end());
  json files = json::array();
  for (const auto& p : sorted) {
    files.push_back({{"path", p.lexically_relative(config.paths.output_dir).generic_string()},
                     {"sha256", sha256_file(p)},
                     {"bytes", fs::file_size(p)}});
  }
  return json{{"tool", "wedgepipe"},
              {"version", WEDGEPIPE_VERSION},
              {"status", ok ? "ok" : "failed"},
              {"config_hash", config_hash(config)},
              {"config", config_snapshot(config)},
              {"stages", stages},
              {"outputs", files}};
}

RunReport run_pipeline(const PipelineConfig& config, std::ostream* log) {
  RunReport report;
  StageLog stage_log;
  stage_log.echo = log;
  json stages = json::array();

  try {
    fs::create_directories(config.paths.output_dir);
  } catch (const fs::filesystem_error& e) {
    report.ok = false;
    report.error = e.what();
    return report;
  }
  StageEnv env = make_env(config, stage_log);

  for (Stage stage : kAllStages) {
    if (!config.enabled(stage)) continue;
    if (!report.ok) {
      stages.push_back({{"name", to_string(stage)}, {"status", "skipped"}});
      continue;
    }
    if (log) *log << "running " << to_string(stage) << '\n';
    try {
      run_stage(stage, env);
      stages.push_back({{"name", to_string(stage)}, {"status", "ok"}});
    } catch (const std::exception& e) {
      report.ok = false;
      report.failed_stage = to_string(stage);
      report.error = e.what();
      stages.push_back({{"name", to_string(stage)}, {"status", "failed"}, {"error", e.what()}});
      if (log) *log << "error: " << to_string(stage) << ": " << e.what() << '\n';
    }
  }

  report.outputs = stage_log.written;
  report.warnings = stage_log.warnings;
  report.manifest = config.paths.output_dir / "manifest.json";
  json manifest = build_manifest(config, report.outputs, stages, report.ok);
  std::ofstream out(report.manifest, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) {
    report.ok = false;
    report.error = "cannot write " + report.manifest.string();
  }
  return report;
}

}  // namespace wedgepipe
