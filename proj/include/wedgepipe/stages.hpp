#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wedgepipe/config.hpp"
#include "wedgepipe/corpus.hpp"
#include "wedgepipe/elites.hpp"
#include "wedgepipe/ideology.hpp"
#include "wedgepipe/series.hpp"

namespace wedgepipe {

/// Files written and warnings raised while running stages.
struct StageLog {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
  std::ostream* echo = nullptr;  ///< receives warnings as they happen

  void warn(std::string message);
  void wrote(const std::filesystem::path& path);
};

struct StageEnv {
  const PipelineConfig& config;
  Artifacts artifacts;
  std::string config_hash;
  int threads = 1;
  StageLog& log;
};

/// Builds an environment with artifacts in config.paths.output_dir, the
/// config hash, and the effective worker count.
StageEnv make_env(const PipelineConfig& config, StageLog& log);

/// `# wedgepipe <version> config_hash=<hash> seed=<seed>`
std::string csv_stamp(std::string_view config_hash, std::uint64_t seed);

/// Fixed formatting for floating-point CSV cells.
std::string format_number(double v);

void run_induce(StageEnv& env);
void run_tag(StageEnv& env);
void run_ideology(StageEnv& env);
void run_moral(StageEnv& env);
void run_series(StageEnv& env);
void run_acf(StageEnv& env);
void run_framing(StageEnv& env);
void run_elites(StageEnv& env);
void run_stage(Stage stage, StageEnv& env);

// ---------------------------------------------------------------------------
// Helpers for reading stage outputs

/// Normalized token sequences of the regular files directly inside `dir`,
/// in file-name order.
std::vector<TokenSeq> read_documents(const std::filesystem::path& dir);

/// user_id -> group from an ideology CSV: the URL label when it is liberal or
/// conservative, else the predicted label.
std::map<std::string, Leaning> read_user_groups(const std::filesystem::path& ideology_csv);

/// DocRecords from a moral JSONL file. `roster` marks elite accounts.
std::vector<DocRecord> read_doc_records(const std::filesystem::path& moral_jsonl,
                                        const std::map<std::string, Leaning>& groups,
                                        const EliteRoster* roster = nullptr);

}  // namespace wedgepipe
