#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wedgepipe/dates.hpp"
#include "wedgepipe/moral.hpp"
#include "wedgepipe/series.hpp"

namespace wedgepipe {

// ---------------------------------------------------------------------------
// TOML subset: [section] headers, key = value pairs, '#' comments. Values are
// strings ("basic" or 'literal'), integers, floats, booleans, bare
// YYYY-MM-DD dates (read as strings) and arrays of those, which may span
// lines. Tables map to JSON objects.

/// Throws ConfigError("line N: ...") on syntax errors or duplicate keys.
nlohmann::json parse_toml(std::istream& in);
nlohmann::json parse_toml_file(const std::filesystem::path& path);

/// Parses a single TOML value (as it would appear after '=').
nlohmann::json parse_toml_value(std::string_view text);

/// Sets `section.key` in a parsed document from a TOML value literal; a bare
/// word that is not a valid value is taken as a string.
void apply_override(nlohmann::json& doc, std::string_view dotted_key, std::string_view value);

// ---------------------------------------------------------------------------

enum class Stage : std::uint8_t { induce, tag, ideology, moral, series, acf, framing, elites };

inline constexpr Stage kAllStages[] = {Stage::induce, Stage::tag,    Stage::ideology, Stage::moral,
                                       Stage::series, Stage::acf,    Stage::framing,  Stage::elites};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

struct PathsConfig {
  std::vector<std::filesystem::path> tweets;
  std::filesystem::path lexicon;
  std::filesystem::path bias_table;
  std::filesystem::path embeddings;
  std::filesystem::path moral_lexicon;
  std::filesystem::path roster;
  std::filesystem::path conllu;
  std::filesystem::path issue_docs;
  std::filesystem::path baseline_docs;
  std::filesystem::path output_dir;
};

struct CorpusConfig {
  std::optional<Timestamp> window_begin;
  std::optional<Timestamp> window_end;
  double max_malformed_fraction = 0.10;
};

struct InduceConfig {
  double lambda = 1.0;
  int top_k = 50;
  int n_max = 3;
  std::int64_t min_count = 2;
  double smoothing = 1.0;
  double tol = 1e-6;
  int max_iter = 1000;
};

struct IdeologyConfig {
  double l2 = 0.01;
  int min_urls = 1;
  bool balanced = false;
  double learning_rate = 1.0;
  double tol = 1e-6;
  int max_iter = 5000;
  double subsample = 1.0;
};

struct MoralConfig {
  MoralMethod method = MoralMethod::ddr;
  std::optional<double> threshold;  ///< one cutoff for every category
};

struct SeriesConfig {
  int window = 7;
};

struct AcfConfig {
  int max_lag = 60;
  Day split = Day{std::chrono::year{2020} / 12 / 11};
  ConfidenceBand band = ConfidenceBand::white_noise;
};

struct FramingConfig {
  double alpha = 0.5;
  int top_k = 10;
  std::int64_t min_count = 5;
};

struct ElitesConfig {
  int bootstrap = 100;
  double significance = 0.001;
  bool all_categories = false;
};

struct PipelineConfig {
  PathsConfig paths;
  std::set<Stage> stages{std::begin(kAllStages), std::end(kAllStages)};
  std::uint64_t seed = 0;
  int threads = 1;
  CorpusConfig corpus;
  InduceConfig induce;
  IdeologyConfig ideology;
  MoralConfig moral;
  SeriesConfig series;
  AcfConfig acf;
  FramingConfig framing;
  ElitesConfig elites;

  bool enabled(Stage s) const { return stages.count(s) > 0; }
};

/// Files the stages read and write, by default all inside the output
/// directory.
struct Artifacts {
  std::filesystem::path candidates;     ///< induce
  std::filesystem::path lexicon_draft;  ///< induce
  std::filesystem::path tagged;         ///< tag
  std::filesystem::path ideology;       ///< ideology
  std::filesystem::path moral;          ///< moral
  std::filesystem::path series;         ///< series
  std::filesystem::path acf;            ///< acf
  std::filesystem::path persistence;    ///< acf
  std::filesystem::path framing;        ///< framing
  std::filesystem::path elites;         ///< elites

  static Artifacts in(const std::filesystem::path& dir);
};

struct ConfigRead {
  PipelineConfig config;
  std::vector<std::string> errors;
};

/// Builds a config from a parsed document. Relative paths are resolved
/// against `base_dir`. Type, range, enum and unknown-key problems are all
/// collected rather than thrown.
ConfigRead read_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Checks that every path needed by the enabled stages exists. Inputs that
/// an enabled upstream stage will produce are not required to exist yet.
std::vector<std::string> check_paths(const PipelineConfig& config, const Artifacts& artifacts);
std::vector<std::string> check_paths(const PipelineConfig& config);

/// Every problem in the file at once; empty means valid.
std::vector<std::string> validate_config(const std::filesystem::path& path);

/// Parses, reads and checks; throws ConfigError listing all problems.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// The effective config as JSON, without settings that cannot change results
/// (output directory and worker count).
nlohmann::json config_snapshot(const PipelineConfig& config);

/// SHA-256 of the canonical snapshot.
std::string config_hash(const PipelineConfig& config);

/// WEDGEPIPE_THREADS when set to a positive integer, else config.threads.
int effective_threads(const PipelineConfig& config);

}  // namespace wedgepipe
