// wedgepipe command-line interface.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wedgepipe/config.hpp"
#include "wedgepipe/errors.hpp"
#include "wedgepipe/pipeline.hpp"
#include "wedgepipe/stages.hpp"
#include "wedgepipe/synth.hpp"

namespace fs = std::filesystem;
using namespace wedgepipe;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

/// Options every stage subcommand accepts, plus the overrides its own flags
/// translate into.
struct Invocation {
  std::string config;
  std::vector<std::string> sets;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::pair<fs::path Artifacts::*, fs::path>> artifacts;

  void value(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
  }

  void text(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides.emplace_back(key, toml_string(v)); }, help);
  }

  void path(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides.emplace_back(key, toml_string(absolute(v))); }, help);
  }

  void artifact(CLI::App* app, const std::string& flag, fs::path Artifacts::*member, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, member](const std::string& v) { artifacts.emplace_back(member, absolute(v)); }, help);
  }

  void common(CLI::App* app) {
    app->add_option("--config", config, "TOML config file; flags override its values");
    app->add_option("--set", sets, "Override any config value, e.g. --set induce.lambda=0.5");
    app->add_option("--out-dir", out_dir, "Directory for outputs (default: config output_dir or .)");
    value(app, "--seed", "run.seed", "Random seed recorded in every output header");
    value(app, "--threads", "run.threads", "Worker threads (WEDGEPIPE_THREADS overrides)");
  }

  void tweets(CLI::App* app) {
    app->add_option_function<std::vector<std::string>>(
        "--tweets",
        [this](const std::vector<std::string>& files) {
          std::string arr = "[";
          for (std::size_t i = 0; i < files.size(); ++i) arr += (i ? ", " : "") + toml_string(absolute(files[i]));
          overrides.emplace_back("paths.tweets", arr + "]");
        },
        "Tweet JSONL file (repeatable)");
  }

  /// Builds the effective config for the given stages; prints problems and
  /// returns nullopt when there are any.
  std::optional<std::pair<PipelineConfig, Artifacts>> resolve(std::vector<Stage> stages) const {
    std::vector<std::string> errors;
    nlohmann::json doc = nlohmann::json::object();
    fs::path base = fs::current_path();
    try {
      if (!config.empty()) {
        doc = parse_toml_file(config);
        base = fs::absolute(config).parent_path();
      }
      for (const auto& [k, v] : overrides) apply_override(doc, k, v);
      for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got \"" + s + "\"");
        apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
      }
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return std::nullopt;
    }
    if (!out_dir.empty()) doc["paths"]["output_dir"] = absolute(out_dir);
    if (!doc.contains("paths") || !doc["paths"].contains("output_dir")) {
      doc["paths"]["output_dir"] = fs::current_path().string();
    }
    if (!stages.empty()) {
      doc["run"]["stages"] = nlohmann::json::array();
      for (Stage s : stages) doc["run"]["stages"].push_back(to_string(s));
    }

    ConfigRead read = read_config(doc, base);
    Artifacts arts = Artifacts::in(read.config.paths.output_dir);
    for (const auto& [member, p] : artifacts) arts.*member = p;
    errors = read.errors;
    auto path_errors = check_paths(read.config, arts);
    errors.insert(errors.end(), path_errors.begin(), path_errors.end());
    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "error: " << e << '\n';
      return std::nullopt;
    }
    return std::make_pair(read.config, arts);
  }
};

int run_single(const Invocation& inv, Stage stage) {
  auto resolved = inv.resolve({stage});
  if (!resolved) return kExitUsage;
  auto& [config, artifacts] = *resolved;
  StageLog log;
  log.echo = &std::cerr;
  StageEnv env{config, artifacts, config_hash(config), effective_threads(config), log};
  try {
    run_stage(stage, env);
  } catch (const std::exception& e) {
    std::cerr << "error: " << to_string(stage) << ": " << e.what() << '\n';
    return kExitFailure;
  }
  for (const auto& p : log.written) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wedgepipe: issue, ideology and moral-language analysis of short social-media posts"};
  app.set_version_flag("--version", WEDGEPIPE_VERSION);
  app.require_subcommand(1);

  Invocation induce, tag, ideology, moral, series, acf, framing, elites, run;

  auto* c_induce = app.add_subcommand("induce", "Rank candidate issue phrases with a sparse deviation model");
  induce.common(c_induce);
  induce.path(c_induce, "--issue-docs", "paths.issue_docs", "Directory with one subdirectory of documents per issue");
  induce.path(c_induce, "--baseline-docs", "paths.baseline_docs", "Directory of background documents");
  induce.value(c_induce, "--lambda", "induce.lambda", "L1 penalty (default 1.0)");
  induce.value(c_induce, "--top-k", "induce.top_k", "Candidates per issue (default 50)");
  induce.value(c_induce, "--n-max", "induce.n_max", "Longest n-gram, 1-3 (default 3)");
  induce.value(c_induce, "--min-count", "induce.min_count", "Minimum issue n-gram count (default 2)");
  induce.artifact(c_induce, "--out", &Artifacts::candidates, "Candidate CSV path");

  auto* c_tag = app.add_subcommand("tag", "Label tweets with issues by lexicon phrase presence");
  tag.common(c_tag);
  tag.path(c_tag, "--lexicon", "paths.lexicon", "Curated lexicon TSV");
  tag.tweets(c_tag);
  tag.artifact(c_tag, "--out", &Artifacts::tagged, "Tagged JSONL output");

  auto* c_ideology = app.add_subcommand("ideology", "Score users from shared URLs and propagate with logistic regression");
  ideology.common(c_ideology);
  ideology.path(c_ideology, "--bias-table", "paths.bias_table", "Domain bias CSV");
  ideology.path(c_ideology, "--embeddings", "paths.embeddings", "Word embedding file");
  ideology.tweets(c_ideology);
  ideology.value(c_ideology, "--l2", "ideology.l2", "L2 penalty (default 0.01)");
  ideology.value(c_ideology, "--min-urls", "ideology.min_urls", "URLs with known domains needed for a URL score");
  ideology.text(c_ideology, "--class-weight", "ideology.class_weight", "none or balanced");
  ideology.artifact(c_ideology, "--out", &Artifacts::ideology, "Ideology CSV output");

  auto* c_moral = app.add_subcommand("moral", "Score moral foundations of tagged tweets");
  moral.common(c_moral);
  moral.text(c_moral, "--method", "moral.method", "ddr or lexicon");
  moral.path(c_moral, "--embeddings", "paths.embeddings", "Word embedding file (ddr)");
  moral.path(c_moral, "--moral-lexicon", "paths.moral_lexicon", "Moral seed lexicon TSV");
  moral.value(c_moral, "--threshold", "moral.threshold", "Label cutoff for every category");
  moral.artifact(c_moral, "--in", &Artifacts::tagged, "Tagged JSONL input");
  moral.artifact(c_moral, "--out", &Artifacts::moral, "Moral JSONL output");

  auto* c_series = app.add_subcommand("series", "Daily issue shares, deltas and moral shares");
  series.common(c_series);
  series.value(c_series, "--window", "series.window", "Rolling-mean window in days (default 7)");
  series.artifact(c_series, "--in", &Artifacts::moral, "Moral JSONL input");
  series.artifact(c_series, "--ideology", &Artifacts::ideology, "Ideology CSV input");
  series.artifact(c_series, "--out", &Artifacts::series, "Series CSV output");

  auto* c_acf = app.add_subcommand("acf", "Autocorrelation and persistence of moral-share series");
  acf.common(c_acf);
  acf.value(c_acf, "--max-lag", "acf.max_lag", "Largest lag (default 60)");
  acf.value(c_acf, "--split", "acf.split", "Period split date (default 2020-12-11)");
  acf.text(c_acf, "--band", "acf.band", "white_noise or bartlett");
  acf.artifact(c_acf, "--in", &Artifacts::moral, "Moral JSONL input");
  acf.artifact(c_acf, "--ideology", &Artifacts::ideology, "Ideology CSV input");
  acf.artifact(c_acf, "--out", &Artifacts::acf, "ACF CSV output");
  acf.artifact(c_acf, "--persistence-out", &Artifacts::persistence, "Persistence CSV output");

  auto* c_framing = app.add_subcommand("framing", "Adjective framing of anchor phrases and log-odds by group");
  framing.common(c_framing);
  framing.path(c_framing, "--conllu", "paths.conllu", "Dependency parses (CoNLL-U)");
  framing.path(c_framing, "--lexicon", "paths.lexicon", "Curated lexicon TSV (anchors)");
  framing.value(c_framing, "--alpha", "framing.alpha", "Smoothing pseudo-count (default 0.5)");
  framing.value(c_framing, "--top-k", "framing.top_k", "Phrases per group and issue (default 10)");
  framing.value(c_framing, "--min-count", "framing.min_count", "Minimum combined phrase count (default 5)");
  framing.artifact(c_framing, "--ideology", &Artifacts::ideology, "Ideology CSV for user_id metadata");
  framing.artifact(c_framing, "--out", &Artifacts::framing, "Framing CSV output");

  auto* c_elites = app.add_subcommand("elites", "Compare elite and matched non-elite moral shares");
  elites.common(c_elites);
  elites.path(c_elites, "--roster", "paths.roster", "Elite user ids, one per line");
  elites.value(c_elites, "--bootstrap", "elites.bootstrap", "Bootstrap replicates (default 100)");
  bool all_categories = false;
  c_elites->add_flag("--all-categories", all_categories, "Include loyalty/betrayal and purity/degradation");
  elites.artifact(c_elites, "--in", &Artifacts::moral, "Moral JSONL input");
  elites.artifact(c_elites, "--ideology", &Artifacts::ideology, "Ideology CSV input");
  elites.artifact(c_elites, "--out", &Artifacts::elites, "Elites CSV output");

  auto* c_run = app.add_subcommand("run", "Run the enabled stages of a config and write a manifest");
  run.common(c_run);
  std::vector<std::string> run_stages;
  c_run->add_option("--stages", run_stages, "Only these stages")->delimiter(',');

  auto* c_validate = app.add_subcommand("validate", "Check a config and report every problem");
  std::string validate_path;
  c_validate->add_option("config,--config", validate_path, "Config file")->required();

  auto* c_synth = app.add_subcommand("synth", "Write the synthetic fixture");
  std::string synth_dir;
  SynthOptions synth_opts;
  c_synth->add_option("--out-dir", synth_dir, "Destination directory")->required();
  c_synth->add_option("--seed", synth_opts.seed, "Generator seed");
  c_synth->add_option("--tweets", synth_opts.tweets, "Number of tweets");
  c_synth->add_option("--users", synth_opts.users, "Number of users");
  c_synth->add_option("--elites", synth_opts.elites, "Number of elite users");
  c_synth->add_option("--sentences", synth_opts.sentences, "Number of parsed sentences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (c_induce->parsed()) return run_single(induce, Stage::induce);
  if (c_tag->parsed()) return run_single(tag, Stage::tag);
  if (c_ideology->parsed()) return run_single(ideology, Stage::ideology);
  if (c_moral->parsed()) return run_single(moral, Stage::moral);
  if (c_series->parsed()) return run_single(series, Stage::series);
  if (c_acf->parsed()) return run_single(acf, Stage::acf);
  if (c_framing->parsed()) return run_single(framing, Stage::framing);
  if (c_elites->parsed()) {
    if (all_categories) elites.overrides.emplace_back("elites.all_categories", "true");
    return run_single(elites, Stage::elites);
  }

  if (c_validate->parsed()) {
    auto errors = validate_config(validate_path);
    for (const auto& e : errors) std::cout << "error: " << e << '\n';
    if (!errors.empty()) return kExitUsage;
    std::cout << "ok\n";
    return 0;
  }

  if (c_synth->parsed()) {
    try {
      auto files = write_fixture(synth_dir, synth_opts);
      std::cout << "wrote " << files.size() << " files to " << synth_dir << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitFailure;
    }
    return 0;
  }

  if (c_run->parsed()) {
    if (run.config.empty()) {
      std::cerr << "error: run needs --config\n";
      return kExitUsage;
    }
    std::vector<Stage> stages;
    for (const auto& name : run_stages) {
      auto s = parse_stage(name);
      if (!s) {
        std::cerr << "error: unknown stage \"" << name << "\"\n";
        return kExitUsage;
      }
      stages.push_back(*s);
    }
    auto resolved = run.resolve(stages);
    if (!resolved) return kExitUsage;
    RunReport report = run_pipeline(resolved->first, &std::cerr);
    for (const auto& p : report.outputs) std::cout << "wrote " << p.string() << '\n';
    std::cout << "manifest " << report.manifest.string() << '\n';
    if (!report.ok) {
      std::cerr << "error: " << (report.failed_stage.empty() ? "" : report.failed_stage + ": ") << report.error
                << '\n';
      return kExitFailure;
    }
    return 0;
  }
  return kExitUsage;
}
