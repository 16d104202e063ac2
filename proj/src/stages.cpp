#include "wedgepipe/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wedgepipe/errors.hpp"
#include "wedgepipe/framing.hpp"
#include "wedgepipe/lexicon.hpp"
#include "wedgepipe/moral.hpp"
#include "wedgepipe/parallel.hpp"
#include "wedgepipe/tagger.hpp"

#ifndef WEDGEPIPE_VERSION
#define WEDGEPIPE_VERSION "0.0.0"
#endif

namespace wedgepipe {

namespace fs = std::filesystem;
using nlohmann::json;

void StageLog::warn(std::string message) {
  if (echo) *echo << "warning: " << message << '\n';
  warnings.push_back(std::move(message));
}

void StageLog::wrote(const fs::path& path) {
  if (std::find(written.begin(), written.end(), path) == written.end()) written.push_back(path);
}

StageEnv make_env(const PipelineConfig& config, StageLog& log) {
  return StageEnv{config, Artifacts::in(config.paths.output_dir), config_hash(config), effective_threads(config), log};
}

std::string csv_stamp(std::string_view hash, std::uint64_t seed) {
  return "# wedgepipe " WEDGEPIPE_VERSION " config_hash=" + std::string(hash) + " seed=" + std::to_string(seed);
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

/// Output file that reports itself to the log once closed cleanly.
class OutFile {
 public:
  OutFile(const fs::path& path, StageLog& log) : path_(path), log_(log) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path.string());
  }

  OutFile(const OutFile&) = delete;
  OutFile& operator=(const OutFile&) = delete;

  // A file abandoned by an exception is removed so no partial output is left.
  ~OutFile() {
    if (closed_) return;
    out_.close();
    std::error_code ec;
    fs::remove(path_, ec);
  }

  std::ostream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) throw IoError("error while writing " + path_.string());
    closed_ = true;
    log_.wrote(path_);
  }

 private:
  fs::path path_;
  StageLog& log_;
  std::ofstream out_;
  bool closed_ = false;
};

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const StageEnv& env, std::initializer_list<std::string_view> header)
      : file_(path, env.log) {
    file_.stream() << csv_stamp(env.config_hash, env.config.seed) << '\n';
    bool first = true;
    for (auto h : header) {
      file_.stream() << (first ? "" : ",") << h;
      first = false;
    }
    file_.stream() << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((file_.stream() << (first ? "" : ",") << csv_field(cell_text(cells)), first = false), ...);
    file_.stream() << '\n';
  }

  void close() { file_.close(); }

 private:
  static std::string cell_text(const std::string& s) { return s; }
  static std::string cell_text(std::string_view s) { return std::string(s); }
  static std::string cell_text(const char* s) { return s; }
  static std::string cell_text(double v) { return format_number(v); }
  static std::string cell_text(int v) { return std::to_string(v); }
  static std::string cell_text(std::int64_t v) { return std::to_string(v); }
  static std::string cell_text(std::size_t v) { return std::to_string(v); }
  static std::string cell_text(bool v) { return v ? "true" : "false"; }

  OutFile file_;
};

LoadOptions load_options(const PipelineConfig& c) {
  LoadOptions o;
  o.window_begin = c.corpus.window_begin;
  o.window_end = c.corpus.window_end;
  o.max_malformed_fraction = c.corpus.max_malformed_fraction;
  return o;
}

void report_load(StageLog& log, const fs::path& path, const LoadStats& stats) {
  if (stats.malformed > 0) {
    log.warn(path.string() + ": skipped " + std::to_string(stats.malformed) + " malformed line(s) of " +
             std::to_string(stats.lines));
  }
}

std::string phrase_text(std::string_view key) {
  std::string out;
  for (const auto& part : split_ngram(key)) {
    if (!out.empty()) out += ' ';
    out += part;
  }
  return out;
}

IssueMatcher load_matcher(const StageEnv& env) {
  auto load = load_curated_lexicon(env.config.paths.lexicon);
  for (const auto& w : load.warnings) env.log.warn(env.config.paths.lexicon.string() + ": " + w);
  return IssueMatcher::build(load.lexicons);
}

/// Reads a JSONL file line by line; throws ParseError with the line number on
/// invalid JSON.
template <typename F>
void for_each_json_line(const fs::path& path, F&& sink) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ParseError(path.string() + ": invalid JSON object", lineno);
    }
    sink(std::move(j), lineno);
  }
}

std::vector<std::string> read_lines_of(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<TokenSeq> read_documents(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TokenSeq> docs;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw IoError("cannot read " + f.string());
    std::ostringstream text;
    text << in.rdbuf();
    docs.push_back(normalize(text.str()));
  }
  return docs;
}

void run_induce(StageEnv& env) {
  const auto& c = env.config;
  std::vector<Issue> issues;
  std::vector<NgramCounts> corpora;
  for (Issue issue : kAllIssues) {
    fs::path dir = c.paths.issue_docs / std::string(to_string(issue));
    if (!fs::is_directory(dir)) {
      env.log.warn("no documents for issue " + std::string(to_string(issue)) + " (" + dir.string() + ")");
      continue;
    }
    auto docs = read_documents(dir);
    NgramCounts counts = build_counts(docs, c.induce.n_max, c.induce.min_count);
    drop_stopword_ngrams(counts, english_stopwords());
    if (counts.empty()) {
      env.log.warn("issue " + std::string(to_string(issue)) + " has no n-gram above min_count");
      continue;
    }
    issues.push_back(issue);
    corpora.push_back(std::move(counts));
  }
  if (issues.empty()) throw ConfigError("no issue documents found under " + c.paths.issue_docs.string());

  auto baseline_docs = read_documents(c.paths.baseline_docs);
  NgramCounts baseline = build_counts(baseline_docs, c.induce.n_max, 1);
  drop_stopword_ngrams(baseline, english_stopwords());
  BackgroundModel background = fit_background(baseline, c.induce.smoothing, corpora);

  SageOptions opts;
  opts.lambda = c.induce.lambda;
  opts.tol = c.induce.tol;
  opts.max_iter = c.induce.max_iter;
  std::vector<EtaVector> fits(issues.size());
  parallel_for(issues.size(), env.threads,
               [&](std::size_t i) { fits[i] = sage_fit(corpora[i], background, opts); });

  CsvWriter csv(env.artifacts.candidates, env, {"issue", "ngram", "eta", "issue_count", "background_logprob"});
  std::vector<IssueLexicon> drafts;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    const auto name = to_string(issues[i]);
    if (!fits[i].converged) {
      env.log.warn("SAGE fit for " + std::string(name) + " stopped after " + std::to_string(fits[i].iterations) +
                   " iterations (gap " + format_number(fits[i].final_gap) + ")");
    }
    IssueLexicon draft{issues[i], {}, LexiconProvenance::induced};
    for (const auto& [term, eta] : select_candidates(fits[i], static_cast<std::size_t>(c.induce.top_k))) {
      csv.row(name, phrase_text(term), eta, corpora[i].count(term), background.log_prob(term));
      draft.phrases.insert(term);
    }
    drafts.push_back(std::move(draft));
  }
  csv.close();

  OutFile tsv(env.artifacts.lexicon_draft, env.log);
  tsv.stream() << "# candidate phrases; review before use as a curated lexicon\n";
  write_lexicon_tsv(tsv.stream(), drafts);
  tsv.close();
}

// ---------------------------------------------------------------------------

void run_tag(StageEnv& env) {
  const auto& c = env.config;
  IssueMatcher matcher = load_matcher(env);
  OutFile out(env.artifacts.tagged, env.log);

  for (const auto& path : c.paths.tweets) {
    auto load = load_tweets(path, load_options(c));
    report_load(env.log, path, load.stats);
    std::vector<std::string> lines(load.records.size());
    parallel_for(load.records.size(), env.threads, [&](std::size_t i) {
      const auto& rec = load.records[i];
      IssueLabelSet labels = tag(rec, matcher);
      json j = to_json(rec);
      json issues = json::array();
      for (Issue is : labels.labels.to_vector()) issues.push_back(to_string(is));
      json matched = json::array();
      for (const auto& m : labels.matched_phrases) matched.push_back(phrase_text(m));
      j["issues"] = std::move(issues);
      j["matched"] = std::move(matched);
      lines[i] = j.dump();
    });
    for (const auto& l : lines) out.stream() << l << '\n';
  }
  out.close();
}

// ---------------------------------------------------------------------------

void run_ideology(StageEnv& env) {
  const auto& c = env.config;
  DomainBiasTable table = DomainBiasTable::load(c.paths.bias_table);
  EmbeddingTable embeddings = EmbeddingTable::load(c.paths.embeddings);

  struct UserData {
    std::vector<std::string> urls;
    std::vector<TokenSeq> tweets;
  };
  std::map<std::string, UserData> users;
  for (const auto& path : c.paths.tweets) {
    auto stats = for_each_tweet(
        path,
        [&](TweetRecord&& rec) {
          auto& u = users[rec.user_id];
          u.urls.insert(u.urls.end(), rec.urls.begin(), rec.urls.end());
          u.tweets.push_back(normalize(rec.text));
        },
        load_options(c));
    report_load(env.log, path, stats);
  }

  struct UserRow {
    std::string id;
    std::optional<double> score;
    UrlLabel label = UrlLabel::unlabeled;
    std::vector<double> features;
    bool all_oov = true;
  };
  std::vector<UserRow> rows;
  rows.reserve(users.size());
  for (auto& [id, data] : users) rows.push_back(UserRow{id, {}, UrlLabel::unlabeled, {}, true});
  std::vector<const UserData*> data_of;
  for (const auto& [_, d] : users) data_of.push_back(&d);

  parallel_for(rows.size(), env.threads, [&](std::size_t i) {
    auto& row = rows[i];
    const auto& data = *data_of[i];
    std::size_t known = 0;
    for (const auto& url : data.urls) {
      if (auto pld = extract_pld(url); pld && table.score(*pld)) ++known;
    }
    if (known >= static_cast<std::size_t>(c.ideology.min_urls)) {
      row.score = score_user(data.urls, table);
      if (row.score) row.label = binarize(*row.score);
    }
    row.features = embed_user(data.tweets, embeddings, &row.all_oov);
  });

  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label != UrlLabel::unlabeled && !rows[i].all_oov) train_rows.push_back(i);
  }
  Matrix x(train_rows.size(), embeddings.dim());
  std::vector<int> y(train_rows.size());
  for (std::size_t k = 0; k < train_rows.size(); ++k) {
    const auto& row = rows[train_rows[k]];
    std::copy(row.features.begin(), row.features.end(), x.row(k).begin());
    y[k] = row.label == UrlLabel::conservative ? 1 : 0;
  }
  LrOptions opts;
  opts.l2 = c.ideology.l2;
  opts.learning_rate = c.ideology.learning_rate;
  opts.tol = c.ideology.tol;
  opts.max_iter = c.ideology.max_iter;
  opts.seed = c.seed;
  opts.balanced = c.ideology.balanced;
  opts.subsample = c.ideology.subsample;
  LrModel model = train_lr(x, y, opts);
  if (!model.converged) {
    env.log.warn("logistic regression stopped after " + std::to_string(model.iterations) + " iterations");
  }

  CsvWriter csv(env.artifacts.ideology, env, {"user_id", "url_score", "url_label", "predicted_label", "probability"});
  for (const auto& row : rows) {
    std::string score = row.score ? format_number(*row.score) : "";
    if (row.all_oov) {
      csv.row(row.id, score, to_string(row.label), "", "");
      continue;
    }
    Prediction p = predict(model, row.features);
    csv.row(row.id, score, to_string(row.label), to_string(p.label), p.probability);
  }
  csv.close();
}

std::map<std::string, Leaning> read_user_groups(const fs::path& ideology_csv) {
  std::map<std::string, Leaning> out;
  bool header = true;
  std::size_t lineno = 0;
  std::ifstream in(ideology_csv);
  if (!in) throw IoError("cannot read " + ideology_csv.string());
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = csv_split(line);
    if (cells.size() != 5) throw ParseError(ideology_csv.string() + ": expected 5 columns", lineno);
    std::optional<Leaning> g = parse_leaning(cells[2]);
    if (!g) g = parse_leaning(cells[3]);
    if (g) out.emplace(cells[0], *g);
  }
  return out;
}

// ---------------------------------------------------------------------------

void run_moral(StageEnv& env) {
  const auto& c = env.config;
  MoralLexicon lexicon = MoralLexicon::load(c.paths.moral_lexicon);
  std::optional<EmbeddingTable> embeddings;
  ConceptSet concepts;
  MoralThresholds thresholds;
  if (c.moral.method == MoralMethod::ddr) {
    embeddings = EmbeddingTable::load(c.paths.embeddings);
    concepts = build_concepts(lexicon, *embeddings);
    thresholds = default_ddr_thresholds();
  } else {
    thresholds = default_lexicon_thresholds();
  }
  if (c.moral.threshold) thresholds.fill(*c.moral.threshold);

  auto lines = read_lines_of(env.artifacts.tagged);
  std::vector<std::string> out_lines(lines.size());
  parallel_for(lines.size(), env.threads, [&](std::size_t i) {
    json j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
      throw ParseError(env.artifacts.tagged.string() + ": invalid tagged record", i + 1);
    }
    TokenSeq tokens = normalize(j["text"].get<std::string>());
    MoralVector v = c.moral.method == MoralMethod::ddr ? score_moral_ddr(tokens, concepts, *embeddings, thresholds)
                                                       : score_moral_lexicon(tokens, lexicon, thresholds);
    json scores = json::object(), labels = json::object();
    for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
      auto name = std::string(to_string(static_cast<MoralCategory>(k)));
      scores[name] = v.scores[k];
      labels[name] = v.labels[k];
    }
    j["moral_scores"] = std::move(scores);
    j["moral_labels"] = std::move(labels);
    out_lines[i] = j.dump();
  });

  OutFile out(env.artifacts.moral, env.log);
  for (const auto& l : out_lines) out.stream() << l << '\n';
  out.close();
}

std::vector<DocRecord> read_doc_records(const fs::path& moral_jsonl, const std::map<std::string, Leaning>& groups,
                                        const EliteRoster* roster) {
  std::vector<DocRecord> out;
  for_each_json_line(moral_jsonl, [&](json&& j, std::size_t lineno) {
    std::string error;
    auto rec = parse_tweet(j, &error);
    if (!rec) throw ParseError(moral_jsonl.string() + ": " + error, lineno);
    DocRecord d;
    d.day = day_of(rec->created_at);
    d.kind = rec->kind;
    if (auto it = j.find("issues"); it != j.end() && it->is_array()) {
      for (const auto& name : *it) {
        auto issue = name.is_string() ? parse_issue(name.get<std::string>()) : std::nullopt;
        if (!issue) throw ParseError(moral_jsonl.string() + ": unknown issue label", lineno);
        d.issues.insert(*issue);
      }
    }
    if (auto it = j.find("moral_labels"); it != j.end() && it->is_object()) {
      for (const auto& [name, flag] : it->items()) {
        auto cat = parse_moral_category(name);
        if (!cat) throw ParseError(moral_jsonl.string() + ": unknown moral category " + name, lineno);
        if (flag.is_boolean() && flag.get<bool>()) {
          d.moral = static_cast<std::uint16_t>(d.moral | (1u << static_cast<unsigned>(*cat)));
        }
      }
    }
    if (auto g = groups.find(rec->user_id); g != groups.end()) d.group = g->second;
    d.elite = roster && roster->contains(rec->user_id);
    out.push_back(d);
  });
  return out;
}

// ---------------------------------------------------------------------------

void run_series(StageEnv& env) {
  const auto& c = env.config;
  auto groups = read_user_groups(env.artifacts.ideology);
  auto records = read_doc_records(env.artifacts.moral, groups);
  auto range = day_range(records);

  CsvWriter csv(env.artifacts.series, env, {"date", "value", "issue", "group", "kind", "moral"});
  auto emit = [&](const DailySeries& raw) {
    DailySeries s = rolling_mean(raw, c.series.window);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.values[i]) continue;
      csv.row(format_date(s.day_at(i)), *s.values[i], s.meta.issue, s.meta.group, s.meta.kind, s.meta.moral);
    }
  };
  if (range) {
    const std::optional<Leaning> all_groups[] = {std::nullopt, Leaning::liberal, Leaning::conservative};
    for (Issue issue : kAllIssues) {
      for (TweetKind kind : {TweetKind::original, TweetKind::retweet}) {
        for (const auto& g : all_groups) emit(daily_share(records, issue, kind, g, range));
      }
      emit(delta_series(records, issue, range));
      for (Leaning g : {Leaning::liberal, Leaning::conservative}) {
        for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
          emit(moral_share_series(records, MoralSelector::of(static_cast<MoralCategory>(k)), issue, g, range));
        }
      }
    }
  } else {
    env.log.warn("no records to aggregate");
  }
  csv.close();
}

void run_acf(StageEnv& env) {
  const auto& c = env.config;
  auto groups = read_user_groups(env.artifacts.ideology);
  auto records = read_doc_records(env.artifacts.moral, groups);
  auto range = day_range(records);

  CsvWriter acf_csv(env.artifacts.acf, env, {"issue", "group", "moral", "period", "lag", "r", "conf"});
  CsvWriter pers_csv(env.artifacts.persistence, env, {"issue", "group", "moral", "period", "persistence", "censored"});

  auto analyse = [&](const DailySeries& s, std::string_view period) {
    DailySeries filled = fill_gaps(s);
    const std::string label = s.meta.issue + "/" + s.meta.group + "/" + s.meta.moral + "/" + std::string(period);
    if (filled.size() < static_cast<std::size_t>(c.acf.max_lag) + 2) {
      env.log.warn("skipping ACF for " + label + ": " + std::to_string(filled.size()) + " days");
      return;
    }
    AcfResult a;
    try {
      a = acf(filled, c.acf.max_lag, c.acf.band);
    } catch (const DegenerateSeriesError&) {
      env.log.warn("skipping ACF for " + label + ": constant series");
      return;
    }
    for (std::size_t k = 0; k < a.r.size(); ++k) {
      acf_csv.row(s.meta.issue, s.meta.group, s.meta.moral, period, k, a.r[k], a.band[k]);
    }
    Persistence p = persistence(a);
    pers_csv.row(s.meta.issue, s.meta.group, s.meta.moral, period, p.lag, p.censored);
  };

  if (range) {
    const bool can_split = c.acf.split > range->first && c.acf.split <= range->last;
    if (!can_split) env.log.warn("split date " + format_date(c.acf.split) + " is outside the data; full period only");
    for (Issue issue : kAllIssues) {
      for (Leaning g : {Leaning::liberal, Leaning::conservative}) {
        for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
          DailySeries s =
              moral_share_series(records, MoralSelector::of(static_cast<MoralCategory>(k)), issue, g, range);
          analyse(s, "full");
          if (can_split) {
            auto [pre, post] = split_period(s, c.acf.split);
            analyse(pre, "pre");
            analyse(post, "post");
          }
        }
      }
    }
  } else {
    env.log.warn("no records to analyse");
  }
  acf_csv.close();
  pers_csv.close();
}

// ---------------------------------------------------------------------------

void run_framing(StageEnv& env) {
  const auto& c = env.config;
  IssueMatcher matcher = load_matcher(env);
  std::map<std::string, Leaning> groups;
  if (fs::is_regular_file(env.artifacts.ideology)) groups = read_user_groups(env.artifacts.ideology);

  struct GroupCounts {
    PhraseCounts liberal, conservative;
  };
  std::map<Issue, GroupCounts> counts;
  std::size_t ungrouped = 0;

  std::ifstream in(c.paths.conllu);
  if (!in) throw IoError("cannot read CoNLL-U file " + c.paths.conllu.string());
  for_each_sentence(in, [&](ParsedSentence&& s) {
    std::optional<Leaning> g;
    if (auto it = s.metadata.find("group"); it != s.metadata.end()) g = parse_leaning(it->second);
    if (!g) {
      if (auto it = s.metadata.find("user_id"); it != s.metadata.end()) {
        if (auto u = groups.find(it->second); u != groups.end()) g = u->second;
      }
    }
    if (!g) {
      ++ungrouped;
      return;
    }
    for (const auto& f : extract_frames(s, matcher)) {
      auto& gc = counts[f.issue];
      ++(*g == Leaning::liberal ? gc.liberal : gc.conservative)[f.key];
    }
  });
  if (ungrouped > 0) env.log.warn(std::to_string(ungrouped) + " sentence(s) without a known group were skipped");

  CsvWriter csv(env.artifacts.framing, env, {"issue", "phrase", "count_liberal", "count_conservative", "log_odds"});
  auto count_of = [](const PhraseCounts& m, const std::string& k) -> std::int64_t {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  for (const auto& [issue, gc] : counts) {
    auto scores = apply_frequency_floor(log_odds(gc.liberal, gc.conservative, c.framing.alpha), gc.liberal,
                                        gc.conservative, c.framing.min_count);
    if (scores.empty()) continue;
    const auto k = static_cast<std::size_t>(c.framing.top_k);
    auto top_lib = top_phrases(scores, k, Direction::group_a);
    auto top_con = top_phrases(scores, k, Direction::group_b);
    std::set<std::string> seen;
    for (const auto* list : {&top_lib, &top_con}) {
      for (const auto& [phrase, score] : *list) {
        if (!seen.insert(phrase).second) continue;
        csv.row(to_string(issue), phrase, count_of(gc.liberal, phrase), count_of(gc.conservative, phrase), score);
      }
    }
  }
  csv.close();
}

// ---------------------------------------------------------------------------

void run_elites(StageEnv& env) {
  const auto& c = env.config;
  EliteRoster roster = EliteRoster::load(c.paths.roster);
  for (const auto& d : roster.duplicates()) env.log.warn("roster lists " + d + " more than once");
  auto groups = read_user_groups(env.artifacts.ideology);
  auto records = read_doc_records(env.artifacts.moral, groups, &roster);

  EliteOptions opts;
  opts.bootstrap = c.elites.bootstrap;
  opts.seed = c.seed;
  opts.significance = c.elites.significance;
  opts.all_categories = c.elites.all_categories;
  opts.threads = env.threads;
  auto results = compare_elites(records, opts);

  CsvWriter csv(env.artifacts.elites, env,
                {"issue", "moral", "ideology", "elite_mean", "nonelite_mean", "U", "p", "significant"});
  std::size_t shortfalls = 0;
  for (const auto& r : results) {
    csv.row(to_string(r.issue), to_string(r.moral), to_string(r.ideology), r.elite_mean, r.nonelite_mean, r.test.u,
            r.test.p, r.significant);
    shortfalls = std::max(shortfalls, r.shortfall_days);
  }
  if (results.empty()) env.log.warn("no issue has both elite and non-elite original tweets");
  if (shortfalls > 0) {
    env.log.warn("matched sampling ran short of non-elite tweets on up to " + std::to_string(shortfalls) +
                 " day(s) per comparison");
  }
  csv.close();
}

void run_stage(Stage stage, StageEnv& env) {
  switch (stage) {
    case Stage::induce: return run_induce(env);
    case Stage::tag: return run_tag(env);
    case Stage::ideology: return run_ideology(env);
    case Stage::moral: return run_moral(env);
    case Stage::series: return run_series(env);
    case Stage::acf: return run_acf(env);
    case Stage::framing: return run_framing(env);
    case Stage::elites: return run_elites(env);
  }
}

}  // namespace wedgepipe
