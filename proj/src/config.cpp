#include "wedgepipe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "wedgepipe/errors.hpp"
#include "wedgepipe/hash.hpp"

namespace wedgepipe {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : s_(text) {}

  json parse_document_value() {
    skip_blank();
    json v = parse_value();
    skip_blank();
    if (pos_ != s_.size()) fail("unexpected text after value: \"" + std::string(s_.substr(pos_)) + "\"");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what); }

  // Whitespace, newlines and comments (the latter only occur inside arrays
  // or at the end of a value).
  void skip_blank() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (is_space(c) || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  json parse_value() {
    if (pos_ >= s_.size()) fail("missing value");
    char c = s_[pos_];
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    return parse_bare();
  }

  json parse_basic_string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\n') fail("newline inside string");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= s_.size()) break;
      char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json parse_literal_string() {
    ++pos_;
    auto end = s_.find('\'', pos_);
    if (end == std::string_view::npos || s_.substr(pos_, end - pos_).find('\n') != std::string_view::npos) {
      fail("unterminated string");
    }
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  json parse_array() {
    ++pos_;
    json arr = json::array();
    while (true) {
      skip_blank();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_blank();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
      } else if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return arr;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_bare() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           s_[pos_] != '\n') {
      ++pos_;
    }
    std::string_view tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail("missing value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.size() == 10 && parse_date(tok)) return std::string(tok);

    std::string digits;
    for (char c : tok) {
      if (c != '_') digits += c;
    }
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      const char* b = digits.data() + (digits.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(b, digits.data() + digits.size(), v);
      if (ec == std::errc{} && ptr == digits.data() + digits.size()) return v;
    } else {
      double v = 0.0;
      const char* b = digits.data() + (digits.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(b, digits.data() + digits.size(), v);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && std::isfinite(v)) return v;
    }
    fail("invalid value \"" + std::string(tok) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

/// Bracket depth at the end of `text`, ignoring strings and comments.
int bracket_depth(std::string_view text, int depth) {
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '#') break;
    if (c == '"' || c == '\'') quote = c;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(std::size_t line, const std::string& what) { return "line " + std::to_string(line) + ": " + what; }

}  // namespace

json parse_toml_value(std::string_view text) { return ValueParser(text).parse_document_value(); }

json parse_toml(std::istream& in) {
  json doc = json::object();
  json* table = &doc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    if (view.front() == '[') {
      auto close = view.find(']');
      if (view.starts_with("[[")) throw ConfigError(at_line(lineno, "arrays of tables are not supported"));
      if (close == std::string_view::npos) throw ConfigError(at_line(lineno, "unterminated table header"));
      std::string_view rest = trim(view.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') throw ConfigError(at_line(lineno, "text after table header"));
      std::string name(trim(view.substr(1, close - 1)));
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_bare_key_char)) {
        throw ConfigError(at_line(lineno, "invalid table name \"" + name + "\""));
      }
      if (doc.contains(name)) throw ConfigError(at_line(lineno, "table [" + name + "] defined twice"));
      doc[name] = json::object();
      table = &doc[name];
      continue;
    }

    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ConfigError(at_line(lineno, "expected key = value"));
    std::string key(trim(view.substr(0, eq)));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_bare_key_char)) {
      throw ConfigError(at_line(lineno, "invalid key \"" + key + "\""));
    }
    if (table->contains(key)) throw ConfigError(at_line(lineno, "key \"" + key + "\" defined twice"));

    std::string value(trim(view.substr(eq + 1)));
    const std::size_t start_line = lineno;
    int depth = bracket_depth(value, 0);
    while (depth > 0 && std::getline(in, line)) {
      ++lineno;
      value += '\n';
      value += line;
      depth = bracket_depth(line, depth);
    }
    try {
      (*table)[key] = parse_toml_value(value);
    } catch (const ConfigError& e) {
      throw ConfigError(at_line(start_line, e.what()));
    }
  }
  return doc;
}

json parse_toml_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_toml(in);
}

void apply_override(json& doc, std::string_view dotted_key, std::string_view value) {
  auto dot = dotted_key.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == dotted_key.size()) {
    throw ConfigError("override key must look like section.key: \"" + std::string(dotted_key) + "\"");
  }
  json parsed;
  try {
    parsed = parse_toml_value(value);
  } catch (const ConfigError&) {
    parsed = std::string(value);
  }
  doc[std::string(dotted_key.substr(0, dot))][std::string(dotted_key.substr(dot + 1))] = std::move(parsed);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kStageNames[] = {"induce", "tag", "ideology", "moral", "series", "acf", "framing", "elites"};

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

Artifacts Artifacts::in(const fs::path& dir) {
  Artifacts a;
  a.candidates = dir / "candidates.csv";
  a.lexicon_draft = dir / "lexicon_draft.tsv";
  a.tagged = dir / "tagged.jsonl";
  a.ideology = dir / "ideology.csv";
  a.moral = dir / "moral.jsonl";
  a.series = dir / "series.csv";
  a.acf = dir / "acf.csv";
  a.persistence = dir / "persistence.csv";
  a.framing = dir / "framing.csv";
  a.elites = dir / "elites.csv";
  return a;
}

namespace {

/// Typed access to one config document with error collection.
class ConfigReader {
 public:
  ConfigReader(const fs::path& base_dir, std::vector<std::string>& errors) : base_(base_dir), errors_(errors) {}

  void error(const std::string& key, const std::string& what) { errors_.push_back(key + ": " + what); }

  bool number(const std::string& key, const json& v, double& out) {
    if (!v.is_number()) {
      error(key, "expected a number");
      return false;
    }
    out = v.get<double>();
    return true;
  }

  bool integer(const std::string& key, const json& v, std::int64_t& out) {
    if (!v.is_number_integer()) {
      error(key, "expected an integer");
      return false;
    }
    out = v.get<std::int64_t>();
    return true;
  }

  bool string(const std::string& key, const json& v, std::string& out) {
    if (!v.is_string()) {
      error(key, "expected a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  void boolean(const std::string& key, const json& v, bool& out) {
    if (!v.is_boolean()) {
      error(key, "expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  /// Reads a number and checks lo <= x (or lo < x when `open_lo`) and x <= hi.
  void ranged(const std::string& key, const json& v, double& out, double lo, bool open_lo,
              double hi = HUGE_VAL, bool open_hi = false) {
    double x = 0.0;
    if (!number(key, v, x)) return;
    bool ok = (open_lo ? x > lo : x >= lo) && (open_hi ? x < hi : x <= hi);
    if (!ok) {
      std::ostringstream msg;
      msg << "must be " << (open_lo ? "> " : ">= ") << lo;
      if (hi != HUGE_VAL) msg << " and " << (open_hi ? "< " : "<= ") << hi;
      msg << " (got " << x << ")";
      error(key, msg.str());
      return;
    }
    out = x;
  }

  template <typename Int>
  void ranged_int(const std::string& key, const json& v, Int& out, std::int64_t lo,
                  std::int64_t hi = INT32_MAX) {
    std::int64_t x = 0;
    if (!integer(key, v, x)) return;
    if (x < lo || x > hi) {
      error(key, "must be between " + std::to_string(lo) + " and " + std::to_string(hi) + " (got " +
                     std::to_string(x) + ")");
      return;
    }
    out = static_cast<Int>(x);
  }

  void path(const std::string& key, const json& v, fs::path& out) {
    std::string s;
    if (!string(key, v, s)) return;
    if (s.empty()) {
      error(key, "empty path");
      return;
    }
    out = resolve(s);
  }

  fs::path resolve(const std::string& s) const {
    fs::path p(s);
    return (p.is_absolute() ? p : base_ / p).lexically_normal();
  }

 private:
  fs::path base_;
  std::vector<std::string>& errors_;
};

using Handler = std::function<void(ConfigReader&, const std::string&, const json&)>;
using Section = std::map<std::string, Handler>;

std::optional<Timestamp> timestamp_or_date(const std::string& s) {
  if (auto ts = parse_timestamp(s)) return ts;
  if (auto d = parse_date(s)) return Timestamp{*d};
  return std::nullopt;
}

std::map<std::string, Section> schema(PipelineConfig& c) {
  std::map<std::string, Section> s;

  auto& paths = s["paths"];
  paths["tweets"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    c.paths.tweets.clear();
    if (v.is_string()) {
      fs::path p;
      r.path(key, v, p);
      if (!p.empty()) c.paths.tweets.push_back(p);
    } else if (v.is_array()) {
      for (const auto& item : v) {
        fs::path p;
        r.path(key, item, p);
        if (!p.empty()) c.paths.tweets.push_back(p);
      }
    } else {
      r.error(key, "expected a path or an array of paths");
    }
  };
  for (auto [name, member] : std::initializer_list<std::pair<const char*, fs::path PathsConfig::*>>{
           {"lexicon", &PathsConfig::lexicon},
           {"bias_table", &PathsConfig::bias_table},
           {"embeddings", &PathsConfig::embeddings},
           {"moral_lexicon", &PathsConfig::moral_lexicon},
           {"roster", &PathsConfig::roster},
           {"conllu", &PathsConfig::conllu},
           {"issue_docs", &PathsConfig::issue_docs},
           {"baseline_docs", &PathsConfig::baseline_docs},
           {"output_dir", &PathsConfig::output_dir}}) {
    paths[name] = [&c, member](ConfigReader& r, const std::string& key, const json& v) {
      r.path(key, v, c.paths.*member);
    };
  }

  auto& run = s["run"];
  run["seed"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.seed, 0, INT64_MAX);
  };
  run["threads"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.threads, 1, 1024);
  };
  run["stages"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    if (!v.is_array()) {
      r.error(key, "expected an array of stage names");
      return;
    }
    c.stages.clear();
    for (const auto& item : v) {
      std::string name;
      if (!r.string(key, item, name)) continue;
      if (auto st = parse_stage(name)) {
        c.stages.insert(*st);
      } else {
        r.error(key, "unknown stage \"" + name + "\"");
      }
    }
  };

  auto& corpus = s["corpus"];
  corpus["window_begin"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    c.corpus.window_begin = timestamp_or_date(text);
    if (!c.corpus.window_begin) r.error(key, "not an ISO-8601 date or timestamp: \"" + text + "\"");
  };
  corpus["window_end"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    c.corpus.window_end = timestamp_or_date(text);
    if (!c.corpus.window_end) r.error(key, "not an ISO-8601 date or timestamp: \"" + text + "\"");
  };
  corpus["max_malformed_fraction"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.corpus.max_malformed_fraction, 0.0, false, 1.0);
  };

  auto& induce = s["induce"];
  induce["lambda"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.induce.lambda, 0.0, false);
  };
  induce["top_k"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.induce.top_k, 1);
  };
  induce["n_max"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.induce.n_max, 1, 3);
  };
  induce["min_count"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.induce.min_count, 1, INT64_MAX);
  };
  induce["smoothing"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.induce.smoothing, 0.0, true);
  };
  induce["tol"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.induce.tol, 0.0, true);
  };
  induce["max_iter"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.induce.max_iter, 1);
  };

  auto& ideology = s["ideology"];
  ideology["l2"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.ideology.l2, 0.0, false);
  };
  ideology["min_urls"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.ideology.min_urls, 1);
  };
  ideology["class_weight"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    if (text == "balanced") {
      c.ideology.balanced = true;
    } else if (text == "none") {
      c.ideology.balanced = false;
    } else {
      r.error(key, "expected \"none\" or \"balanced\" (got \"" + text + "\")");
    }
  };
  ideology["learning_rate"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.ideology.learning_rate, 0.0, true);
  };
  ideology["tol"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.ideology.tol, 0.0, true);
  };
  ideology["max_iter"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.ideology.max_iter, 1);
  };
  ideology["subsample"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.ideology.subsample, 0.0, true, 1.0);
  };

  auto& moral = s["moral"];
  moral["method"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    if (text == "ddr") {
      c.moral.method = MoralMethod::ddr;
    } else if (text == "lexicon") {
      c.moral.method = MoralMethod::lexicon;
    } else {
      r.error(key, "expected \"ddr\" or \"lexicon\" (got \"" + text + "\")");
    }
  };
  moral["threshold"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    double x = std::nan("");
    r.ranged(key, v, x, -1.0, false, 1.0);
    if (!std::isnan(x)) c.moral.threshold = x;
  };

  s["series"]["window"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.series.window, 1, 366);
  };

  auto& acf = s["acf"];
  acf["max_lag"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.acf.max_lag, 1, 10000);
  };
  acf["split"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    if (auto d = parse_date(text)) {
      c.acf.split = *d;
    } else {
      r.error(key, "not a YYYY-MM-DD date: \"" + text + "\"");
    }
  };
  acf["band"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    std::string text;
    if (!r.string(key, v, text)) return;
    if (text == "white_noise") {
      c.acf.band = ConfidenceBand::white_noise;
    } else if (text == "bartlett") {
      c.acf.band = ConfidenceBand::bartlett;
    } else {
      r.error(key, "expected \"white_noise\" or \"bartlett\" (got \"" + text + "\")");
    }
  };

  auto& framing = s["framing"];
  framing["alpha"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.framing.alpha, 0.0, true);
  };
  framing["top_k"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.framing.top_k, 1);
  };
  framing["min_count"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.framing.min_count, 1, INT64_MAX);
  };

  auto& elites = s["elites"];
  elites["bootstrap"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged_int(key, v, c.elites.bootstrap, 1, 100000);
  };
  elites["significance"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.ranged(key, v, c.elites.significance, 0.0, true, 1.0, true);
  };
  elites["all_categories"] = [&c](ConfigReader& r, const std::string& key, const json& v) {
    r.boolean(key, v, c.elites.all_categories);
  };
  return s;
}

}  // namespace

ConfigRead read_config(const json& doc, const fs::path& base_dir) {
  ConfigRead out;
  ConfigReader reader(base_dir, out.errors);
  auto sections = schema(out.config);
  if (!doc.is_object()) {
    out.errors.push_back("config must be a table");
    return out;
  }
  for (const auto& [section, body] : doc.items()) {
    auto sec = sections.find(section);
    if (sec == sections.end()) {
      if (body.is_object()) {
        out.errors.push_back(section + ": unknown section");
      } else {
        out.errors.push_back(section + ": keys must live in a [section]");
      }
      continue;
    }
    if (!body.is_object()) {
      out.errors.push_back(section + ": expected a table");
      continue;
    }
    for (const auto& [key, value] : body.items()) {
      auto h = sec->second.find(key);
      const std::string dotted = section + "." + key;
      if (h == sec->second.end()) {
        out.errors.push_back(dotted + ": unknown key");
        continue;
      }
      h->second(reader, dotted, value);
    }
  }
  const auto& c = out.config;
  if (c.corpus.window_begin && c.corpus.window_end && *c.corpus.window_end <= *c.corpus.window_begin) {
    out.errors.push_back("corpus.window_end: must be after corpus.window_begin");
  }
  return out;
}

namespace {

struct PathNeed {
  const char* key;
  bool present;
  fs::path path;
  std::vector<Stage> users;
  bool directory = false;
};

std::string stage_list(const std::vector<Stage>& stages) {
  std::string out;
  for (Stage s : stages) {
    if (!out.empty()) out += ", ";
    out += to_string(s);
  }
  return out;
}

}  // namespace

std::vector<std::string> check_paths(const PipelineConfig& c, const Artifacts& a) {
  std::vector<std::string> errors;
  auto users_of = [&c](std::initializer_list<Stage> stages) {
    std::vector<Stage> out;
    for (Stage s : stages) {
      if (c.enabled(s)) out.push_back(s);
    }
    return out;
  };

  const auto& p = c.paths;
  std::vector<PathNeed> needs = {
      {"paths.issue_docs", !p.issue_docs.empty(), p.issue_docs, users_of({Stage::induce}), true},
      {"paths.baseline_docs", !p.baseline_docs.empty(), p.baseline_docs, users_of({Stage::induce}), true},
      {"paths.lexicon", !p.lexicon.empty(), p.lexicon, users_of({Stage::tag, Stage::framing})},
      {"paths.bias_table", !p.bias_table.empty(), p.bias_table, users_of({Stage::ideology})},
      {"paths.embeddings", !p.embeddings.empty(), p.embeddings,
       c.moral.method == MoralMethod::ddr ? users_of({Stage::ideology, Stage::moral}) : users_of({Stage::ideology})},
      {"paths.moral_lexicon", !p.moral_lexicon.empty(), p.moral_lexicon, users_of({Stage::moral})},
      {"paths.roster", !p.roster.empty(), p.roster, users_of({Stage::elites})},
      {"paths.conllu", !p.conllu.empty(), p.conllu, users_of({Stage::framing})},
  };

  auto tweet_users = users_of({Stage::tag, Stage::ideology});
  if (!tweet_users.empty()) {
    if (p.tweets.empty()) {
      errors.push_back("paths.tweets: missing (needed by " + stage_list(tweet_users) + ")");
    }
    for (const auto& t : p.tweets) {
      if (!fs::is_regular_file(t)) errors.push_back("paths.tweets: file not found: " + t.string());
    }
  }

  for (const auto& need : needs) {
    if (need.users.empty()) continue;
    if (!need.present) {
      errors.push_back(std::string(need.key) + ": missing (needed by " + stage_list(need.users) + ")");
    } else if (need.directory ? !fs::is_directory(need.path) : !fs::is_regular_file(need.path)) {
      errors.push_back(std::string(need.key) + ": " + (need.directory ? "directory" : "file") +
                       " not found: " + need.path.string());
    }
  }

  if (p.output_dir.empty()) errors.push_back("paths.output_dir: missing");

  // Intermediate files consumed from an earlier run when their producer is off.
  struct Upstream {
    Stage consumer;
    Stage producer;
    const fs::path* file;
  };
  const Upstream upstream[] = {
      {Stage::moral, Stage::tag, &a.tagged},        {Stage::series, Stage::moral, &a.moral},
      {Stage::series, Stage::ideology, &a.ideology}, {Stage::acf, Stage::moral, &a.moral},
      {Stage::acf, Stage::ideology, &a.ideology},    {Stage::elites, Stage::moral, &a.moral},
      {Stage::elites, Stage::ideology, &a.ideology},
  };
  for (const auto& u : upstream) {
    if (!c.enabled(u.consumer) || c.enabled(u.producer)) continue;
    if (!fs::is_regular_file(*u.file)) {
      errors.push_back(std::string(to_string(u.consumer)) + ": needs " + u.file->string() + "; enable the " +
                       std::string(to_string(u.producer)) + " stage or provide the file");
    }
  }
  return errors;
}

std::vector<std::string> check_paths(const PipelineConfig& config) {
  return check_paths(config, Artifacts::in(config.paths.output_dir));
}

namespace {

ConfigRead read_and_check(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc = parse_toml_file(path);
  for (const auto& [k, v] : overrides) apply_override(doc, k, v);
  ConfigRead read = read_config(doc, path.parent_path());
  auto path_errors = check_paths(read.config);
  read.errors.insert(read.errors.end(), path_errors.begin(), path_errors.end());
  return read;
}

}  // namespace

std::vector<std::string> validate_config(const fs::path& path) {
  try {
    return read_and_check(path, {}).errors;
  } catch (const Error& e) {
    return {e.what()};
  }
}

PipelineConfig load_config(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  ConfigRead read = read_and_check(path, overrides);
  if (!read.errors.empty()) {
    std::string msg = "invalid config " + path.string() + ":";
    for (const auto& e : read.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return read.config;
}

json config_snapshot(const PipelineConfig& c) {
  auto opt_path = [](const fs::path& p) -> json { return p.empty() ? json(nullptr) : json(p.generic_string()); };
  json tweets = json::array();
  for (const auto& t : c.paths.tweets) tweets.push_back(t.generic_string());
  json stages = json::array();
  for (Stage s : kAllStages) {
    if (c.enabled(s)) stages.push_back(to_string(s));
  }
  auto opt_ts = [](const std::optional<Timestamp>& t) -> json {
    return t ? json(format_timestamp(*t)) : json(nullptr);
  };

  json j;
  j["paths"] = {{"tweets", tweets},
                {"lexicon", opt_path(c.paths.lexicon)},
                {"bias_table", opt_path(c.paths.bias_table)},
                {"embeddings", opt_path(c.paths.embeddings)},
                {"moral_lexicon", opt_path(c.paths.moral_lexicon)},
                {"roster", opt_path(c.paths.roster)},
                {"conllu", opt_path(c.paths.conllu)},
                {"issue_docs", opt_path(c.paths.issue_docs)},
                {"baseline_docs", opt_path(c.paths.baseline_docs)}};
  j["run"] = {{"seed", c.seed}, {"stages", stages}};
  j["corpus"] = {{"window_begin", opt_ts(c.corpus.window_begin)},
                 {"window_end", opt_ts(c.corpus.window_end)},
                 {"max_malformed_fraction", c.corpus.max_malformed_fraction}};
  j["induce"] = {{"lambda", c.induce.lambda},       {"top_k", c.induce.top_k}, {"n_max", c.induce.n_max},
                 {"min_count", c.induce.min_count}, {"smoothing", c.induce.smoothing},
                 {"tol", c.induce.tol},             {"max_iter", c.induce.max_iter}};
  j["ideology"] = {{"l2", c.ideology.l2},
                   {"min_urls", c.ideology.min_urls},
                   {"class_weight", c.ideology.balanced ? "balanced" : "none"},
                   {"learning_rate", c.ideology.learning_rate},
                   {"tol", c.ideology.tol},
                   {"max_iter", c.ideology.max_iter},
                   {"subsample", c.ideology.subsample}};
  j["moral"] = {{"method", to_string(c.moral.method)},
                {"threshold", c.moral.threshold ? json(*c.moral.threshold) : json(nullptr)}};
  j["series"] = {{"window", c.series.window}};
  j["acf"] = {{"max_lag", c.acf.max_lag},
              {"split", format_date(c.acf.split)},
              {"band", c.acf.band == ConfidenceBand::bartlett ? "bartlett" : "white_noise"}};
  j["framing"] = {{"alpha", c.framing.alpha}, {"top_k", c.framing.top_k}, {"min_count", c.framing.min_count}};
  j["elites"] = {{"bootstrap", c.elites.bootstrap},
                 {"significance", c.elites.significance},
                 {"all_categories", c.elites.all_categories}};
  return j;
}

std::string config_hash(const PipelineConfig& config) { return sha256_hex(config_snapshot(config).dump()); }

int effective_threads(const PipelineConfig& config) {
  if (const char* env = std::getenv("WEDGEPIPE_THREADS")) {
    std::string_view s(env);
    int n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && ptr == s.data() + s.size() && n > 0) return n;
  }
  return config.threads;
}

}  // namespace wedgepipe
