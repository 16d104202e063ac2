#include "wedgepipe/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

std::string_view to_string(TweetKind kind) {
  switch (kind) {
    case TweetKind::original: return "original";
    case TweetKind::retweet: return "retweet";
    case TweetKind::reply: return "reply";
  }
  return "original";
}

std::optional<TweetKind> parse_tweet_kind(std::string_view text) {
  if (text == "original") return TweetKind::original;
  if (text == "retweet") return TweetKind::retweet;
  if (text == "reply") return TweetKind::reply;
  return std::nullopt;
}

std::string TokenSeq::join() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void NgramCounts::add(const std::string& key, std::int64_t n) {
  counts[key] += n;
  total += n;
}

std::int64_t NgramCounts::count(const std::string& key) const {
  auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

std::vector<std::string> NgramCounts::sorted_keys() const {
  std::vector<std::string> keys;
  keys.reserve(counts.size());
  for (const auto& [k, _] : counts) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::string join_ngram(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += kNgramSeparator;
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> split_ngram(std::string_view key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = key.find(kNgramSeparator, start);
    parts.emplace_back(key.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// ---------------------------------------------------------------------------
// normalize

namespace {

bool is_word_char(UChar32 c) {
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  }
  return (U_GET_GC_MASK(c) & (U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK)) != 0;
}

bool is_space(UChar32 c) {
  if (c < 0x80) return c == ' ' || (c >= '\t' && c <= '\r');
  return u_isUWhiteSpace(c);
}

std::u32string to_code_points(std::string_view text) {
  bool ascii = std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  std::u32string out;
  if (ascii) {
    out.reserve(text.size());
    for (char c : text) out.push_back(static_cast<char32_t>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
    return out;
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (U_SUCCESS(status)) s = nfkc->normalize(s, status);
  s.toLower(icu::Locale::getRoot());
  if (U_SUCCESS(status)) s = nfkc->normalize(s, status);
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

bool starts_with_ascii(std::u32string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (s[i] != static_cast<char32_t>(prefix[i])) return false;
  }
  return true;
}

bool is_url_or_mention(std::u32string_view chunk) {
  std::size_t p = 0;
  while (p < chunk.size() && !is_word_char(static_cast<UChar32>(chunk[p])) && chunk[p] != U'@') ++p;
  if (p == chunk.size()) return false;
  if (chunk[p] == U'@') return true;
  auto rest = chunk.substr(p);
  if (starts_with_ascii(rest, "http://") || starts_with_ascii(rest, "https://") || starts_with_ascii(rest, "www.")) {
    return true;
  }
  return chunk.find(U"://") != std::u32string_view::npos;
}

void append_utf8(std::string& out, char32_t c) {
  char buf[4];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, 4, static_cast<UChar32>(c), error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

void emit_chunk(std::u32string_view chunk, std::vector<std::string>& tokens) {
  if (chunk.empty() || is_url_or_mention(chunk)) return;
  std::string token;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    char32_t c = chunk[i];
    if (is_word_char(static_cast<UChar32>(c))) {
      append_utf8(token, c);
    } else if (c == U'-' && i > 0 && i + 1 < chunk.size() && is_word_char(static_cast<UChar32>(chunk[i - 1])) &&
               is_word_char(static_cast<UChar32>(chunk[i + 1]))) {
      token += '-';
    }
  }
  if (!token.empty()) tokens.push_back(std::move(token));
}

}  // namespace

TokenSeq normalize(std::string_view text) {
  TokenSeq seq;
  std::u32string cps = to_code_points(text);
  std::u32string_view view(cps);
  std::size_t start = 0;
  for (std::size_t i = 0; i <= view.size(); ++i) {
    if (i == view.size() || is_space(static_cast<UChar32>(view[i]))) {
      if (i > start) emit_chunk(view.substr(start, i - start), seq.tokens);
      start = i + 1;
    }
  }
  return seq;
}

void add_ngrams(NgramCounts& into, const TokenSeq& seq, int n_max) {
  if (n_max < 1 || n_max > 3) {
    throw ArgumentError("n_max must be in [1, 3], got " + std::to_string(n_max));
  }
  const auto& t = seq.tokens;
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= t.size(); ++i) {
      into.add(join_ngram(std::span<const std::string>(t.data() + i, static_cast<std::size_t>(n))));
    }
  }
}

NgramCounts ngrams(const TokenSeq& seq, int n_max) {
  NgramCounts counts;
  add_ngrams(counts, seq, n_max);
  return counts;
}

// ---------------------------------------------------------------------------
// ingestion

namespace {

bool read_id(const nlohmann::json& obj, const char* key, std::string& out, std::string* error) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (error) *error = std::string("missing key \"") + key + "\"";
    return false;
  }
  if (it->is_string()) {
    out = it->get<std::string>();
  } else if (it->is_number_integer()) {
    out = it->dump();
  } else {
    if (error) *error = std::string("key \"") + key + "\" must be a string";
    return false;
  }
  return true;
}

}  // namespace

std::optional<TweetRecord> parse_tweet(const nlohmann::json& obj, std::string* error) {
  if (!obj.is_object()) {
    if (error) *error = "not a JSON object";
    return std::nullopt;
  }
  TweetRecord r;
  if (!read_id(obj, "id", r.id, error)) return std::nullopt;
  if (r.id.empty()) {
    if (error) *error = "empty id";
    return std::nullopt;
  }
  if (!read_id(obj, "user_id", r.user_id, error)) return std::nullopt;

  auto ts = obj.find("created_at");
  if (ts == obj.end() || !ts->is_string()) {
    if (error) *error = "missing or non-string \"created_at\"";
    return std::nullopt;
  }
  auto parsed = parse_timestamp(ts->get_ref<const std::string&>());
  if (!parsed) {
    if (error) *error = "unparseable created_at \"" + ts->get<std::string>() + "\"";
    return std::nullopt;
  }
  r.created_at = *parsed;

  auto kind = obj.find("kind");
  if (kind == obj.end() || !kind->is_string()) {
    if (error) *error = "missing or non-string \"kind\"";
    return std::nullopt;
  }
  auto k = parse_tweet_kind(kind->get_ref<const std::string&>());
  if (!k) {
    if (error) *error = "unknown kind \"" + kind->get<std::string>() + "\"";
    return std::nullopt;
  }
  r.kind = *k;

  auto text = obj.find("text");
  if (text == obj.end() || !text->is_string()) {
    if (error) *error = "missing or non-string \"text\"";
    return std::nullopt;
  }
  r.text = text->get<std::string>();

  if (auto urls = obj.find("urls"); urls != obj.end() && !urls->is_null()) {
    if (!urls->is_array()) {
      if (error) *error = "\"urls\" must be an array";
      return std::nullopt;
    }
    for (const auto& u : *urls) {
      if (!u.is_string()) {
        if (error) *error = "\"urls\" entries must be strings";
        return std::nullopt;
      }
      r.urls.push_back(u.get<std::string>());
    }
  }
  return r;
}

std::optional<TweetRecord> parse_tweet_line(std::string_view line, std::string* error) {
  auto obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded()) {
    if (error) *error = "invalid JSON";
    return std::nullopt;
  }
  return parse_tweet(obj, error);
}

nlohmann::json to_json(const TweetRecord& r) {
  return nlohmann::json{{"id", r.id},
                        {"created_at", format_timestamp(r.created_at)},
                        {"user_id", r.user_id},
                        {"kind", std::string(to_string(r.kind))},
                        {"text", r.text},
                        {"urls", r.urls}};
}

LoadStats for_each_tweet(const std::filesystem::path& path, const std::function<void(TweetRecord&&)>& sink,
                         const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read tweets file " + path.string());

  LoadStats stats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++stats.lines;
    auto rec = parse_tweet_line(line);
    if (!rec) {
      ++stats.malformed;
      stats.malformed_lines.push_back(lineno);
      continue;
    }
    if ((options.window_begin && rec->created_at < *options.window_begin) ||
        (options.window_end && rec->created_at >= *options.window_end)) {
      ++stats.out_of_window;
      continue;
    }
    ++stats.records;
    sink(std::move(*rec));
  }
  if (in.bad()) throw IoError("error while reading " + path.string());

  if (stats.lines > 0 &&
      static_cast<double>(stats.malformed) > options.max_malformed_fraction * static_cast<double>(stats.lines)) {
    std::string msg = path.string() + ": " + std::to_string(stats.malformed) + " of " + std::to_string(stats.lines) +
                      " lines malformed; lines";
    std::size_t shown = 0;
    for (auto l : stats.malformed_lines) {
      if (shown++ == 20) {
        msg += " ...";
        break;
      }
      msg += " " + std::to_string(l);
    }
    throw SchemaError(msg);
  }
  return stats;
}

TweetLoad load_tweets(const std::filesystem::path& path, const LoadOptions& options) {
  TweetLoad out;
  out.stats = for_each_tweet(path, [&](TweetRecord&& r) { out.records.push_back(std::move(r)); }, options);
  return out;
}

}  // namespace wedgepipe
