#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wedgepipe/dates.hpp"

namespace wedgepipe {

enum class TweetKind : std::uint8_t { original, retweet, reply };

std::string_view to_string(TweetKind kind);
std::optional<TweetKind> parse_tweet_kind(std::string_view text);

struct TweetRecord {
  std::string id;
  Timestamp created_at{};
  std::string user_id;
  TweetKind kind = TweetKind::original;
  std::string text;
  std::vector<std::string> urls;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

/// Normalized tokens: lowercase, non-empty, whitespace-free.
struct TokenSeq {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  auto begin() const noexcept { return tokens.begin(); }
  auto end() const noexcept { return tokens.end(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  /// Tokens joined by single spaces.
  std::string join() const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

/// N-gram frequency table. Keys join tokens with '_'.
struct NgramCounts {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;

  void add(const std::string& key, std::int64_t n = 1);
  std::int64_t count(const std::string& key) const;
  std::size_t size() const noexcept { return counts.size(); }
  bool empty() const noexcept { return counts.empty(); }
  /// Keys in lexicographic order.
  std::vector<std::string> sorted_keys() const;
};

inline constexpr char kNgramSeparator = '_';

std::string join_ngram(std::span<const std::string> tokens);
std::vector<std::string> split_ngram(std::string_view key);

/// Lowercases, applies NFKC, drops URLs and @-mentions, strips '#' from
/// hashtags, and removes punctuation other than hyphens between two
/// word characters.
TokenSeq normalize(std::string_view text);

/// All contiguous n-grams of orders 1..n_max. Throws ArgumentError unless
/// 1 <= n_max <= 3.
NgramCounts ngrams(const TokenSeq& seq, int n_max);
void add_ngrams(NgramCounts& into, const TokenSeq& seq, int n_max);

// ---------------------------------------------------------------------------
// Tweet ingestion

struct LoadOptions {
  std::optional<Timestamp> window_begin;  ///< inclusive
  std::optional<Timestamp> window_end;    ///< exclusive
  double max_malformed_fraction = 0.10;
};

struct LoadStats {
  std::size_t lines = 0;  ///< non-blank lines seen
  std::size_t records = 0;
  std::size_t malformed = 0;
  std::size_t out_of_window = 0;
  std::vector<std::size_t> malformed_lines;
};

/// Parses one JSON object into a record. On failure returns nullopt and, when
/// `error` is given, a description of the first problem.
std::optional<TweetRecord> parse_tweet(const nlohmann::json& obj, std::string* error = nullptr);
std::optional<TweetRecord> parse_tweet_line(std::string_view line, std::string* error = nullptr);
nlohmann::json to_json(const TweetRecord& record);

/// Streams records in file order. Malformed lines are skipped and counted;
/// once the file is exhausted a SchemaError is thrown if more than
/// `max_malformed_fraction` of lines were malformed. Unreadable files raise
/// IoError.
LoadStats for_each_tweet(const std::filesystem::path& path,
                         const std::function<void(TweetRecord&&)>& sink,
                         const LoadOptions& options = {});

struct TweetLoad {
  std::vector<TweetRecord> records;
  LoadStats stats;
};

TweetLoad load_tweets(const std::filesystem::path& path, const LoadOptions& options = {});

}  // namespace wedgepipe
