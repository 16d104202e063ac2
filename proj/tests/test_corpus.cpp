#include <doctest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "wedgepipe/corpus.hpp"
#include "wedgepipe/errors.hpp"

using namespace wedgepipe;

namespace {

std::vector<std::string> toks(std::string_view text) { return normalize(text).tokens; }

std::string tweet_line(int id, std::string_view text = "hello") {
  nlohmann::json j = {{"id", std::to_string(id)},
                      {"created_at", "2020-06-01T12:00:00Z"},
                      {"user_id", "u1"},
                      {"kind", "original"},
                      {"text", text}};
  return j.dump();
}

}  // namespace

TEST_CASE("normalize examples") {
  CHECK(toks("Wuhan LABS!") == std::vector<std::string>{"wuhan", "labs"});
  CHECK(toks("#StayHome https://t.co/x @user") == std::vector<std::string>{"stayhome"});
  CHECK(toks("").empty());
  CHECK(toks("anti-vaxxers - who -dash") == std::vector<std::string>{"anti-vaxxers", "who", "dash"});
  CHECK(toks("ＷＵＨＡＮ") == std::vector<std::string>{"wuhan"});
  CHECK(toks("We’re in the middle") == std::vector<std::string>{"were", "in", "the", "middle"});
}

TEST_CASE("normalize is idempotent") {
  const std::vector<std::string> samples = {
      "No matter what the Chinese Communist Party says, the WUHAN labs!!",
      "#StayHome #TakeItSeriously @cdc https://example.com/a?b=c",
      "Ｆｕｌｌｗｉｄｔｈ and ligatures ﬁne, Straße, İstanbul",
      "well--known co-op x-ray ... ---",
      "emoji 😷 mixed😷text and tabs\tnew\nlines",
  };
  for (const auto& s : samples) {
    auto once = normalize(s);
    CHECK(normalize(once.join()) == once);
    for (const auto& t : once) {
      CHECK_FALSE(t.empty());
      CHECK(t.find_first_of(" \t\n") == std::string::npos);
    }
  }

  std::mt19937_64 rng(3);
  const std::string alphabet = "abcXYZ #@-.,!'’ÄéＡ:/0123";
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const auto len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    auto once = normalize(s);
    CHECK(normalize(once.join()) == once);
  }
}

TEST_CASE("ngrams examples") {
  auto c = ngrams(TokenSeq{{"a", "b", "c"}}, 2);
  CHECK(c.total == 5);
  CHECK(c.size() == 5);
  CHECK(c.count("a_b") == 1);
  CHECK(c.count("b_c") == 1);
  CHECK(ngrams(TokenSeq{{"a"}}, 3).total == 1);
  auto aa = ngrams(TokenSeq{{"a", "a"}}, 1);
  CHECK(aa.count("a") == 2);
  CHECK(aa.total == 2);
  CHECK_THROWS_AS(ngrams(TokenSeq{{"a"}}, 0), ArgumentError);
  CHECK_THROWS_AS(ngrams(TokenSeq{{"a"}}, 4), ArgumentError);
}

TEST_CASE("ngram totals follow the length formula") {
  for (std::int64_t len = 0; len < 12; ++len) {
    TokenSeq seq;
    for (std::int64_t i = 0; i < len; ++i) seq.tokens.push_back("w" + std::to_string(i % 3));
    auto c = ngrams(seq, 3);
    const auto expected = std::max<std::int64_t>(len, 0) + std::max<std::int64_t>(len - 1, 0) +
                          std::max<std::int64_t>(len - 2, 0);
    CHECK(c.total == expected);
    std::int64_t sum = 0;
    for (const auto& [key, n] : c.counts) {
      sum += n;
      const auto parts = split_ngram(key);
      CHECK(parts.size() >= 1);
      CHECK(parts.size() <= 3);
    }
    CHECK(sum == c.total);
  }
}

TEST_CASE("timestamps are read as UTC") {
  auto a = parse_timestamp("2020-03-19T12:00:00Z");
  auto b = parse_timestamp("2020-03-19T14:00:00.250+02:00");
  auto c = parse_timestamp("2020-03-19 12:00:00");
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(c);
  CHECK(*a == *b);
  CHECK(*a == *c);
  CHECK(format_date(day_of(*a)) == "2020-03-19");
  CHECK_FALSE(parse_timestamp("2020-13-01T00:00:00Z"));
  CHECK_FALSE(parse_timestamp("yesterday"));
}

TEST_CASE("load_tweets") {
  oracle::TempDir dir("corpus");
  const auto path = dir.path() / "t.jsonl";

  SUBCASE("well-formed file keeps order") {
    std::ofstream(path) << tweet_line(1) << "\n" << tweet_line(2) << "\n" << tweet_line(3) << "\n";
    auto load = load_tweets(path);
    REQUIRE(load.records.size() == 3);
    CHECK(load.records[0].id == "1");
    CHECK(load.records[2].id == "3");
  }
  SUBCASE("one malformed line in ten is skipped") {
    std::ofstream out(path);
    for (int i = 0; i < 9; ++i) out << tweet_line(i) << "\n";
    out << "{\"id\": \"x\"}\n";
    out.close();
    auto load = load_tweets(path);
    CHECK(load.records.size() == 9);
    CHECK(load.stats.malformed == 1);
    CHECK(load.stats.malformed_lines == std::vector<std::size_t>{10});
  }
  SUBCASE("more than ten percent malformed is fatal") {
    std::ofstream out(path);
    for (int i = 0; i < 8; ++i) out << tweet_line(i) << "\n";
    out << "not json\n{\"kind\": \"quote\"}\n";
    out.close();
    CHECK_THROWS_AS(load_tweets(path), SchemaError);
  }
  SUBCASE("empty file") {
    std::ofstream(path).close();
    CHECK(load_tweets(path).records.empty());
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_tweets(dir.path() / "nope.jsonl"), IoError); }
  SUBCASE("window filter") {
    std::ofstream(path) << tweet_line(1) << "\n";
    LoadOptions opts;
    opts.window_begin = parse_timestamp("2020-07-01T00:00:00Z");
    auto load = load_tweets(path, opts);
    CHECK(load.records.empty());
    CHECK(load.stats.out_of_window == 1);
  }
}

TEST_CASE("record count equals well-formed line count") {
  oracle::TempDir dir("corpus-prop");
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto path = dir.path() / ("t" + std::to_string(trial) + ".jsonl");
    std::ofstream out(path);
    int good = 0;
    const int lines = 50 + static_cast<int>(rng() % 50);
    for (int i = 0; i < lines; ++i) {
      if (rng() % 25 == 0) {
        out << "{broken\n";
      } else {
        out << tweet_line(i) << "\n";
        ++good;
      }
    }
    out.close();
    auto load = load_tweets(path, LoadOptions{.max_malformed_fraction = 1.0});
    CHECK(static_cast<int>(load.records.size()) == good);
  }
}

TEST_CASE("parse_tweet rejects bad fields") {
  std::string err;
  CHECK_FALSE(parse_tweet_line(R"({"id":"","created_at":"2020-01-01T00:00:00Z","user_id":"u","kind":"original","text":""})", &err));
  CHECK_FALSE(err.empty());
  CHECK_FALSE(parse_tweet_line(R"({"id":"1","created_at":"2020-01-01T00:00:00Z","user_id":"u","kind":"quote","text":""})"));
  auto ok = parse_tweet_line(
      R"({"id":"1","created_at":"2020-01-01T00:00:00Z","user_id":"u","kind":"reply","text":"x","urls":["http://a.com"]})");
  REQUIRE(ok);
  CHECK(ok->kind == TweetKind::reply);
  CHECK(ok->urls.size() == 1);
  CHECK(parse_tweet(to_json(*ok)) == ok);
}
