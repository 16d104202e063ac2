#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "wedgepipe/config.hpp"
#include "wedgepipe/errors.hpp"
#include "wedgepipe/synth.hpp"

using namespace wedgepipe;

namespace {

nlohmann::json toml(const std::string& text) {
  std::istringstream in(text);
  return parse_toml(in);
}

bool mentions(const std::vector<std::string>& errors, std::string_view needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("toml subset") {
  auto doc = toml(R"(# top comment
[paths]
tweets = ["a.jsonl", 'b.jsonl',
  "c.jsonl"]  # trailing
name = "x # not a comment"

[induce]
lambda = 1.5
top_k = 1_000
flag = true
split = 2020-12-11
neg = -3
)");
  CHECK(doc["paths"]["tweets"].size() == 3);
  CHECK(doc["paths"]["tweets"][1] == "b.jsonl");
  CHECK(doc["paths"]["name"] == "x # not a comment");
  CHECK(doc["induce"]["lambda"] == 1.5);
  CHECK(doc["induce"]["top_k"] == 1000);
  CHECK(doc["induce"]["flag"] == true);
  CHECK(doc["induce"]["split"] == "2020-12-11");
  CHECK(doc["induce"]["neg"] == -3);

  CHECK_THROWS_AS(toml("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(toml("[a]\n[a]\n"), ConfigError);
  CHECK_THROWS_AS(toml("[[a]]\n"), ConfigError);
  CHECK_THROWS_AS(toml("[a]\nd = 2020-13-45\n"), ConfigError);
  try {
    toml("[a]\nok = 1\nbad = \"unterminated\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("overrides") {
  nlohmann::json doc = nlohmann::json::object();
  apply_override(doc, "induce.lambda", "2.5");
  apply_override(doc, "moral.method", "lexicon");
  apply_override(doc, "acf.split", "2021-01-01");
  apply_override(doc, "run.stages", "[\"tag\"]");
  CHECK(doc["induce"]["lambda"] == 2.5);
  CHECK(doc["moral"]["method"] == "lexicon");
  CHECK(doc["acf"]["split"] == "2021-01-01");
  CHECK(doc["run"]["stages"][0] == "tag");
  CHECK_THROWS_AS(apply_override(doc, "nodot", "1"), ConfigError);
}

TEST_CASE("stage names") {
  for (Stage s : kAllStages) CHECK(parse_stage(to_string(s)) == s);
  CHECK_FALSE(parse_stage("plot"));
}

TEST_CASE("read_config collects every problem") {
  auto doc = toml(R"(
[paths]
output_dir = "out"
[induce]
lambda = -1
top_k = "many"
[moral]
method = "bert"
[acf]
split = "2020-13-45"
[bogus]
x = 1
[series]
widow = 7
)");
  auto read = read_config(doc, "/tmp");
  CHECK(mentions(read.errors, "induce.lambda"));
  CHECK(mentions(read.errors, "induce.top_k"));
  CHECK(mentions(read.errors, "moral.method"));
  CHECK(mentions(read.errors, "acf.split"));
  CHECK(mentions(read.errors, "bogus"));
  CHECK(mentions(read.errors, "series.widow"));
  CHECK(read.errors.size() == 6);
}

TEST_CASE("validate_config on the fixture") {
  oracle::TempDir dir("config");
  SynthOptions small;
  small.tweets = 500;
  small.users = 40;
  small.elites = 4;
  small.sentences = 50;
  write_fixture(dir.path(), small);
  const auto cfg = dir.path() / "config.toml";

  CHECK(validate_config(cfg).empty());

  SUBCASE("missing tweets path") {
    auto doc = parse_toml_file(cfg);
    doc["paths"].erase("tweets");
    auto read = read_config(doc, dir.path());
    CHECK(read.errors.empty());
    auto errors = check_paths(read.config);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("paths.tweets") != std::string::npos);
  }
  SUBCASE("negative lambda") {
    std::ifstream in(cfg);
    std::stringstream text;
    text << in.rdbuf();
    std::string s = text.str();
    s.replace(s.find("lambda = 1.0"), 12, "lambda = -1");
    std::ofstream(dir.path() / "neg.toml") << s;
    auto errors = validate_config(dir.path() / "neg.toml");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("induce.lambda") != std::string::npos);
    CHECK_THROWS_AS(load_config(dir.path() / "neg.toml"), ConfigError);
  }
  SUBCASE("upstream artifacts are required when their stage is off") {
    auto doc = parse_toml_file(cfg);
    apply_override(doc, "run.stages", "[\"series\"]");
    auto errors = check_paths(read_config(doc, dir.path()).config);
    CHECK(mentions(errors, "moral"));
    CHECK_THROWS_AS(load_config(cfg, {{"run.stages", "[\"series\"]"}}), ConfigError);
  }
  SUBCASE("relative paths resolve against the config file") {
    auto config = load_config(cfg);
    REQUIRE(config.paths.tweets.size() == 1);
    CHECK(config.paths.tweets[0] == dir.path() / "tweets.jsonl");
    CHECK(config.paths.output_dir == dir.path() / "out");
    CHECK(config.seed == 7);
  }
  SUBCASE("hash ignores output directory and threads but not hyperparameters") {
    auto a = load_config(cfg);
    auto b = load_config(cfg, {{"paths.output_dir", "elsewhere"}, {"run.threads", "4"}});
    auto c = load_config(cfg, {{"framing.alpha", "0.25"}});
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).size() == 64);
  }
}

TEST_CASE("missing config file") { CHECK_FALSE(validate_config("/nonexistent/config.toml").empty()); }
