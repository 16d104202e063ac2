#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wedgepipe/errors.hpp"
#include "wedgepipe/lexicon.hpp"

using namespace wedgepipe;

namespace {

NgramCounts counts_of(std::initializer_list<std::pair<const char*, std::int64_t>> items) {
  NgramCounts c;
  for (auto [k, n] : items) c.add(k, n);
  return c;
}

// Dense views of the issue counts and background aligned on the background
// vocabulary.
struct Dense {
  std::vector<double> c;
  std::vector<double> m;
};

Dense dense(const NgramCounts& issue, const BackgroundModel& bg) {
  Dense d;
  d.m = bg.log_probs;
  d.c.assign(bg.size(), 0.0);
  for (std::size_t i = 0; i < bg.size(); ++i) d.c[i] = static_cast<double>(issue.count(bg.vocab[i]));
  return d;
}

}  // namespace

TEST_CASE("build_counts") {
  std::vector<TokenSeq> docs = {TokenSeq{{"a", "b"}}, TokenSeq{{"a"}}};
  auto c2 = build_counts(docs, 1, 2);
  CHECK(c2.size() == 1);
  CHECK(c2.count("a") == 2);
  CHECK(c2.total == 2);
  auto c1 = build_counts(docs, 1, 1);
  CHECK(c1.count("b") == 1);
  CHECK(c1.total == 3);
  CHECK(build_counts({}, 3, 1).total == 0);
}

TEST_CASE("stopword n-grams are dropped at the edges only") {
  auto c = counts_of({{"the", 5}, {"the_virus", 2}, {"cover_your_mouth", 3}, {"virus", 4}});
  drop_stopword_ngrams(c, english_stopwords());
  CHECK(c.count("the") == 0);
  CHECK(c.count("the_virus") == 0);
  CHECK(c.count("cover_your_mouth") == 3);
  CHECK(c.total == 7);
}

TEST_CASE("fit_background") {
  auto bg = fit_background(counts_of({{"a", 3}, {"b", 1}}), 1.0);
  CHECK(bg.log_prob("a") == doctest::Approx(std::log(4.0 / 6.0)));
  CHECK(bg.log_prob("b") == doctest::Approx(std::log(2.0 / 6.0)));
  CHECK_THROWS_AS(fit_background(counts_of({{"a", 3}}), 0.0), ArgumentError);
  CHECK_THROWS_AS(fit_background(NgramCounts{}, 1.0), ConfigError);

  auto tiny = fit_background(counts_of({{"a", 1}, {"b", 1}}), 1e-9);
  CHECK(tiny.log_prob("a") == doctest::Approx(std::log(0.5)));

  // The union vocabulary includes issue-only terms, and exp sums to one.
  std::vector<NgramCounts> issues = {counts_of({{"z", 4}})};
  auto u = fit_background(counts_of({{"a", 3}, {"b", 1}}), 0.5, issues);
  CHECK(u.size() == 3);
  double z = 0.0;
  for (double m : u.log_probs) z += std::exp(m);
  CHECK(std::abs(z - 1.0) < 1e-9);
  CHECK_THROWS_AS(u.log_prob("q"), ArgumentError);
}

TEST_CASE("sage: proportional counts give eta = 0") {
  auto baseline = counts_of({{"a", 40}, {"b", 30}, {"c", 20}, {"d", 10}});
  auto bg = fit_background(baseline, 1e-12);
  auto issue = counts_of({{"a", 400}, {"b", 300}, {"c", 200}, {"d", 100}});
  auto eta = sage_fit(issue, bg, SageOptions{.lambda = 0.1});
  for (double e : eta.eta) CHECK(std::abs(e) < 1e-9);
  CHECK(eta.nonzero() == 0);
}

TEST_CASE("sage: objective never decreases") {
  auto pc = oracle::planted_corpus(400, 10, 6.0, 40000, 8000, 5);
  std::vector<NgramCounts> issues = {pc.issue};
  auto bg = fit_background(pc.baseline, 1.0, issues);
  for (double lambda : {0.0, 0.5, 3.0}) {
    auto eta = sage_fit(pc.issue, bg, SageOptions{.lambda = lambda, .tol = 1e-8, .max_iter = 400, .record_trace = true});
    REQUIRE(eta.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < eta.objective_trace.size(); ++i)
      CHECK(eta.objective_trace[i] >= eta.objective_trace[i - 1] - 1e-10);
  }
}

TEST_CASE("sage: smooth gradient matches finite differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 30;
  std::vector<double> c(n), m(n);
  for (auto& v : c) v = static_cast<double>(rng() % 20 + 1);
  for (auto& v : m) v = g(rng);
  for (int point = 0; point < 20; ++point) {
    std::vector<double> eta(n);
    for (auto& v : eta) v = g(rng);
    auto grad = sage_smooth_gradient(c, m, eta);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto up = eta, down = eta;
      up[i] += h;
      down[i] -= h;
      const double fd = (sage_objective(c, m, up, 0.0) - sage_objective(c, m, down, 0.0)) / (2 * h);
      CHECK(std::abs(fd - grad[i]) <= 1e-4 * std::max(1.0, std::abs(grad[i])));
    }
  }
}

TEST_CASE("sage: sparsity is monotone in lambda") {
  auto pc = oracle::planted_corpus(600, 15, 8.0, 60000, 10000, 9);
  std::vector<NgramCounts> issues = {pc.issue};
  auto bg = fit_background(pc.baseline, 1.0, issues);
  std::size_t previous = SIZE_MAX;
  for (double lambda : {0.1, 1.0, 10.0}) {
    auto eta = sage_fit(pc.issue, bg, SageOptions{.lambda = lambda, .tol = 1e-7, .max_iter = 2000});
    CHECK(eta.nonzero() <= previous);
    previous = eta.nonzero();
  }
}

TEST_CASE("sage: lambda = 0 reaches the closed form") {
  auto baseline = counts_of({{"a", 50}, {"b", 25}, {"c", 15}, {"d", 10}});
  auto bg = fit_background(baseline, 1.0);
  auto issue = counts_of({{"a", 5}, {"b", 40}, {"c", 30}, {"d", 25}});
  auto eta = sage_fit(issue, bg, SageOptions{.lambda = 0.0, .tol = 1e-10, .max_iter = 5000});
  auto d = dense(issue, bg);
  std::vector<double> logits(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i) logits[i] = d.m[i] + eta.eta[i];
  auto p = oracle::softmax(logits);
  for (std::size_t i = 0; i < bg.size(); ++i) CHECK(p[i] == doctest::Approx(d.c[i] / 100.0).epsilon(1e-7));
  // Gauge: count-weighted mean of eta is zero.
  double weighted = 0.0;
  for (std::size_t i = 0; i < bg.size(); ++i) weighted += d.c[i] * eta.eta[i];
  CHECK(std::abs(weighted) < 1e-8);
}

TEST_CASE("sage: argument checks") {
  auto bg = fit_background(counts_of({{"a", 1}}), 1.0);
  CHECK_THROWS_AS(sage_fit(counts_of({{"a", 1}}), bg, SageOptions{.lambda = -1.0}), ArgumentError);
  CHECK_THROWS_AS(sage_fit(counts_of({{"a", 1}}), bg, SageOptions{.tol = 0.0}), ArgumentError);
  CHECK_THROWS_AS(sage_fit(counts_of({{"zz", 1}}), bg, SageOptions{}), ArgumentError);
  auto capped = sage_fit(counts_of({{"a", 1}}), fit_background(counts_of({{"a", 5}, {"b", 5}}), 1.0),
                         SageOptions{.lambda = 0.0, .tol = 1e-300, .max_iter = 2});
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 2);
}

TEST_CASE("select_candidates") {
  EtaVector e;
  e.terms = {"a", "b", "c"};
  e.eta = {0.5, 0.1, -0.2};
  auto top = select_candidates(e, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "a");
  CHECK(top[1].first == "b");
  CHECK(select_candidates(e, 10).size() == 2);

  e.eta = {-1, 0, -0.5};
  CHECK(select_candidates(e, 5).empty());

  e.terms = {"b", "a"};
  e.eta = {0.3, 0.3};
  CHECK(select_candidates(e, 1)[0].first == "a");
  CHECK(select_candidates(e, 2) == select_candidates(e, 2));
}

TEST_CASE("curated lexicon") {
  std::istringstream in("# comment\norigins\tWuhan labs\nmasking\tcover your mouth\norigins\twuhan LABS\n");
  auto load = parse_curated_lexicon(in);
  REQUIRE(load.lexicons.size() == 2);
  CHECK(load.lexicons[0].issue == Issue::origins);
  CHECK(load.lexicons[0].phrases == std::set<std::string>{"wuhan_labs"});
  CHECK(load.lexicons[0].provenance == LexiconProvenance::curated);
  CHECK(load.lexicons[1].phrases.count("cover_your_mouth") == 1);
  CHECK(load.warnings.size() == 1);

  std::istringstream empty("");
  auto none = parse_curated_lexicon(empty);
  CHECK(none.lexicons.empty());
  CHECK_FALSE(none.warnings.empty());

  std::istringstream bad("origins\tok\nweather\tsunny\n");
  try {
    parse_curated_lexicon(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream longer("origins\tone two three four\n");
  CHECK_THROWS_AS(parse_curated_lexicon(longer), ParseError);

  std::ostringstream out;
  write_lexicon_tsv(out, load.lexicons);
  std::istringstream back(out.str());
  auto again = parse_curated_lexicon(back);
  REQUIRE(again.lexicons.size() == 2);
  CHECK(again.lexicons[1].phrases == load.lexicons[1].phrases);
}
