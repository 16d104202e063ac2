#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wedgepipe/errors.hpp"
#include "wedgepipe/series.hpp"

using namespace wedgepipe;

namespace {

Day day(int offset) { return Day{std::chrono::year{2020} / 12 / 1} + std::chrono::days{offset}; }

DocRecord rec(int d, TweetKind kind, IssueSet issues, std::optional<Leaning> group = std::nullopt,
              std::uint16_t moral = 0) {
  DocRecord r;
  r.day = day(d);
  r.kind = kind;
  r.issues = issues;
  r.group = group;
  r.moral = moral;
  return r;
}

DailySeries series_of(std::vector<std::optional<double>> values) {
  DailySeries s;
  s.start = day(0);
  s.values = std::move(values);
  return s;
}

double variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("daily_share") {
  std::vector<DocRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec(0, TweetKind::original, i < 4 ? IssueSet{Issue::masking} : IssueSet{}));
  rs.push_back(rec(0, TweetKind::retweet, IssueSet{Issue::masking}));
  rs.push_back(rec(2, TweetKind::original, IssueSet{Issue::masking, Issue::vaccines}));
  auto s = daily_share(rs, Issue::masking, TweetKind::original);
  REQUIRE(s.size() == 3);
  CHECK(s.values[0] == 0.4);
  CHECK_FALSE(s.values[1]);
  CHECK(s.values[2] == 1.0);
  CHECK(daily_share(rs, Issue::vaccines, TweetKind::original).values[2] == 1.0);
  CHECK(daily_share(std::vector<DocRecord>{}, Issue::masking, TweetKind::original).empty());
  CHECK(daily_share(rs, Issue::masking, TweetKind::original, Leaning::liberal).present_count() == 0);
}

TEST_CASE("rolling_mean") {
  auto c = rolling_mean(series_of({2.0, 2.0, 2.0, 2.0}), 3);
  for (auto& v : c.values) CHECK(v == 2.0);
  auto two = rolling_mean(series_of({0.0, 7.0}), 2);
  CHECK(two.values[0] == 0.0);
  CHECK(two.values[1] == 3.5);
  auto id = series_of({1.0, std::nullopt, 3.0});
  CHECK(rolling_mean(id, 1).values == id.values);
  auto gaps = rolling_mean(series_of({1.0, std::nullopt, std::nullopt, 5.0}), 2);
  CHECK(gaps.values[1] == 1.0);
  CHECK_FALSE(gaps.values[2]);
  CHECK(gaps.values[3] == 5.0);
  CHECK_THROWS_AS(rolling_mean(id, 0), ArgumentError);
}

TEST_CASE("rolling_mean divides white-noise variance by about the window") {
  std::vector<double> ratios;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = oracle::white_noise(2000, seed);
    DailySeries s;
    s.start = day(0);
    for (double v : x) s.values.push_back(v);
    auto r = rolling_mean(s, 7);
    std::vector<double> smooth;
    for (std::size_t i = 6; i < r.size(); ++i) smooth.push_back(*r.values[i]);
    ratios.push_back(variance(x) / variance(smooth));
  }
  for (double ratio : ratios) {
    CHECK(ratio > 7.0 * 0.7);
    CHECK(ratio < 7.0 * 1.3);
  }
}

TEST_CASE("delta_share") {
  CHECK(delta_share({10, 100}, {5, 50}) == 0.0);
  CHECK(*delta_share({30, 200}, {5, 100}) == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(*delta_share({30, 200}, {5, 100}) == 30.0 / 200.0 - 5.0 / 100.0);
  CHECK_FALSE(delta_share({0, 0}, {1, 2}));
  CHECK_FALSE(delta_share({1, 2}, {0, 0}));

  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    ShareCounts a{static_cast<std::int64_t>(rng() % 50), 50 + static_cast<std::int64_t>(rng() % 100)};
    ShareCounts b{static_cast<std::int64_t>(rng() % 50), 50 + static_cast<std::int64_t>(rng() % 100)};
    CHECK(*delta_share(a, b) == -*delta_share(b, a));
  }
}

TEST_CASE("delta_series counts originals per group") {
  std::vector<DocRecord> rs;
  for (int i = 0; i < 200; ++i) rs.push_back(rec(0, TweetKind::original, i < 30 ? IssueSet{Issue::origins} : IssueSet{}, Leaning::liberal));
  for (int i = 0; i < 100; ++i)
    rs.push_back(rec(0, TweetKind::original, i < 5 ? IssueSet{Issue::origins} : IssueSet{}, Leaning::conservative));
  for (int i = 0; i < 50; ++i) rs.push_back(rec(0, TweetKind::retweet, IssueSet{Issue::origins}, Leaning::conservative));
  rs.push_back(rec(0, TweetKind::original, IssueSet{Issue::origins}));
  auto s = delta_series(rs, Issue::origins);
  REQUIRE(s.size() == 1);
  CHECK(*s.values[0] == 30.0 / 200.0 - 5.0 / 100.0);
}

TEST_CASE("moral_share") {
  CHECK(moral_share(8, 40) == 0.2);
  CHECK_FALSE(moral_share(0, 0));
  CHECK(moral_share(40, 40) == 1.0);

  const auto care = MoralSelector::of(MoralCategory::care);
  const auto care_harm = MoralSelector::of(Foundation::care_harm);
  std::vector<DocRecord> rs;
  for (int i = 0; i < 40; ++i) rs.push_back(rec(i % 2, TweetKind::original, IssueSet{Issue::vaccines}, Leaning::liberal, i < 8 ? 1 : (i < 12 ? 2 : 0)));
  rs.push_back(rec(0, TweetKind::retweet, IssueSet{Issue::vaccines}, Leaning::liberal, 1));
  CHECK(moral_share(rs, care, Issue::vaccines) == 0.2);
  CHECK(moral_share(rs, care_harm, Issue::vaccines) == 0.3);
  CHECK_FALSE(moral_share(rs, care, Issue::masking));
  auto daily = moral_share_series(rs, care, Issue::vaccines, Leaning::liberal);
  REQUIRE(daily.size() == 2);
  CHECK(*daily.values[0] == 4.0 / 20.0);
}

TEST_CASE("fill_gaps") {
  auto f = fill_gaps(series_of({std::nullopt, 1.0, std::nullopt, std::nullopt, 4.0, std::nullopt}));
  CHECK(f.start == day(1));
  REQUIRE(f.size() == 4);
  CHECK(*f.values[1] == 2.0);
  CHECK(*f.values[2] == 3.0);
  CHECK_FALSE(f.has_gaps());
  CHECK(fill_gaps(series_of({std::nullopt})).empty());
}

TEST_CASE("acf examples and oracle") {
  std::vector<double> alt = {1, -1, 1, -1};
  auto a = acf(alt, 2);
  CHECK(a.r[0] == 1.0);
  CHECK(a.r[1] == -0.75);
  CHECK(a.conf == 1.96 / 2.0);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(30 + rng() % 200);
    for (auto& v : x) v = u(rng);
    const int max_lag = static_cast<int>(std::min<std::size_t>(60, x.size() - 2));
    auto r = acf(x, max_lag);
    auto o = oracle::acf(x, max_lag);
    CHECK(r.r[0] == 1.0);
    for (int k = 0; k <= max_lag; ++k) {
      CHECK(std::abs(r.r[k] - o[k]) < 1e-12);
      CHECK(std::abs(r.r[k]) <= 1.0);
    }
  }

  CHECK_THROWS_AS(acf(std::vector<double>{1, 2, 3}, 2), ArgumentError);
  CHECK_THROWS_AS(acf(std::vector<double>{2, 2, 2, 2}, 1), DegenerateSeriesError);
  CHECK_THROWS_AS(acf(series_of({1.0, std::nullopt, 2.0, 3.0}), 1), ArgumentError);
}

TEST_CASE("white-noise autocorrelations stay small") {
  auto x = oracle::white_noise(365, 77);
  auto a = acf(x, 30);
  int inside = 0;
  for (int k = 1; k <= 30; ++k) inside += std::abs(a.r[k]) < 3.0 / std::sqrt(365.0);
  CHECK(inside >= 29);
}

TEST_CASE("bartlett band widens with lag") {
  auto x = oracle::ar1(300, 0.7, 3);
  auto a = acf(x, 20, ConfidenceBand::bartlett);
  CHECK(a.band[1] == doctest::Approx(a.conf));
  for (int k = 2; k <= 20; ++k) CHECK(a.band[k] >= a.band[k - 1]);
}

TEST_CASE("persistence") {
  AcfResult a;
  a.r = {1, 0.01, 0.5};
  a.conf = 0.1;
  a.band = {0.1, 0.1, 0.1};
  CHECK(persistence(a).lag == 1);

  AcfResult slow;
  slow.conf = 0.1;
  for (int k = 0; k <= 60; ++k) {
    slow.r.push_back(std::pow(0.99, k));
    slow.band.push_back(0.1);
  }
  auto p = persistence(slow);
  CHECK(p.lag == 61);
  CHECK(p.censored);

  AcfResult edge;
  edge.r = {1, 0.1, 0.05};
  edge.conf = 0.1;
  edge.band = {0.1, 0.1, 0.1};
  CHECK(persistence(edge).lag == 2);
}

TEST_CASE("persistence is monotone in the bound") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto a = acf(oracle::ar1(365, 0.8, seed), 60);
    int previous = INT32_MAX;
    for (double conf : {0.05, 0.1, 0.2, 0.4}) {
      auto b = a;
      b.conf = conf;
      std::fill(b.band.begin(), b.band.end(), conf);
      const int lag = persistence(b).lag;
      CHECK(lag <= previous);
      previous = lag;
    }
  }
}

TEST_CASE("split_period") {
  DailySeries s;
  s.start = Day{std::chrono::year{2020} / 12 / 1};
  s.values.assign(20, 1.0);
  auto [pre, post] = split_period(s, Day{std::chrono::year{2020} / 12 / 11});
  CHECK(format_date(pre.day_at(pre.size() - 1)) == "2020-12-10");
  CHECK(format_date(post.start) == "2020-12-11");
  CHECK(pre.size() + post.size() == s.size());
  auto [none, all] = split_period(s, s.start);
  CHECK(none.empty());
  CHECK(all.size() == 20);
  CHECK_THROWS_AS(split_period(s, s.start - std::chrono::days{1}), ArgumentError);
  CHECK_THROWS_AS(split_period(s, s.start + std::chrono::days{20}), ArgumentError);
}
