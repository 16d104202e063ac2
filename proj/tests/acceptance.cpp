// Acceptance checks. Prints one PASS/FAIL line per criterion. Exits non-zero
// if any criterion fails, unless the failure is a recorded discrepancy in the
// criterion's own target value.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wedgepipe/config.hpp"
#include "wedgepipe/elites.hpp"
#include "wedgepipe/framing.hpp"
#include "wedgepipe/hash.hpp"
#include "wedgepipe/ideology.hpp"
#include "wedgepipe/lexicon.hpp"
#include "wedgepipe/pipeline.hpp"
#include "wedgepipe/series.hpp"
#include "wedgepipe/synth.hpp"
#include "wedgepipe/tagger.hpp"

using namespace wedgepipe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  /// Set when a failure is explained by a known error in the criterion
  /// itself; such a failure is still printed as FAIL but does not fail the run.
  std::string known_discrepancy;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. With no penalty the fit reproduces the empirical distribution.
Outcome sage_closed_form() {
  std::mt19937_64 rng(101);
  NgramCounts baseline, issue;
  for (int i = 0; i < 5000; ++i) {
    const auto term = "w" + std::to_string(i);
    baseline.add(term, 1 + static_cast<std::int64_t>(rng() % 200));
    issue.add(term, 1 + static_cast<std::int64_t>(rng() % 60));
  }
  const auto t0 = Clock::now();
  std::vector<NgramCounts> issues = {issue};
  auto bg = fit_background(baseline, 1.0, issues);
  auto eta = sage_fit(issue, bg, SageOptions{.lambda = 0.0, .tol = 1e-9, .max_iter = 20000});
  const double elapsed = seconds_since(t0);

  std::vector<double> logits(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i) logits[i] = bg.log_probs[i] + eta.eta[i];
  auto p = oracle::softmax(logits);
  double worst = 0.0, worst_rel = 0.0;
  for (std::size_t i = 0; i < bg.size(); ++i) {
    const double target = static_cast<double>(issue.count(bg.vocab[i])) / static_cast<double>(issue.total);
    worst = std::max(worst, std::abs(p[i] - target));
    worst_rel = std::max(worst_rel, std::abs(p[i] - target) / target);
  }
  return {worst < 1e-6 && elapsed < 5.0,
          fmt("max |softmax(m+eta) - c/C| = %.3g (max relative %.3g), %d iterations, %.2f s", worst, worst_rel,
              eta.iterations, elapsed)};
}

// 2. Twenty terms planted at 8x frequency rise to the top.
Outcome sage_planted() {
  auto pc = oracle::planted_corpus(5000, 20, 8.0, 1'000'000, 250'000, 202);
  std::vector<NgramCounts> issues = {pc.issue};
  auto bg = fit_background(pc.baseline, 1.0, issues);
  auto eta = sage_fit(pc.issue, bg, SageOptions{.lambda = 1.0});
  auto top = select_candidates(eta, 25);
  int found = 0;
  for (const auto& [term, value] : top)
    if (std::find(pc.planted.begin(), pc.planted.end(), term) != pc.planted.end()) ++found;
  return {found >= 18, fmt("%d of 20 planted terms in the top 25 (lambda = 1, %zu nonzero)", found, eta.nonzero())};
}

// 3. Analytic smooth gradient against central differences.
Outcome sage_gradient() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 60;
  std::vector<double> c(n), m(n);
  for (auto& v : c) v = static_cast<double>(rng() % 40);
  for (auto& v : m) v = g(rng) - 4.0;
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    std::vector<double> eta(n);
    for (auto& v : eta) v = 2.0 * g(rng);
    auto grad = sage_smooth_gradient(c, m, eta);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto up = eta, down = eta;
      up[i] += h;
      down[i] -= h;
      const double fd = (sage_objective(c, m, up, 0.0) - sage_objective(c, m, down, 0.0)) / (2 * h);
      diff = std::max(diff, std::abs(fd - grad[i]));
      scale = std::max(scale, std::abs(grad[i]));
    }
    worst = std::max(worst, diff / scale);
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 20 points", worst)};
}

// 4. The illustrative tweets get the issue of their highlighted phrase.
Outcome tagger_samples() {
  std::vector<IssueLexicon> lexicons;
  for (const auto& s : sample_issue_tweets()) {
    IssueLexicon l;
    l.issue = s.issue;
    for (const auto& p : s.phrases) l.phrases.insert(*phrase_key(p));
    lexicons.push_back(l);
  }
  auto matcher = IssueMatcher::build(lexicons);
  int correct = 0, total = 0;
  std::string misses;
  for (const auto& s : sample_issue_tweets()) {
    TweetRecord r;
    r.text = s.text;
    const auto labels = tag(r, matcher).labels;
    ++total;
    if (labels == IssueSet{s.issue}) {
      ++correct;
    } else {
      misses += " " + std::string(to_string(s.issue));
    }
  }
  return {correct == total, fmt("%d of %d sample tweets labeled exactly%s", correct, total,
                                misses.empty() ? "" : (" (wrong:" + misses + ")").c_str())};
}

// 5. Automaton equals the naive scan; throughput on 1M documents.
Outcome tagger_oracle_and_speed() {
  std::mt19937_64 rng(505);
  std::vector<std::string> vocab;
  for (int i = 0; i < 5000; ++i) vocab.push_back("tok" + std::to_string(i));
  std::vector<IssueLexicon> lexicons;
  for (auto issue : kAllIssues) {
    IssueLexicon l;
    l.issue = issue;
    for (int i = 0; i < 200; ++i) {
      const int len = 1 + static_cast<int>(rng() % 3);
      std::vector<std::string> parts;
      // Phrases draw from the first 300 tokens so that matches are common.
      for (int k = 0; k < len; ++k) parts.push_back(vocab[rng() % 300]);
      l.phrases.insert(join_ngram(parts));
    }
    lexicons.push_back(l);
  }
  auto matcher = IssueMatcher::build(lexicons);

  int agree = 0;
  for (int d = 0; d < 1000; ++d) {
    TokenSeq doc;
    for (int k = 0; k < 20; ++k) doc.tokens.push_back(vocab[rng() % 400]);
    agree += tag_tokens(doc, matcher).labels == oracle::naive_tag(doc.tokens, lexicons);
  }

  // Documents are generated in place; generation time is included.
  const std::size_t docs = 1'000'000;
  TokenSeq doc;
  doc.tokens.resize(20);
  std::size_t labeled = 0;
  const auto t0 = Clock::now();
  for (std::size_t d = 0; d < docs; ++d) {
    for (auto& t : doc.tokens) t = vocab[rng() % vocab.size()];
    labeled += !tag_tokens(doc, matcher).labels.empty();
  }
  const double elapsed = seconds_since(t0);
  return {agree == 1000 && elapsed <= 60.0,
          fmt("oracle agreement %d/1000; 1M 20-token documents in %.2f s single-threaded (%zu labeled)", agree,
              elapsed, labeled)};
}

// 6. Threshold semantics at the stated cut points.
Outcome ideology_thresholds() {
  const bool ok = binarize(0.4) == UrlLabel::liberal && binarize(0.5) == UrlLabel::unlabeled &&
                  binarize(0.6) == UrlLabel::conservative;
  return {ok, fmt("0.4 -> %s, 0.5 -> %s, 0.6 -> %s", std::string(to_string(binarize(0.4))).c_str(),
                  std::string(to_string(binarize(0.5))).c_str(), std::string(to_string(binarize(0.6))).c_str())};
}

// 7. Logistic regression: descent, gradient, and fit on separable users.
Outcome logistic_regression() {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 1000, d = 16;
  std::vector<double> truth(d);
  for (auto& w : truth) w = g(rng);
  Matrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.3;
    for (std::size_t j = 0; j < d; ++j) z += truth[j] * (x.row(i)[j] = g(rng));
    y[i] = z > 0 ? 1 : 0;
  }

  auto model = train_lr(x, y, LrOptions{.l2 = 0.01, .record_trace = true});
  bool monotone = true;
  for (std::size_t i = 1; i < model.loss_trace.size(); ++i)
    monotone = monotone && model.loss_trace[i] <= model.loss_trace[i - 1] + 1e-12;

  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(d);
    for (auto& v : w) v = g(rng);
    const double b = g(rng);
    auto grad = lr_gradient(w, b, x, y, 0.01);
    for (std::size_t j = 0; j <= d; ++j) {
      const double h = 1e-6;
      auto wu = w, wd = w;
      double bu = b, bd = b;
      if (j < d) {
        wu[j] += h;
        wd[j] -= h;
      } else {
        bu += h;
        bd -= h;
      }
      const double fd = (lr_loss(wu, bu, x, y, 0.01) - lr_loss(wd, bd, x, y, 0.01)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[j]) / std::max(std::abs(grad[j]), 1e-3));
    }
  }

  std::map<std::string, Leaning> want, got;
  for (std::size_t i = 0; i < n; ++i) {
    want["u" + std::to_string(i)] = y[i] ? Leaning::conservative : Leaning::liberal;
    got["u" + std::to_string(i)] = predict(model, x.row(i)).label;
  }
  const double f1 = agreement(want, got).f1;
  return {monotone && worst < 1e-5 && f1 >= 0.95,
          fmt("loss monotone: %s over %d steps; gradient rel. error %.3g; F1 %.4f", monotone ? "yes" : "no",
              model.iterations, worst, f1)};
}

// 8. ACF against the brute-force double loop.
Outcome acf_oracle() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  bool r0 = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(62 + rng() % 400);
    for (auto& v : x) v = g(rng) * 3.0 + 1.0;
    auto a = acf(x, 60);
    auto o = oracle::acf(x, 60);
    r0 = r0 && a.r[0] == 1.0;
    for (int k = 0; k <= 60; ++k) worst = std::max(worst, std::abs(a.r[k] - o[k]));
  }
  const double alt = acf(std::vector<double>{1, -1, 1, -1}, 2).r[1];
  return {worst < 1e-12 && r0 && alt == -0.75,
          fmt("max abs error %.3g over 100 series; r[0] = 1: %s; alternating r[1] = %.17g", worst, r0 ? "yes" : "no",
              alt)};
}

// 9. Persistence separates white noise from a persistent AR(1).
Outcome persistence_simulation() {
  std::vector<double> noise, ar;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    noise.push_back(persistence(acf(oracle::white_noise(365, seed), 60)).lag);
    ar.push_back(persistence(acf(oracle::ar1(365, 0.9, 10'000 + seed), 60)).lag);
  }
  // Both halves are judged on the median over the same 100 seeds.
  const double noise_median = median(noise);
  const double ar_median = median(ar);
  const auto ar_at_least_10 = std::count_if(ar.begin(), ar.end(), [](double lag) { return lag >= 10.0; });
  return {noise_median <= 2.0 && ar_median >= 10.0,
          fmt("white noise median %.1f days (max %.0f); AR(1) phi=0.9 median %.1f days (min %.0f, %td/100 seeds >= 10)",
              noise_median, *std::max_element(noise.begin(), noise.end()), ar_median,
              *std::min_element(ar.begin(), ar.end()), ar_at_least_10),
          {}};
}

// 10. Delta and rho fixtures; antisymmetry under group exchange.
Outcome delta_and_rho() {
  const double delta = *delta_share({30, 200}, {5, 100});
  const bool fixture = delta == 30.0 / 200.0 - 5.0 / 100.0 && std::abs(delta - 0.10) < 1e-15 &&
                       *delta_share({10, 100}, {5, 50}) == 0.0 && *moral_share(8, 40) == 0.2;

  // The same numbers through the record-level path.
  std::vector<DocRecord> rs;
  auto add = [&](Leaning g, int on_issue, int total) {
    for (int i = 0; i < total; ++i) {
      DocRecord r;
      r.day = Day{std::chrono::year{2020} / 12 / 1};
      r.group = g;
      r.issues = i < on_issue ? IssueSet{Issue::masking} : IssueSet{};
      r.moral = i < 8 ? 1 : 0;
      rs.push_back(r);
    }
  };
  add(Leaning::liberal, 30, 200);
  add(Leaning::conservative, 5, 100);
  const bool via_records = *delta_series(rs, Issue::masking).values[0] == delta;

  std::mt19937_64 rng(1010);
  bool antisymmetric = true;
  for (int i = 0; i < 10'000; ++i) {
    ShareCounts a{static_cast<std::int64_t>(rng() % 1000), 1000 + static_cast<std::int64_t>(rng() % 5000)};
    ShareCounts b{static_cast<std::int64_t>(rng() % 1000), 1000 + static_cast<std::int64_t>(rng() % 5000)};
    antisymmetric = antisymmetric && *delta_share(a, b) == -*delta_share(b, a);
  }
  for (auto& r : rs) r.group = *r.group == Leaning::liberal ? Leaning::conservative : Leaning::liberal;
  antisymmetric = antisymmetric && *delta_series(rs, Issue::masking).values[0] == -delta;

  return {fixture && via_records && antisymmetric,
          fmt("delta = %.17g (|delta - 0.10| = %.2g); records path equal: %s; antisymmetry exact: %s", delta,
              std::abs(delta - 0.10), via_records ? "yes" : "no", antisymmetric ? "yes" : "no")};
}

// 11. Log-odds fixture and antisymmetry.
Outcome log_odds_fixture() {
  PhraseCounts a = {{"p", 10}, {"other", 90}};
  PhraseCounts b = {{"p", 1}, {"other", 49}};
  const double v = log_odds(a, b, 0.5).at("p");

  std::mt19937_64 rng(1111);
  bool antisymmetric = true;
  for (int trial = 0; trial < 200; ++trial) {
    PhraseCounts x, y;
    for (int k = 0; k < 30; ++k) {
      const auto key = "p" + std::to_string(k);
      if (rng() % 4) x[key] = static_cast<std::int64_t>(rng() % 50);
      if (rng() % 4) y[key] = static_cast<std::int64_t>(rng() % 50);
    }
    if (x.empty() && y.empty()) continue;
    auto xy = log_odds(x, y, 0.5);
    auto yx = log_odds(y, x, 0.5);
    for (const auto& [k, s] : xy) antisymmetric = antisymmetric && yx.at(k) == -s;
  }
  // Independent evaluation of the same formula for the fixture.
  const double direct = std::log(10.5 / 90.5) - std::log(1.5 / 49.5);
  Outcome out{std::abs(v - 1.3423) <= 1e-4 && antisymmetric,
              fmt("log-odds = %.7f (formula evaluated directly: %.7f, target 1.3423 +/- 1e-4, off by %.2g); "
                  "antisymmetry exact: %s",
                  v, direct, std::abs(v - 1.3423), antisymmetric ? "yes" : "no"),
              {}};
  // The stated target comes from rounding the two odds to four decimals
  // (log(0.1160) - log(0.0303) = 1.34234); the exact value is 1.342533.
  if (!out.pass && antisymmetric && std::abs(v - direct) < 1e-12)
    out.known_discrepancy = "target value differs from the exact formula value; see the decisions ledger";
  return out;
}

// 12. Mann-Whitney: enumeration oracle, U identity, separated fixture.
Outcome mann_whitney() {
  std::mt19937_64 rng(1212);
  int pairs = 0, agree = 0;
  for (std::size_t n1 = 1; n1 <= 11; ++n1) {
    for (std::size_t n2 = 1; n1 + n2 <= 12; ++n2) {
      ++pairs;
      bool ok = true;
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(n1), y(n2);
        const auto levels = 2 + rng() % 8;
        for (auto& v : x) v = static_cast<double>(rng() % levels);
        for (auto& v : y) v = static_cast<double>(rng() % levels);
        auto r = mann_whitney_u(x, y);
        ok = ok && r.exact && std::abs(r.p - oracle::mwu_exact_p(x, y)) < 1e-12 && r.u == oracle::mwu_pairs(x, y);
      }
      agree += ok;
    }
  }

  int identity = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(1 + rng() % 40), y(1 + rng() % 40);
    for (auto& v : x) v = static_cast<double>(rng() % 12);
    for (auto& v : y) v = static_cast<double>(rng() % 12);
    identity += mann_whitney_u(x, y).u + mann_whitney_u(y, x).u == static_cast<double>(x.size() * y.size());
  }
  auto sep = mann_whitney_u(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  const bool fixture = sep.u == 0.0 && sep.exact && std::abs(sep.p - 0.1) < 1e-12;
  return {agree == pairs && identity == 1000 && fixture,
          fmt("exact oracle agreement on %d/%d size pairs; U identity %d/1000; separated 3 vs 3: U = %g, p = %.12g",
              agree, pairs, identity, sep.u, sep.p)};
}

// 13. The full pipeline on the bundled fixture reruns byte-identically.
Outcome end_to_end() {
  oracle::TempDir dir("acceptance");
  const auto t0 = Clock::now();
  write_fixture(dir.path());
  const auto cfg = dir.path() / "config.toml";
  auto first = load_config(cfg, {{"paths.output_dir", "\"run1\""}});
  auto second = load_config(cfg, {{"paths.output_dir", "\"run2\""}});
  auto r1 = run_pipeline(first);
  auto r2 = run_pipeline(second);
  const double elapsed = seconds_since(t0);
  if (!r1.ok || !r2.ok) return {false, "pipeline failed: " + r1.error + r2.error};

  const auto h1 = sha256_file(first.paths.output_dir / "manifest.json");
  const auto h2 = sha256_file(second.paths.output_dir / "manifest.json");
  bool reports = true;
  for (const char* name : {"series.csv", "acf.csv", "persistence.csv", "framing.csv", "elites.csv"})
    reports = reports && fs::exists(first.paths.output_dir / name);
  return {h1 == h2 && reports && elapsed < 120.0,
          fmt("manifest sha256 %s in both runs (%s); %zu outputs; reports present: %s; %.1f s for fixture + 2 runs",
              h1.substr(0, 16).c_str(), h1 == h2 ? "equal" : "DIFFERENT", r1.outputs.size(), reports ? "yes" : "no",
              elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"SAGE closed-form oracle", sage_closed_form},
      {"SAGE planted-keyword recovery", sage_planted},
      {"SAGE gradient check", sage_gradient},
      {"Tagger sample tweets", tagger_samples},
      {"Tagger oracle equivalence and throughput", tagger_oracle_and_speed},
      {"Ideology thresholds", ideology_thresholds},
      {"Logistic regression", logistic_regression},
      {"ACF oracle", acf_oracle},
      {"Persistence simulation", persistence_simulation},
      {"Delta and rho fixtures", delta_and_rho},
      {"Log-odds fixture", log_odds_fixture},
      {"Mann-Whitney U", mann_whitney},
      {"End-to-end determinism", end_to_end},
  };
  int failed = 0, unexplained = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    failed += !o.pass;
    unexplained += !o.pass && o.known_discrepancy.empty();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail;
    if (!o.pass && !o.known_discrepancy.empty()) std::cout << " [known discrepancy: " << o.known_discrepancy << "]";
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed";
  if (failed > unexplained) std::cout << ", " << (failed - unexplained) << " failing with a known discrepancy";
  std::cout << std::endl;
  return unexplained == 0 ? 0 : 1;
}
