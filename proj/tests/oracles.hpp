#pragma once

// Reference implementations used to check the library. Each one follows the
// textbook definition as directly as possible and makes no attempt to be fast.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/issue.hpp"
#include "wedgepipe/lexicon.hpp"

namespace oracle {

// Brute-force double loop for the biased sample autocorrelation.
inline std::vector<double> acf(std::span<const double> x, int max_lag) {
  const auto n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (std::size_t t = 0; t < n; ++t) denom += (x[t] - mean) * (x[t] - mean);
  std::vector<double> r;
  for (int k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) num += (x[t] - mean) * (x[t + k] - mean);
    r.push_back(num / denom);
  }
  return r;
}

// Issues whose phrases occur as a contiguous token run, found by trying every
// phrase at every position.
inline wedgepipe::IssueSet naive_tag(const std::vector<std::string>& tokens,
                                     const std::vector<wedgepipe::IssueLexicon>& lexicons) {
  wedgepipe::IssueSet out;
  for (const auto& lex : lexicons) {
    for (const auto& key : lex.phrases) {
      const auto parts = wedgepipe::split_ngram(key);
      if (parts.size() > tokens.size()) continue;
      for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
        if (std::equal(parts.begin(), parts.end(), tokens.begin() + static_cast<long>(i))) {
          out.insert(lex.issue);
          break;
        }
      }
    }
  }
  return out;
}

// U of x by pair counting: wins plus half of the ties.
inline double mwu_pairs(std::span<const double> x, std::span<const double> y) {
  double u = 0.0;
  for (double a : x)
    for (double b : y) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return u;
}

// Exact two-sided p: every way of choosing which pooled values form the first
// sample is equally likely under the null. Enumerated by recursion.
inline double mwu_exact_p(std::span<const double> x, std::span<const double> y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t n1 = x.size();
  const std::size_t n = pooled.size();
  const double mu = static_cast<double>(n1 * y.size()) / 2.0;
  const double observed = std::abs(mwu_pairs(x, y) - mu);

  std::vector<bool> chosen(n, false);
  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  auto visit = [&](auto&& self, std::size_t start, std::size_t left) -> void {
    if (left == 0) {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < n; ++i) (chosen[i] ? a : b).push_back(pooled[i]);
      ++total;
      if (std::abs(mwu_pairs(a, b) - mu) >= observed - 1e-9) ++extreme;
      return;
    }
    for (std::size_t i = start; i + left <= n; ++i) {
      chosen[i] = true;
      self(self, i + 1, left - 1);
      chosen[i] = false;
    }
  };
  visit(visit, 0, n1);
  return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double log_odds(double a, double a_total, double b, double b_total, double alpha) {
  return std::log((a + alpha) / (a_total - a + alpha)) - std::log((b + alpha) / (b_total - b + alpha));
}

inline std::vector<double> softmax(std::span<const double> v) {
  double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double z = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) z += (out[i] = std::exp(v[i] - hi));
  for (auto& o : out) o /= z;
  return out;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed, std::size_t burn_in = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out;
  double x = 0.0;
  for (std::size_t t = 0; t < n + burn_in; ++t) {
    x = phi * x + dist(rng);
    if (t >= burn_in) out.push_back(x);
  }
  return out;
}

// Synthetic issue-vs-baseline corpus: `vocab` terms with smoothly decaying
// background frequencies; `planted` mid-frequency terms are boosted by
// `boost` in the issue corpus.
struct PlantedCorpus {
  wedgepipe::NgramCounts baseline;
  wedgepipe::NgramCounts issue;
  std::vector<std::string> planted;
};

inline PlantedCorpus planted_corpus(std::size_t vocab, std::size_t planted, double boost, std::int64_t baseline_tokens,
                                    std::int64_t issue_tokens, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> p(vocab);
  for (std::size_t i = 0; i < vocab; ++i) p[i] = 1.0 / std::pow(static_cast<double>(i) + 50.0, 0.9);
  auto term = [](std::size_t i) { return "t" + std::to_string(i); };

  PlantedCorpus out;
  std::vector<std::size_t> ids(vocab);
  for (std::size_t i = 0; i < vocab; ++i) ids[i] = i;
  // Planted terms are drawn from the middle of the frequency range, where
  // an 8x boost is visible but the baseline count is not negligible.
  std::vector<std::size_t> pool(ids.begin() + static_cast<long>(vocab / 20), ids.begin() + static_cast<long>(vocab / 2));
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<double> q = p;
  for (std::size_t j = 0; j < planted; ++j) {
    q[pool[j]] *= boost;
    out.planted.push_back(term(pool[j]));
  }

  auto draw = [&](const std::vector<double>& w, std::int64_t n, wedgepipe::NgramCounts& into) {
    std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
    for (std::int64_t k = 0; k < n; ++k) into.add(term(dist(rng)));
  };
  draw(p, baseline_tokens, out.baseline);
  draw(q, issue_tokens, out.issue);
  return out;
}

// A scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("wedgepipe-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
