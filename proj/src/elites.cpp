#include "wedgepipe/elites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>

#include "wedgepipe/errors.hpp"
#include "wedgepipe/parallel.hpp"

namespace wedgepipe {

EliteRoster EliteRoster::parse(std::istream& in) {
  EliteRoster roster;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string id = line.substr(b, e - b + 1);
    if (!roster.ids_.insert(id).second) roster.duplicates_.push_back(std::move(id));
  }
  if (roster.ids_.empty()) throw ParseError("elite roster is empty");
  return roster;
}

EliteRoster EliteRoster::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read elite roster " + path.string());
  return parse(in);
}

MatchedSample matched_sample(const DayIndex& candidates_by_day, const DayCounts& counts, std::uint64_t seed) {
  MatchedSample out;
  std::mt19937_64 rng(seed);
  for (const auto& [day, wanted] : counts) {
    if (wanted <= 0) continue;
    auto it = candidates_by_day.find(day);
    const auto want = static_cast<std::size_t>(wanted);
    if (it == candidates_by_day.end() || it->second.size() <= want) {
      if (it != candidates_by_day.end()) out.indices.insert(out.indices.end(), it->second.begin(), it->second.end());
      if (it == candidates_by_day.end() || it->second.size() < want) out.shortfall_days.push_back(day);
      continue;
    }
    std::sample(it->second.begin(), it->second.end(), std::back_inserter(out.indices), want, rng);
  }
  return out;
}

DailyShares sample_shares(std::span<const DocRecord> records, std::span<const std::size_t> sample, Issue issue,
                          const MoralSelector& moral) {
  std::map<Day, std::pair<std::int64_t, std::int64_t>> counts;
  for (std::size_t i : sample) {
    const auto& rec = records[i];
    if (rec.kind != TweetKind::original || !rec.issues.contains(issue)) continue;
    auto& [num, den] = counts[rec.day];
    ++den;
    if (moral.matches(rec.moral)) ++num;
  }
  DailyShares out;
  for (const auto& [day, c] : counts) out.emplace(day, *moral_share(c.first, c.second));
  return out;
}

std::vector<DailyShares> bootstrap_shares(std::span<const DocRecord> records, const DayIndex& candidates_by_day,
                                          const DayCounts& counts, Issue issue, const MoralSelector& moral, int B,
                                          std::uint64_t seed, int threads) {
  if (B < 1) throw ArgumentError("bootstrap replicate count must be >= 1");
  std::vector<DailyShares> out(static_cast<std::size_t>(B));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    auto sample = matched_sample(candidates_by_day, counts, seed + r);
    out[r] = sample_shares(records, sample.indices, issue, moral);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U

namespace {

struct Ranked {
  std::vector<double> ranks;  ///< midranks of the pooled sample, x first
  double tie_term = 0.0;      ///< sum over tie groups of t^3 - t
};

Ranked midranks(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() + y.size();
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

  Ranked out;
  out.ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = rank;
    double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  return out;
}

double u_of_first(const std::vector<double>& ranks, std::size_t n1) {
  double r = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r += ranks[i];
  return r - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
}

void check_samples(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ArgumentError("both samples must be non-empty");
  for (double v : x) {
    if (std::isnan(v)) throw ArgumentError("sample contains NaN");
  }
  for (double v : y) {
    if (std::isnan(v)) throw ArgumentError("sample contains NaN");
  }
}

bool all_identical(std::span<const double> x, std::span<const double> y) {
  double v = x.front();
  return std::all_of(x.begin(), x.end(), [v](double a) { return a == v; }) &&
         std::all_of(y.begin(), y.end(), [v](double a) { return a == v; });
}

}  // namespace

double mann_whitney_exact_p(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y);
  if (all_identical(x, y)) return 1.0;
  const std::size_t n1 = x.size(), n = x.size() + y.size();
  if (n > 24) throw ArgumentError("exact enumeration is limited to 24 pooled values");
  Ranked ranked = midranks(x, y);
  const double mu = static_cast<double>(n1) * static_cast<double>(n - n1) / 2.0;
  const double observed = std::abs(u_of_first(ranked.ranks, n1) - mu);
  const double base = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  // Walk every n1-subset of positions as a bitmask with n1 bits set.
  std::uint64_t hits = 0, total = 0;
  std::uint32_t mask = (1u << n1) - 1;
  const std::uint32_t limit = 1u << n;
  while (mask < limit) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) r += ranked.ranks[i];
    }
    if (std::abs(r - base - mu) >= observed - 1e-9) ++hits;
    ++total;
    if (n1 == 0) break;
    // Next integer with the same popcount.
    std::uint32_t c = mask & (~mask + 1);
    std::uint32_t next = mask + c;
    mask = (((next ^ mask) >> 2) / c) | next;
  }
  return std::min(1.0, static_cast<double>(hits) / static_cast<double>(total));
}

double mann_whitney_normal_p(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y);
  if (all_identical(x, y)) return 1.0;
  const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  Ranked ranked = midranks(x, y);
  const double u = u_of_first(ranked.ranks, x.size());
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitney mann_whitney_u(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y);
  MannWhitney out;
  out.u = u_of_first(midranks(x, y).ranks, x.size());
  out.exact = x.size() + y.size() <= kExactMannWhitneyLimit;
  out.p = out.exact ? mann_whitney_exact_p(x, y) : mann_whitney_normal_p(x, y);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<MoralCategory> elite_categories(bool all) {
  std::vector<MoralCategory> out;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    auto c = static_cast<MoralCategory>(k);
    auto f = foundation_of(c);
    if (!all && (f == Foundation::loyalty_betrayal || f == Foundation::purity_degradation)) continue;
    out.push_back(c);
  }
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> values_of(const DailyShares& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& [_, v] : s) out.push_back(v);
  return out;
}

}  // namespace

std::vector<ComparisonResult> compare_elites(std::span<const DocRecord> records, const EliteOptions& options) {
  if (options.bootstrap < 1) throw ArgumentError("bootstrap replicate count must be >= 1");
  const auto categories = elite_categories(options.all_categories);
  std::vector<ComparisonResult> out;

  for (Issue issue : kAllIssues) {
    for (Leaning ideology : {Leaning::liberal, Leaning::conservative}) {
      std::vector<std::size_t> elite;
      DayIndex nonelite_by_day;
      DayCounts elite_counts;
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.kind != TweetKind::original || rec.group != ideology || !rec.issues.contains(issue)) continue;
        if (rec.elite) {
          elite.push_back(i);
          ++elite_counts[rec.day];
        } else {
          nonelite_by_day[rec.day].push_back(i);
        }
      }
      if (elite.empty() || nonelite_by_day.empty()) continue;

      // Sampling does not depend on the category, so draw the replicates once.
      std::vector<MatchedSample> samples(static_cast<std::size_t>(options.bootstrap));
      parallel_for(samples.size(), options.threads, [&](std::size_t r) {
        samples[r] = matched_sample(nonelite_by_day, elite_counts, options.seed + r);
      });

      for (MoralCategory cat : categories) {
        const auto moral = MoralSelector::of(cat);
        ComparisonResult res;
        res.issue = issue;
        res.moral = cat;
        res.ideology = ideology;
        res.elite_shares = values_of(sample_shares(records, elite, issue, moral));
        std::vector<double> pooled;
        for (const auto& s : samples) {
          res.replicate_shares.push_back(values_of(sample_shares(records, s.indices, issue, moral)));
          pooled.insert(pooled.end(), res.replicate_shares.back().begin(), res.replicate_shares.back().end());
        }
        res.shortfall_days = samples.front().shortfall_days.size();
        if (res.elite_shares.empty() || pooled.empty()) continue;
        res.elite_mean = mean_of(res.elite_shares);
        res.nonelite_mean = mean_of(pooled);
        res.test = mann_whitney_u(res.elite_shares, pooled);
        res.significant = res.test.p < options.significance;
        out.push_back(std::move(res));
      }
    }
  }
  return out;
}

}  // namespace wedgepipe
