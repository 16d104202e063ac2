#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wedgepipe/series.hpp"

namespace wedgepipe {

class EliteRoster {
 public:
  /// One user id per line; blank lines and '#' comments are skipped.
  /// Throws ParseError for an empty roster. Repeated ids are reported in
  /// `duplicates` and kept once.
  static EliteRoster parse(std::istream& in);
  static EliteRoster load(const std::filesystem::path& path);

  bool contains(std::string_view user_id) const { return ids_.count(std::string(user_id)) > 0; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& duplicates() const noexcept { return duplicates_; }

 private:
  std::set<std::string> ids_;
  std::vector<std::string> duplicates_;
};

/// Record indices grouped by day.
using DayIndex = std::map<Day, std::vector<std::size_t>>;
using DayCounts = std::map<Day, std::int64_t>;

struct MatchedSample {
  std::vector<std::size_t> indices;
  std::vector<Day> shortfall_days;  ///< days with fewer candidates than requested
};

/// For every day with a positive count, draws that many candidates uniformly
/// without replacement (all of them when there are too few).
MatchedSample matched_sample(const DayIndex& candidates_by_day, const DayCounts& counts, std::uint64_t seed);

using DailyShares = std::map<Day, double>;

/// Per-day share of issue-`issue` original records in `sample` that match
/// `moral`; days without such records are absent.
DailyShares sample_shares(std::span<const DocRecord> records, std::span<const std::size_t> sample, Issue issue,
                          const MoralSelector& moral);

/// B matched samples, replicate r seeded with seed + r, each reduced to daily
/// moral shares. Throws ArgumentError if B < 1.
std::vector<DailyShares> bootstrap_shares(std::span<const DocRecord> records, const DayIndex& candidates_by_day,
                                          const DayCounts& counts, Issue issue, const MoralSelector& moral, int B,
                                          std::uint64_t seed, int threads = 1);

struct MannWhitney {
  double u = 0.0;  ///< U statistic of the first sample
  double p = 1.0;  ///< two-sided
  bool exact = false;
};

/// Rank-sum test with midranks. Exact enumeration when the pooled size is at
/// most 12, otherwise the normal approximation with tie and continuity
/// correction. Identical pooled values give p = 1. Throws ArgumentError for
/// an empty sample.
MannWhitney mann_whitney_u(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kExactMannWhitneyLimit = 12;

/// The two p-value routes, exposed for checking one against the other.
double mann_whitney_exact_p(std::span<const double> x, std::span<const double> y);
double mann_whitney_normal_p(std::span<const double> x, std::span<const double> y);

struct EliteOptions {
  int bootstrap = 100;
  std::uint64_t seed = 0;
  double significance = 0.001;
  bool all_categories = false;  ///< include loyalty/betrayal and purity/degradation
  int threads = 1;
};

/// Categories reported by default: care, harm, fairness, cheating, authority,
/// subversion; all ten when `all` is set.
std::vector<MoralCategory> elite_categories(bool all);

struct ComparisonResult {
  Issue issue = Issue::origins;
  MoralCategory moral = MoralCategory::care;
  Leaning ideology = Leaning::liberal;
  std::vector<double> elite_shares;                 ///< one per day
  std::vector<std::vector<double>> replicate_shares;  ///< per replicate, one per day
  double elite_mean = 0.0;
  double nonelite_mean = 0.0;
  MannWhitney test;
  bool significant = false;
  std::size_t shortfall_days = 0;
};

/// Elite vs matched non-elite daily moral shares, per issue, category and
/// ideology group, over original tweets. Combinations where either side has
/// no day with issue tweets are omitted.
std::vector<ComparisonResult> compare_elites(std::span<const DocRecord> records, const EliteOptions& options);

}  // namespace wedgepipe
