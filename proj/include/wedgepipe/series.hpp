#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/dates.hpp"
#include "wedgepipe/ideology.hpp"
#include "wedgepipe/issue.hpp"
#include "wedgepipe/moral.hpp"

namespace wedgepipe {

/// The per-document facts every aggregate is built from.
struct DocRecord {
  Day day{};
  TweetKind kind = TweetKind::original;
  IssueSet issues;
  std::optional<Leaning> group;
  std::uint16_t moral = 0;  ///< MoralVector::label_mask()
  bool elite = false;
};

/// A moral category or a collapsed foundation, as a mask over the ten labels.
struct MoralSelector {
  std::string name;
  std::uint16_t mask = 0;

  static MoralSelector of(MoralCategory c);
  static MoralSelector of(Foundation f);
  bool matches(std::uint16_t labels) const { return (labels & mask) != 0; }
};

struct SeriesMeta {
  std::string issue;
  std::string group;
  std::string kind;
  std::string moral;

  friend bool operator==(const SeriesMeta&, const SeriesMeta&) = default;
};

/// One value per calendar day (UTC) from `start`; nullopt marks a gap.
struct DailySeries {
  Day start{};
  std::vector<std::optional<double>> values;
  SeriesMeta meta;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  Day day_at(std::size_t i) const { return start + std::chrono::days{static_cast<long>(i)}; }
  std::size_t present_count() const;
  bool has_gaps() const { return present_count() != size(); }
  /// Present values in order (gaps skipped).
  std::vector<double> present_values() const;
};

/// Inclusive calendar-day span.
struct DayRange {
  Day first{};
  Day last{};
  std::size_t length() const { return static_cast<std::size_t>((last - first).count()) + 1; }
};

std::optional<DayRange> day_range(std::span<const DocRecord> records);

/// Per day: share of kind-`kind` (and `group`, when given) records labeled
/// with `issue`. Days without any such record are gaps. The series spans
/// `range`, or the days of all records when no range is given.
DailySeries daily_share(std::span<const DocRecord> records, Issue issue, TweetKind kind,
                        std::optional<Leaning> group = std::nullopt, std::optional<DayRange> range = std::nullopt);

/// Trailing mean over the present values of the last `window` days; a day
/// whose window holds only gaps stays a gap. Throws ArgumentError if
/// window < 1.
DailySeries rolling_mean(const DailySeries& s, int window);

struct ShareCounts {
  std::int64_t issue = 0;  ///< originals on the issue
  std::int64_t total = 0;  ///< all originals
};

/// liberal.issue / liberal.total - conservative.issue / conservative.total;
/// nullopt if either total is zero.
std::optional<double> delta_share(ShareCounts liberal, ShareCounts conservative);

/// Daily delta over original tweets.
DailySeries delta_series(std::span<const DocRecord> records, Issue issue,
                         std::optional<DayRange> range = std::nullopt);

/// moral_count / issue_count, or nullopt when issue_count is zero.
std::optional<double> moral_share(std::int64_t moral_count, std::int64_t issue_count);

/// Share of original issue tweets (optionally of one group) matching
/// `moral`, over the whole record span.
std::optional<double> moral_share(std::span<const DocRecord> records, const MoralSelector& moral, Issue issue,
                                  std::optional<Leaning> group = std::nullopt);

/// Daily version of the share above.
DailySeries moral_share_series(std::span<const DocRecord> records, const MoralSelector& moral, Issue issue,
                               std::optional<Leaning> group = std::nullopt,
                               std::optional<DayRange> range = std::nullopt);

/// Linear interpolation across interior gaps; leading and trailing gaps are
/// dropped (and `start` moved accordingly).
DailySeries fill_gaps(const DailySeries& s);

enum class ConfidenceBand : std::uint8_t { white_noise, bartlett };

struct AcfResult {
  std::vector<double> r;     ///< lags 0..max_lag
  std::size_t n = 0;         ///< series length
  double conf = 0.0;         ///< 1.96 / sqrt(n)
  std::vector<double> band;  ///< upper confidence bound per lag
};

/// Biased sample autocorrelation
///   r[k] = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)^2.
/// Requires at least max_lag + 2 values (ArgumentError) and non-zero
/// variance (DegenerateSeriesError).
AcfResult acf(std::span<const double> x, int max_lag, ConfidenceBand band = ConfidenceBand::white_noise);

/// As above for a series without gaps (ArgumentError otherwise).
AcfResult acf(const DailySeries& s, int max_lag, ConfidenceBand band = ConfidenceBand::white_noise);

struct Persistence {
  int lag = 0;
  bool censored = false;
};

/// Smallest lag k >= 1 with r[k] strictly below its confidence bound; when
/// there is none, max_lag + 1 flagged as censored.
Persistence persistence(const AcfResult& a);

/// Days before `date` and days from `date` on. Throws ArgumentError unless
/// the date lies within the series.
std::pair<DailySeries, DailySeries> split_period(const DailySeries& s, Day date);

}  // namespace wedgepipe
