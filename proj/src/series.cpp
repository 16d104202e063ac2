#include "wedgepipe/series.hpp"

#include <algorithm>
#include <cmath>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

MoralSelector MoralSelector::of(MoralCategory c) {
  return {std::string(to_string(c)), static_cast<std::uint16_t>(1u << static_cast<unsigned>(c))};
}

MoralSelector MoralSelector::of(Foundation f) {
  auto base = 2u * static_cast<unsigned>(f);
  return {std::string(to_string(f)), static_cast<std::uint16_t>((1u << base) | (1u << (base + 1)))};
}

std::size_t DailySeries::present_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

std::vector<double> DailySeries::present_values() const {
  std::vector<double> out;
  for (const auto& v : values) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::optional<DayRange> day_range(std::span<const DocRecord> records) {
  if (records.empty()) return std::nullopt;
  DayRange r{records.front().day, records.front().day};
  for (const auto& rec : records) {
    r.first = std::min(r.first, rec.day);
    r.last = std::max(r.last, rec.day);
  }
  return r;
}

namespace {

/// Per-day numerator/denominator accumulation over a fixed day range.
struct DayCounters {
  DayRange range;
  std::vector<std::int64_t> num, den;

  explicit DayCounters(DayRange r) : range(r), num(r.length(), 0), den(r.length(), 0) {}

  std::optional<std::size_t> slot(Day d) const {
    if (d < range.first || d > range.last) return std::nullopt;
    return static_cast<std::size_t>((d - range.first).count());
  }

  DailySeries ratio(SeriesMeta meta) const {
    DailySeries s;
    s.start = range.first;
    s.meta = std::move(meta);
    s.values.resize(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) {
      if (den[i] > 0) s.values[i] = static_cast<double>(num[i]) / static_cast<double>(den[i]);
    }
    return s;
  }
};

std::string group_name(std::optional<Leaning> g) { return g ? std::string(to_string(*g)) : "all"; }

}  // namespace

DailySeries daily_share(std::span<const DocRecord> records, Issue issue, TweetKind kind, std::optional<Leaning> group,
                        std::optional<DayRange> range) {
  SeriesMeta meta{std::string(to_string(issue)), group_name(group), std::string(to_string(kind)), ""};
  if (!range) range = day_range(records);
  if (!range) return DailySeries{{}, {}, meta};
  DayCounters c(*range);
  for (const auto& rec : records) {
    if (rec.kind != kind || (group && rec.group != group)) continue;
    auto i = c.slot(rec.day);
    if (!i) continue;
    ++c.den[*i];
    if (rec.issues.contains(issue)) ++c.num[*i];
  }
  return c.ratio(std::move(meta));
}

DailySeries rolling_mean(const DailySeries& s, int window) {
  if (window < 1) throw ArgumentError("window must be >= 1");
  DailySeries out;
  out.start = s.start;
  out.meta = s.meta;
  out.values.resize(s.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t j = i + 1 - std::min(i + 1, w); j <= i; ++j) {
      if (s.values[j]) {
        sum += *s.values[j];
        ++present;
      }
    }
    if (present > 0) out.values[i] = sum / static_cast<double>(present);
  }
  return out;
}

std::optional<double> delta_share(ShareCounts liberal, ShareCounts conservative) {
  if (liberal.total <= 0 || conservative.total <= 0) return std::nullopt;
  return static_cast<double>(liberal.issue) / static_cast<double>(liberal.total) -
         static_cast<double>(conservative.issue) / static_cast<double>(conservative.total);
}

DailySeries delta_series(std::span<const DocRecord> records, Issue issue, std::optional<DayRange> range) {
  SeriesMeta meta{std::string(to_string(issue)), "delta", std::string(to_string(TweetKind::original)), ""};
  if (!range) range = day_range(records);
  if (!range) return DailySeries{{}, {}, meta};
  DayCounters lib(*range), con(*range);
  for (const auto& rec : records) {
    if (rec.kind != TweetKind::original || !rec.group) continue;
    auto& c = *rec.group == Leaning::liberal ? lib : con;
    auto i = c.slot(rec.day);
    if (!i) continue;
    ++c.den[*i];
    if (rec.issues.contains(issue)) ++c.num[*i];
  }
  DailySeries s;
  s.start = range->first;
  s.meta = std::move(meta);
  s.values.resize(range->length());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    s.values[i] = delta_share({lib.num[i], lib.den[i]}, {con.num[i], con.den[i]});
  }
  return s;
}

std::optional<double> moral_share(std::int64_t moral_count, std::int64_t issue_count) {
  if (issue_count <= 0) return std::nullopt;
  return static_cast<double>(moral_count) / static_cast<double>(issue_count);
}

std::optional<double> moral_share(std::span<const DocRecord> records, const MoralSelector& moral, Issue issue,
                                  std::optional<Leaning> group) {
  std::int64_t num = 0, den = 0;
  for (const auto& rec : records) {
    if (rec.kind != TweetKind::original || !rec.issues.contains(issue) || (group && rec.group != group)) continue;
    ++den;
    if (moral.matches(rec.moral)) ++num;
  }
  return moral_share(num, den);
}

DailySeries moral_share_series(std::span<const DocRecord> records, const MoralSelector& moral, Issue issue,
                               std::optional<Leaning> group, std::optional<DayRange> range) {
  SeriesMeta meta{std::string(to_string(issue)), group_name(group), std::string(to_string(TweetKind::original)),
                  moral.name};
  if (!range) range = day_range(records);
  if (!range) return DailySeries{{}, {}, meta};
  DayCounters c(*range);
  for (const auto& rec : records) {
    if (rec.kind != TweetKind::original || !rec.issues.contains(issue) || (group && rec.group != group)) continue;
    auto i = c.slot(rec.day);
    if (!i) continue;
    ++c.den[*i];
    if (moral.matches(rec.moral)) ++c.num[*i];
  }
  return c.ratio(std::move(meta));
}

DailySeries fill_gaps(const DailySeries& s) {
  DailySeries out;
  out.meta = s.meta;
  out.start = s.start;
  std::size_t first = 0;
  while (first < s.size() && !s.values[first]) ++first;
  if (first == s.size()) return out;
  std::size_t last = s.size() - 1;
  while (!s.values[last]) --last;

  out.start = s.day_at(first);
  out.values.reserve(last - first + 1);
  std::size_t prev = first;
  for (std::size_t i = first; i <= last; ++i) {
    if (s.values[i]) {
      out.values.push_back(s.values[i]);
      prev = i;
      continue;
    }
    std::size_t next = i + 1;
    while (!s.values[next]) ++next;
    double a = *s.values[prev], b = *s.values[next];
    double t = static_cast<double>(i - prev) / static_cast<double>(next - prev);
    out.values.emplace_back(a + t * (b - a));
  }
  return out;
}

AcfResult acf(std::span<const double> x, int max_lag, ConfidenceBand band) {
  if (max_lag < 0) throw ArgumentError("max_lag must be >= 0");
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(max_lag) + 2) {
    throw ArgumentError("series of length " + std::to_string(n) + " is too short for max_lag " +
                        std::to_string(max_lag));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ArgumentError("series contains non-finite values");
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  double denom = 0.0, scale = 0.0;
  for (double v : x) {
    denom += (v - mean) * (v - mean);
    scale += v * v;
  }
  if (*lo == *hi || denom <= 1e-24 * scale) throw DegenerateSeriesError("series has zero variance");

  AcfResult res;
  res.n = n;
  res.conf = 1.96 / std::sqrt(static_cast<double>(n));
  res.r.resize(static_cast<std::size_t>(max_lag) + 1);
  res.r[0] = 1.0;
  for (std::size_t k = 1; k < res.r.size(); ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += (x[t] - mean) * (x[t + k] - mean);
    res.r[k] = num / denom;
  }

  res.band.assign(res.r.size(), res.conf);
  if (band == ConfidenceBand::bartlett) {
    double acc = 1.0;
    for (std::size_t k = 1; k < res.r.size(); ++k) {
      res.band[k] = 1.96 * std::sqrt(acc / static_cast<double>(n));
      acc += 2.0 * res.r[k] * res.r[k];
    }
  }
  return res;
}

AcfResult acf(const DailySeries& s, int max_lag, ConfidenceBand band) {
  if (s.has_gaps()) throw ArgumentError("series has gaps; fill them before computing the ACF");
  return acf(s.present_values(), max_lag, band);
}

Persistence persistence(const AcfResult& a) {
  const int max_lag = static_cast<int>(a.r.size()) - 1;
  for (std::size_t k = 1; k < a.r.size(); ++k) {
    double bound = k < a.band.size() ? a.band[k] : a.conf;
    if (a.r[k] < bound) return {static_cast<int>(k), false};
  }
  return {max_lag + 1, true};
}

std::pair<DailySeries, DailySeries> split_period(const DailySeries& s, Day date) {
  if (s.empty() || date < s.start || date > s.day_at(s.size() - 1)) {
    throw ArgumentError("split date " + format_date(date) + " lies outside the series");
  }
  auto cut = static_cast<std::size_t>((date - s.start).count());
  DailySeries pre{s.start, {s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(cut)}, s.meta};
  DailySeries post{date, {s.values.begin() + static_cast<std::ptrdiff_t>(cut), s.values.end()}, s.meta};
  return {std::move(pre), std::move(post)};
}

}  // namespace wedgepipe
