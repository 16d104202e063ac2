#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/issue.hpp"

namespace wedgepipe {

// ---------------------------------------------------------------------------
// Counting

/// Counts 1..n_max-grams over all documents and drops those seen fewer than
/// `min_count` times. `total` is recomputed over the surviving keys.
NgramCounts build_counts(std::span<const TokenSeq> documents, int n_max, std::int64_t min_count);

/// Removes keys with count below `min_count` and recomputes the total.
void prune_counts(NgramCounts& counts, std::int64_t min_count);

/// Removes unigrams that are stopwords and n-grams that begin or end with a
/// stopword ("cover_your_mouth" survives, "the_virus" does not).
void drop_stopword_ngrams(NgramCounts& counts, const std::unordered_set<std::string>& stopwords);

const std::unordered_set<std::string>& english_stopwords();

// ---------------------------------------------------------------------------
// Background distribution

/// Smoothed log-probabilities m_w over an ordered vocabulary.
struct BackgroundModel {
  std::vector<std::string> vocab;  ///< sorted
  std::vector<double> log_probs;   ///< aligned with vocab
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const noexcept { return vocab.size(); }
  std::optional<std::size_t> find(const std::string& term) const;
  /// Throws ArgumentError for terms outside the vocabulary.
  double log_prob(const std::string& term) const;
};

/// m_w = log((c_w + s) / (total + s*|V|)) where V is the union of the
/// baseline keys and the keys of every corpus in `issue_corpora`.
/// Throws ConfigError on empty baseline counts, ArgumentError when s <= 0.
BackgroundModel fit_background(const NgramCounts& baseline, double smoothing,
                               std::span<const NgramCounts> issue_corpora = {});

// ---------------------------------------------------------------------------
// Sparse deviation fit

struct SageOptions {
  double lambda = 1.0;
  double tol = 1e-6;
  int max_iter = 1000;
  bool record_trace = false;
};

/// Log-frequency deviations from the background, aligned with its vocabulary.
struct EtaVector {
  std::vector<std::string> terms;
  std::vector<double> eta;
  double lambda = 0.0;
  int iterations = 0;
  double final_gap = 0.0;
  bool converged = false;
  /// Objective value after each iteration (index 0 is the start point).
  /// Only filled when SageOptions::record_trace is set.
  std::vector<double> objective_trace;

  double at(const std::string& term) const;
  std::size_t nonzero() const;
};

/// Maximizes  sum_w c_w (m_w + eta_w) - C log sum_w exp(m_w + eta_w) - lambda ||eta||_1
/// by proximal gradient ascent from eta = 0. Steps are scaled by the
/// diagonal curvature C*p_w and accepted by a halving line search that
/// starts at 1 and enforces a quadratic lower bound, so the objective never
/// decreases. With lambda == 0 the free additive shift is fixed by making
/// the count-weighted mean of eta over the issue vocabulary zero.
///
/// Throws ArgumentError if lambda < 0, tol <= 0, or an issue n-gram is
/// missing from the background vocabulary. Hitting max_iter is not an error:
/// the result has converged == false and final_gap > tol.
EtaVector sage_fit(const NgramCounts& issue_counts, const BackgroundModel& background, const SageOptions& options);

/// Objective above for dense vectors aligned on one vocabulary.
double sage_objective(std::span<const double> counts, std::span<const double> log_background,
                      std::span<const double> eta, double lambda);

/// Gradient of the smooth part: c - C * softmax(m + eta).
std::vector<double> sage_smooth_gradient(std::span<const double> counts, std::span<const double> log_background,
                                         std::span<const double> eta);

/// Top-k positive entries by descending eta; ties broken lexicographically.
std::vector<std::pair<std::string, double>> select_candidates(const EtaVector& eta, std::size_t k);

// ---------------------------------------------------------------------------
// Curated lexicons

enum class LexiconProvenance : std::uint8_t { induced, curated };

struct IssueLexicon {
  Issue issue = Issue::origins;
  std::set<std::string> phrases;  ///< n-gram keys, 1-3 tokens
  LexiconProvenance provenance = LexiconProvenance::curated;
};

struct LexiconLoad {
  std::vector<IssueLexicon> lexicons;  ///< ordered by issue
  std::vector<std::string> warnings;
};

/// Normalizes a phrase with the corpus tokenizer and joins it into an n-gram
/// key. Returns nullopt if it does not produce 1-3 tokens.
std::optional<std::string> phrase_key(std::string_view phrase);

/// Reads `issue<TAB>phrase` lines; '#' starts a comment line. Unknown issues
/// and phrases that are not 1-3 tokens raise ParseError with the line number.
/// Duplicates within an issue are dropped with a warning.
LexiconLoad load_curated_lexicon(const std::filesystem::path& path);
LexiconLoad parse_curated_lexicon(std::istream& in);

/// Writes lexicons as TSV with phrases space-separated.
void write_lexicon_tsv(std::ostream& out, std::span<const IssueLexicon> lexicons);

}  // namespace wedgepipe
