#include "wedgepipe/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

NgramCounts build_counts(std::span<const TokenSeq> documents, int n_max, std::int64_t min_count) {
  if (min_count < 1) throw ArgumentError("min_count must be >= 1");
  NgramCounts counts;
  for (const auto& doc : documents) add_ngrams(counts, doc, n_max);
  prune_counts(counts, min_count);
  return counts;
}

void prune_counts(NgramCounts& counts, std::int64_t min_count) {
  std::int64_t total = 0;
  for (auto it = counts.counts.begin(); it != counts.counts.end();) {
    if (it->second < min_count) {
      it = counts.counts.erase(it);
    } else {
      total += it->second;
      ++it;
    }
  }
  counts.total = total;
}

void drop_stopword_ngrams(NgramCounts& counts, const std::unordered_set<std::string>& stopwords) {
  std::int64_t total = 0;
  for (auto it = counts.counts.begin(); it != counts.counts.end();) {
    auto parts = split_ngram(it->first);
    bool drop = stopwords.count(parts.front()) || stopwords.count(parts.back());
    if (drop) {
      it = counts.counts.erase(it);
    } else {
      total += it->second;
      ++it;
    }
  }
  counts.total = total;
}

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words{
      "a",       "about",  "above",   "after",   "again",  "against", "all",     "also",    "am",     "an",
      "and",     "any",    "are",     "arent",   "as",     "at",      "be",      "because", "been",   "before",
      "being",   "below",  "between", "both",    "but",    "by",      "can",     "cannot",  "could",  "couldnt",
      "did",     "didnt",  "do",      "does",    "doesnt", "doing",   "dont",    "down",    "during", "each",
      "few",     "for",    "from",    "further", "had",    "hadnt",   "has",     "hasnt",   "have",   "havent",
      "having",  "he",     "her",     "here",    "hers",   "herself", "him",     "himself", "his",    "how",
      "i",       "if",     "im",      "in",      "into",   "is",      "isnt",    "it",      "its",    "itself",
      "ive",     "just",   "me",      "more",    "most",   "my",      "myself",  "no",      "nor",    "not",
      "now",     "of",     "off",     "on",      "once",   "only",    "or",      "other",   "ought",  "our",
      "ours",    "out",    "over",    "own",     "same",   "she",     "should",  "so",      "some",   "such",
      "than",    "that",   "thats",   "the",     "their",  "theirs",  "them",    "then",    "there",  "these",
      "they",    "this",   "those",   "through", "to",     "too",     "under",   "until",   "up",     "very",
      "was",     "wasnt",  "we",      "were",    "werent", "what",    "when",    "where",   "which",  "while",
      "who",     "whom",   "why",     "will",    "with",   "wont",    "would",   "wouldnt", "you",    "your",
      "yours",   "yourself", "yourselves", "themselves", "ourselves", "may", "might", "must", "shall", "via",
      "s",       "t",      "d",       "ll",      "m",      "re",      "ve",      "amp",     "rt",     "one"};
  return words;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> BackgroundModel::find(const std::string& term) const {
  auto it = index.find(term);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

double BackgroundModel::log_prob(const std::string& term) const {
  auto i = find(term);
  if (!i) throw ArgumentError("term not in background vocabulary: " + term);
  return log_probs[*i];
}

BackgroundModel fit_background(const NgramCounts& baseline, double smoothing,
                               std::span<const NgramCounts> issue_corpora) {
  if (baseline.empty()) throw ConfigError("baseline counts are empty");
  if (!(smoothing > 0.0)) throw ArgumentError("smoothing must be > 0");

  BackgroundModel model;
  std::unordered_set<std::string> seen;
  for (const auto& [k, _] : baseline.counts) seen.insert(k);
  for (const auto& corpus : issue_corpora) {
    for (const auto& [k, _] : corpus.counts) seen.insert(k);
  }
  model.vocab.assign(seen.begin(), seen.end());
  std::sort(model.vocab.begin(), model.vocab.end());

  const double denom = static_cast<double>(baseline.total) + smoothing * static_cast<double>(model.vocab.size());
  model.log_probs.reserve(model.vocab.size());
  model.index.reserve(model.vocab.size());
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    double c = static_cast<double>(baseline.count(model.vocab[i]));
    model.log_probs.push_back(std::log((c + smoothing) / denom));
    model.index.emplace(model.vocab[i], i);
  }
  return model;
}

// ---------------------------------------------------------------------------
// SAGE

namespace {

double log_sum_exp(std::span<const double> m, std::span<const double> eta) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) hi = std::max(hi, m[i] + eta[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += std::exp(m[i] + eta[i] - hi);
  return hi + std::log(s);
}

double smooth_part(std::span<const double> c, double total, std::span<const double> m, std::span<const double> eta) {
  double lin = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) lin += c[i] * (m[i] + eta[i]);
  }
  return lin - total * log_sum_exp(m, eta);
}

double l1(std::span<const double> eta) {
  double s = 0.0;
  for (double v : eta) s += std::abs(v);
  return s;
}

void softmax(std::span<const double> m, std::span<const double> eta, std::vector<double>& p) {
  double lse = log_sum_exp(m, eta);
  p.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = std::exp(m[i] + eta[i] - lse);
}

void check_aligned(std::span<const double> c, std::span<const double> m, std::span<const double> eta) {
  if (c.size() != m.size() || m.size() != eta.size()) throw ArgumentError("vectors must share one vocabulary");
}

}  // namespace

double sage_objective(std::span<const double> counts, std::span<const double> log_background,
                      std::span<const double> eta, double lambda) {
  check_aligned(counts, log_background, eta);
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  return smooth_part(counts, total, log_background, eta) - lambda * l1(eta);
}

std::vector<double> sage_smooth_gradient(std::span<const double> counts, std::span<const double> log_background,
                                         std::span<const double> eta) {
  check_aligned(counts, log_background, eta);
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> p;
  softmax(log_background, eta, p);
  std::vector<double> g(counts.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = counts[i] - total * p[i];
  return g;
}

double EtaVector::at(const std::string& term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) throw ArgumentError("term not in eta vector: " + term);
  return eta[static_cast<std::size_t>(it - terms.begin())];
}

std::size_t EtaVector::nonzero() const {
  return static_cast<std::size_t>(std::count_if(eta.begin(), eta.end(), [](double v) { return v != 0.0; }));
}

EtaVector sage_fit(const NgramCounts& issue_counts, const BackgroundModel& background, const SageOptions& options) {
  if (!(options.lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  if (!(options.tol > 0.0)) throw ArgumentError("tol must be > 0");
  if (options.max_iter < 0) throw ArgumentError("max_iter must be >= 0");

  const std::size_t n = background.size();
  std::vector<double> c(n, 0.0);
  for (const auto& [key, count] : issue_counts.counts) {
    auto idx = background.find(key);
    if (!idx) throw ArgumentError("issue n-gram missing from background vocabulary: " + key);
    c[*idx] = static_cast<double>(count);
  }
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  const std::span<const double> m(background.log_probs);
  const double lambda = options.lambda;

  EtaVector result;
  result.terms = background.vocab;
  result.lambda = lambda;
  std::vector<double>& eta = result.eta;
  eta.assign(n, 0.0);

  double f = smooth_part(c, total, m, eta);
  if (options.record_trace) result.objective_trace.push_back(f);

  std::vector<double> p, g(n), h(n), trial(n);
  double gap = 0.0;
  bool converged = total == 0.0;
  int iter = 0;
  while (!converged && iter < options.max_iter) {
    ++iter;
    softmax(m, eta, p);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = c[i] - total * p[i];
      h[i] = total * p[i] + 1e-12 * total + 1e-300;
    }

    double step = 1.0;
    double f_trial = f;
    bool accepted = false;
    while (step > 1e-30) {
      double lin = 0.0, quad = 0.0;
      gap = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double z = eta[i] + step * g[i] / h[i];
        double thr = step * lambda / h[i];
        double v = z > thr ? z - thr : (z < -thr ? z + thr : 0.0);
        trial[i] = v;
        double d = v - eta[i];
        lin += g[i] * d;
        quad += h[i] * d * d;
        gap = std::max(gap, std::abs(d));
      }
      f_trial = smooth_part(c, total, m, trial);
      if (f_trial >= f + lin - quad / (2.0 * step)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable ascent step remains.
      gap = 0.0;
      converged = true;
      break;
    }
    eta.swap(trial);
    f = f_trial;
    if (options.record_trace) result.objective_trace.push_back(f - lambda * l1(eta));
    if (gap < options.tol) converged = true;
  }

  if (lambda == 0.0 && total > 0.0) {
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) shift += c[i] * eta[i];
    shift /= total;
    for (double& v : eta) v -= shift;
  }

  result.iterations = iter;
  result.final_gap = gap;
  result.converged = converged;
  return result;
}

std::vector<std::pair<std::string, double>> select_candidates(const EtaVector& eta, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < eta.eta.size(); ++i) {
    if (eta.eta[i] > 0.0) out.emplace_back(eta.terms[i], eta.eta[i]);
  }
  auto by_rank = [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; };
  if (out.size() > k) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), by_rank);
    out.resize(k);
  } else {
    std::sort(out.begin(), out.end(), by_rank);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curated lexicons

std::optional<std::string> phrase_key(std::string_view phrase) {
  TokenSeq seq = normalize(phrase);
  if (seq.empty() || seq.size() > 3) return std::nullopt;
  return join_ngram(seq.tokens);
}

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

LexiconLoad parse_curated_lexicon(std::istream& in) {
  LexiconLoad out;
  std::array<std::optional<IssueLexicon>, kAllIssues.size()> by_issue;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected issue<TAB>phrase", lineno);
    std::string_view name = trim(view.substr(0, tab));
    std::string_view phrase = trim(view.substr(tab + 1));
    auto issue = parse_issue(name);
    if (!issue) throw ParseError("unknown issue \"" + std::string(name) + "\"", lineno);
    auto key = phrase_key(phrase);
    if (!key) throw ParseError("phrase must normalize to 1-3 tokens: \"" + std::string(phrase) + "\"", lineno);

    auto& slot = by_issue[static_cast<std::size_t>(*issue)];
    if (!slot) slot = IssueLexicon{*issue, {}, LexiconProvenance::curated};
    if (!slot->phrases.insert(*key).second) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": duplicate phrase \"" + *key + "\" for issue " +
                             std::string(name) + " ignored");
    }
  }
  for (auto& slot : by_issue) {
    if (slot) out.lexicons.push_back(std::move(*slot));
  }
  if (out.lexicons.empty()) out.warnings.emplace_back("lexicon file contains no entries");
  return out;
}

LexiconLoad load_curated_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon " + path.string());
  return parse_curated_lexicon(in);
}

void write_lexicon_tsv(std::ostream& out, std::span<const IssueLexicon> lexicons) {
  for (const auto& lex : lexicons) {
    for (const auto& key : lex.phrases) {
      std::string phrase = key;
      std::replace(phrase.begin(), phrase.end(), kNgramSeparator, ' ');
      out << to_string(lex.issue) << '\t' << phrase << '\n';
    }
  }
}

}  // namespace wedgepipe
