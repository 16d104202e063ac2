#include "wedgepipe/moral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

namespace {

constexpr std::array<std::string_view, kMoralCategoryCount> kCategoryNames{
    "care", "harm", "fairness", "cheating", "loyalty", "betrayal", "authority", "subversion", "purity", "degradation"};

constexpr std::array<std::string_view, kFoundationCount> kFoundationNames{
    "care_harm", "fairness_cheating", "loyalty_betrayal", "authority_subversion", "purity_degradation"};

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string_view to_string(MoralCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(Foundation f) { return kFoundationNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(MoralMethod m) { return m == MoralMethod::ddr ? "ddr" : "lexicon"; }

std::optional<MoralCategory> parse_moral_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<MoralCategory>(i);
  }
  return std::nullopt;
}

std::optional<Foundation> parse_foundation(std::string_view s) {
  for (std::size_t i = 0; i < kFoundationNames.size(); ++i) {
    if (kFoundationNames[i] == s) return static_cast<Foundation>(i);
  }
  return std::nullopt;
}

std::uint16_t MoralVector::label_mask() const {
  std::uint16_t mask = 0;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    if (labels[k]) mask = static_cast<std::uint16_t>(mask | (1u << k));
  }
  return mask;
}

MoralThresholds default_ddr_thresholds() {
  MoralThresholds t;
  t.fill(0.55);
  return t;
}

MoralThresholds default_lexicon_thresholds() {
  MoralThresholds t;
  t.fill(std::numeric_limits<double>::min());
  return t;
}

MoralLexicon MoralLexicon::parse(std::istream& in) {
  MoralLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected category<TAB>word", lineno);
    auto name = trim(view.substr(0, tab));
    auto cat = parse_moral_category(name);
    if (!cat) throw ParseError("unknown moral category \"" + std::string(name) + "\"", lineno);
    std::string_view word = trim(view.substr(tab + 1));
    MoralSeed seed;
    if (!word.empty() && word.back() == '*') {
      seed.stem = true;
      word.remove_suffix(1);
    }
    TokenSeq norm = normalize(word);
    if (norm.size() != 1) throw ParseError("seed must be a single token: \"" + std::string(word) + "\"", lineno);
    seed.word = norm.tokens.front();
    lex.seeds[static_cast<std::size_t>(*cat)].push_back(std::move(seed));
  }
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    if (lex.seeds[k].empty()) {
      throw ParseError("moral lexicon has no seeds for category " + std::string(kCategoryNames[k]));
    }
  }
  return lex;
}

MoralLexicon MoralLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read moral lexicon " + path.string());
  return parse(in);
}

std::vector<double> concept_vector(std::span<const std::string> seeds, const EmbeddingTable& table,
                                   std::string_view name) {
  std::vector<double> mean(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& s : seeds) {
    if (auto v = table.find(s)) {
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += (*v)[k];
      ++hits;
    }
  }
  if (hits == 0) throw ConfigError("no seed of " + std::string(name) + " is in the embedding vocabulary");
  double norm = l2_norm(mean);
  if (norm < 1e-12) throw ConfigError("seed vectors of " + std::string(name) + " cancel out");
  for (double& x : mean) x /= norm;
  return mean;
}

ConceptSet build_concepts(const MoralLexicon& lexicon, const EmbeddingTable& table) {
  ConceptSet concepts;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    std::vector<std::string> words;
    for (const auto& s : lexicon.seeds[k]) words.push_back(s.word);
    concepts[k] = concept_vector(words, table, kCategoryNames[k]);
  }
  return concepts;
}

MoralVector score_moral_ddr(const TokenSeq& doc, const ConceptSet& concepts, const EmbeddingTable& table,
                            const MoralThresholds& thresholds) {
  MoralVector out;
  out.method = MoralMethod::ddr;
  std::vector<double> mean(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : doc) {
    if (auto v = table.find(tok)) {
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += (*v)[k];
      ++hits;
    }
  }
  double norm = l2_norm(mean);
  if (hits == 0 || norm < 1e-12) return out;
  for (double& x : mean) x /= norm;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    double c = dot(mean, concepts[k]);
    out.scores[k] = std::clamp(c, -1.0, 1.0);
    out.labels[k] = out.scores[k] >= thresholds[k];
  }
  return out;
}

MoralVector score_moral_lexicon(const TokenSeq& doc, const MoralLexicon& lexicon, const MoralThresholds& thresholds) {
  MoralVector out;
  out.method = MoralMethod::lexicon;
  if (doc.empty()) return out;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    std::size_t matched = 0;
    for (const auto& tok : doc) {
      for (const auto& seed : lexicon.seeds[k]) {
        if (seed.stem ? tok.starts_with(seed.word) : tok == seed.word) {
          ++matched;
          break;
        }
      }
    }
    out.scores[k] = static_cast<double>(matched) / static_cast<double>(doc.size());
    out.labels[k] = out.scores[k] >= thresholds[k];
  }
  return out;
}

std::array<bool, kFoundationCount> collapse_foundations(const MoralVector& v) {
  std::array<bool, kFoundationCount> out{};
  for (std::size_t f = 0; f < kFoundationCount; ++f) out[f] = v.labels[2 * f] || v.labels[2 * f + 1];
  return out;
}

}  // namespace wedgepipe
