#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/embeddings.hpp"

namespace wedgepipe {

/// Virtue/vice poles of the five moral foundations; the virtue of foundation
/// f has index 2f and its vice 2f + 1.
enum class MoralCategory : std::uint8_t {
  care,
  harm,
  fairness,
  cheating,
  loyalty,
  betrayal,
  authority,
  subversion,
  purity,
  degradation
};

enum class Foundation : std::uint8_t { care_harm, fairness_cheating, loyalty_betrayal, authority_subversion, purity_degradation };

inline constexpr std::size_t kMoralCategoryCount = 10;
inline constexpr std::size_t kFoundationCount = 5;

std::string_view to_string(MoralCategory c);
std::string_view to_string(Foundation f);
std::optional<MoralCategory> parse_moral_category(std::string_view s);
std::optional<Foundation> parse_foundation(std::string_view s);

inline constexpr Foundation foundation_of(MoralCategory c) {
  return static_cast<Foundation>(static_cast<unsigned>(c) / 2);
}

using MoralThresholds = std::array<double, kMoralCategoryCount>;

enum class MoralMethod : std::uint8_t { lexicon, ddr };
std::string_view to_string(MoralMethod m);

struct MoralVector {
  std::array<double, kMoralCategoryCount> scores{};
  std::array<bool, kMoralCategoryCount> labels{};
  MoralMethod method = MoralMethod::lexicon;

  double score(MoralCategory c) const { return scores[static_cast<std::size_t>(c)]; }
  bool label(MoralCategory c) const { return labels[static_cast<std::size_t>(c)]; }
  /// Bit k set iff labels[k].
  std::uint16_t label_mask() const;
};

struct MoralSeed {
  std::string word;
  bool stem = false;  ///< matches any token with `word` as prefix
};

/// Seed words per category, loaded from `category<TAB>word[*]` lines.
struct MoralLexicon {
  std::array<std::vector<MoralSeed>, kMoralCategoryCount> seeds;

  /// Throws ParseError on unknown categories or if a category ends up empty.
  static MoralLexicon load(const std::filesystem::path& path);
  static MoralLexicon parse(std::istream& in);

  const std::vector<MoralSeed>& of(MoralCategory c) const { return seeds[static_cast<std::size_t>(c)]; }
};

/// Thresholds for DDR cosine scores.
MoralThresholds default_ddr_thresholds();
/// Thresholds for lexicon match rates: any match sets the label.
MoralThresholds default_lexicon_thresholds();

/// L2-normalized mean of the in-vocabulary seed vectors. Throws ConfigError
/// naming `name` if no seed is in the table or the mean is the zero vector.
std::vector<double> concept_vector(std::span<const std::string> seeds, const EmbeddingTable& table,
                                   std::string_view name = "concept");

using ConceptSet = std::array<std::vector<double>, kMoralCategoryCount>;

/// Concept vectors for all ten categories from a seed lexicon. Stem seeds
/// contribute the vector of the stem itself when present.
ConceptSet build_concepts(const MoralLexicon& lexicon, const EmbeddingTable& table);

/// Cosine between the normalized mean token vector and each concept. A
/// document with no in-vocabulary token scores 0 with every label false.
MoralVector score_moral_ddr(const TokenSeq& doc, const ConceptSet& concepts, const EmbeddingTable& table,
                            const MoralThresholds& thresholds = default_ddr_thresholds());

/// Share of the document's tokens matching each category's seeds.
MoralVector score_moral_lexicon(const TokenSeq& doc, const MoralLexicon& lexicon,
                                const MoralThresholds& thresholds = default_lexicon_thresholds());

/// Foundation present iff its virtue or its vice label is set.
std::array<bool, kFoundationCount> collapse_foundations(const MoralVector& v);

}  // namespace wedgepipe
