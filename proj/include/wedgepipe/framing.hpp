#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wedgepipe/issue.hpp"
#include "wedgepipe/tagger.hpp"

namespace wedgepipe {

struct ConlluToken {
  int id = 0;  ///< 1-based position
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  int head = 0;  ///< 0 for the root
  std::string deprel;
};

struct ParsedSentence {
  std::vector<ConlluToken> tokens;
  /// `# key = value` comment lines; a bare `# text` comment is stored under
  /// its own text with an empty value.
  std::map<std::string, std::string> metadata;
  std::size_t first_line = 0;
};

/// Reads CoNLL-U. Multiword-token ranges and empty nodes are skipped.
/// Throws ParseError (with the line number) on malformed lines, token ids
/// out of sequence, heads out of range, or a sentence without exactly one
/// root.
void for_each_sentence(std::istream& in, const std::function<void(ParsedSentence&&)>& sink);
std::vector<ParsedSentence> parse_conllu(std::istream& in);
std::vector<ParsedSentence> parse_conllu(const std::filesystem::path& path);

/// Writes a sentence back in CoNLL-U form (unused columns as "_").
void write_conllu(std::ostream& out, const ParsedSentence& s);

struct FramePhrase {
  std::string adjective;
  std::string anchor;  ///< lexicon n-gram key
  std::string key;     ///< adjective + '_' + anchor
  Issue issue = Issue::origins;

  friend bool operator==(const FramePhrase&, const FramePhrase&) = default;
};

/// Adjective-anchor pairs of a sentence. Anchors are lexicon phrases found by
/// the matcher over the normalized forms, and over the normalized lemmas where
/// no form match covers the tokens.
/// A token XX with relation "amod" yields XX_ANC when its head lies inside an
/// anchor span, or when a token of the anchor span is itself an amod
/// dependent of the same head. Anchors of several issues yield one phrase per
/// issue.
std::vector<FramePhrase> extract_frames(const ParsedSentence& s, const IssueMatcher& matcher);

using PhraseCounts = std::map<std::string, std::int64_t>;

/// Smoothed log-odds of each phrase between group a and group b:
///   log((a_p + alpha) / (A - a_p + alpha)) - log((b_p + alpha) / (B - b_p + alpha))
/// Positive values lean to group a. Throws ArgumentError if alpha <= 0 or
/// both groups are empty.
std::map<std::string, double> log_odds(const PhraseCounts& a, const PhraseCounts& b, double alpha);

enum class Direction : std::uint8_t { group_a, group_b };

/// Highest scores for group a, lowest for group b; ties lexicographic.
std::vector<std::pair<std::string, double>> top_phrases(const std::map<std::string, double>& scores, std::size_t k,
                                                        Direction direction);

/// Drops phrases whose combined count is below `floor`.
std::map<std::string, double> apply_frequency_floor(const std::map<std::string, double>& scores,
                                                    const PhraseCounts& a, const PhraseCounts& b,
                                                    std::int64_t floor);

}  // namespace wedgepipe
