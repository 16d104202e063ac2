#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/issue.hpp"
#include "wedgepipe/lexicon.hpp"

namespace wedgepipe {

/// One occurrence of a lexicon phrase covering tokens [begin, end).
struct PhraseMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint32_t phrase = 0;

  friend bool operator==(const PhraseMatch&, const PhraseMatch&) = default;
};

/// Aho-Corasick automaton whose alphabet is the set of lexicon tokens.
/// Immutable once built and safe to share between threads.
class IssueMatcher {
 public:
  /// Throws ConfigError when there are no lexicons or no phrases.
  static IssueMatcher build(std::span<const IssueLexicon> lexicons);

  /// Every phrase occurrence, ordered by end position then by length
  /// (longest first).
  std::vector<PhraseMatch> find_all(std::span<const std::string> tokens) const;

  std::size_t pattern_count() const noexcept { return phrases_.size(); }
  const std::string& phrase(std::uint32_t id) const { return phrases_[id]; }
  IssueSet issues_of(std::uint32_t id) const { return phrase_issues_[id]; }

 private:
  static constexpr std::uint32_t kNoToken = UINT32_MAX;

  struct Node {
    std::uint32_t fail = 0;
    std::uint32_t output_link = UINT32_MAX;  ///< nearest proper suffix node with a phrase
    std::uint32_t phrase = UINT32_MAX;       ///< phrase ending exactly here
    std::uint32_t depth = 0;
  };

  std::uint32_t token_id(const std::string& token) const;
  std::uint32_t child(std::uint32_t node, std::uint32_t token) const;
  std::uint32_t step(std::uint32_t node, std::uint32_t token) const;

  static std::uint64_t edge_key(std::uint32_t node, std::uint32_t token) {
    return (static_cast<std::uint64_t>(node) << 32) | token;
  }

  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<Node> nodes_;
  std::vector<std::string> phrases_;
  std::vector<IssueSet> phrase_issues_;
};

struct IssueLabelSet {
  IssueSet labels;
  std::vector<std::string> matched_phrases;  ///< distinct, in order of first occurrence
};

IssueLabelSet tag_tokens(const TokenSeq& tokens, const IssueMatcher& matcher);

/// Labels a record with every issue whose phrases occur in its normalized text.
IssueLabelSet tag(const TweetRecord& record, const IssueMatcher& matcher);

}  // namespace wedgepipe
