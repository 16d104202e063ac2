#include "wedgepipe/tagger.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

IssueMatcher IssueMatcher::build(std::span<const IssueLexicon> lexicons) {
  if (lexicons.empty()) throw ConfigError("no lexicons to build a matcher from");

  // Deterministic phrase ids: sorted by key.
  std::map<std::string, IssueSet> merged;
  for (const auto& lex : lexicons) {
    for (const auto& key : lex.phrases) merged[key].insert(lex.issue);
  }
  if (merged.empty()) throw ConfigError("lexicons contain no phrases");

  IssueMatcher m;
  m.nodes_.emplace_back();
  for (const auto& [key, issues] : merged) {
    auto id = static_cast<std::uint32_t>(m.phrases_.size());
    m.phrases_.push_back(key);
    m.phrase_issues_.push_back(issues);

    std::uint32_t node = 0;
    for (const auto& tok : split_ngram(key)) {
      auto [vit, _] = m.vocab_.emplace(tok, static_cast<std::uint32_t>(m.vocab_.size()));
      auto [eit, inserted] = m.edges_.emplace(edge_key(node, vit->second), 0);
      if (inserted) {
        eit->second = static_cast<std::uint32_t>(m.nodes_.size());
        Node next;
        next.depth = m.nodes_[node].depth + 1;
        m.nodes_.push_back(next);
      }
      node = eit->second;
    }
    m.nodes_[node].phrase = id;
  }

  // Children lists for the breadth-first failure-link pass.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> children(m.nodes_.size());
  for (const auto& [key, target] : m.edges_) {
    children[static_cast<std::uint32_t>(key >> 32)].emplace_back(static_cast<std::uint32_t>(key & 0xFFFFFFFFu), target);
  }

  std::queue<std::uint32_t> queue;
  for (auto [tok, target] : children[0]) {
    m.nodes_[target].fail = 0;
    queue.push(target);
  }
  while (!queue.empty()) {
    std::uint32_t v = queue.front();
    queue.pop();
    for (auto [tok, target] : children[v]) {
      std::uint32_t f = m.nodes_[v].fail;
      while (f != 0 && m.child(f, tok) == UINT32_MAX) f = m.nodes_[f].fail;
      std::uint32_t fc = m.child(f, tok);
      m.nodes_[target].fail = (fc != UINT32_MAX && fc != target) ? fc : 0;
      const Node& fn = m.nodes_[m.nodes_[target].fail];
      m.nodes_[target].output_link = fn.phrase != UINT32_MAX ? m.nodes_[target].fail : fn.output_link;
      queue.push(target);
    }
  }
  return m;
}

std::uint32_t IssueMatcher::token_id(const std::string& token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? kNoToken : it->second;
}

std::uint32_t IssueMatcher::child(std::uint32_t node, std::uint32_t token) const {
  auto it = edges_.find(edge_key(node, token));
  return it == edges_.end() ? UINT32_MAX : it->second;
}

std::uint32_t IssueMatcher::step(std::uint32_t node, std::uint32_t token) const {
  if (token == kNoToken) return 0;
  while (true) {
    std::uint32_t next = child(node, token);
    if (next != UINT32_MAX) return next;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

std::vector<PhraseMatch> IssueMatcher::find_all(std::span<const std::string> tokens) const {
  std::vector<PhraseMatch> out;
  std::uint32_t state = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    state = step(state, token_id(tokens[i]));
    std::uint32_t n = nodes_[state].phrase != UINT32_MAX ? state : nodes_[state].output_link;
    while (n != UINT32_MAX) {
      const Node& node = nodes_[n];
      out.push_back(PhraseMatch{i + 1 - node.depth, i + 1, node.phrase});
      n = node.output_link;
    }
  }
  return out;
}

IssueLabelSet tag_tokens(const TokenSeq& tokens, const IssueMatcher& matcher) {
  IssueLabelSet out;
  std::vector<std::uint32_t> seen;
  for (const auto& match : matcher.find_all(tokens.tokens)) {
    out.labels |= matcher.issues_of(match.phrase);
    if (std::find(seen.begin(), seen.end(), match.phrase) == seen.end()) {
      seen.push_back(match.phrase);
      out.matched_phrases.push_back(matcher.phrase(match.phrase));
    }
  }
  return out;
}

IssueLabelSet tag(const TweetRecord& record, const IssueMatcher& matcher) {
  return tag_tokens(normalize(record.text), matcher);
}

}  // namespace wedgepipe
