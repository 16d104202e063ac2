#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wedgepipe/dates.hpp"
#include "wedgepipe/issue.hpp"

namespace wedgepipe {

/// A short example tweet and the issue its highlighted phrase indicates.
struct SampleTweet {
  Issue issue;
  std::string text;
  std::vector<std::string> phrases;  ///< highlighted lexicon phrases
};

/// One illustrative tweet per issue; the fixture lexicon contains their
/// highlighted phrases.
std::span<const SampleTweet> sample_issue_tweets();

struct SynthOptions {
  std::uint64_t seed = 7;
  int users = 400;
  int elites = 20;
  int tweets = 20000;
  int sentences = 3000;
  Day first_day = Day{std::chrono::year{2020} / 6 / 1};
  Day last_day = Day{std::chrono::year{2021} / 6 / 30};
};

/// Writes a complete, deterministic fixture into `dir`:
///   tweets.jsonl, lexicon.tsv, bias.csv, embeddings.vec, moral_lexicon.tsv,
///   roster.txt, parses.conllu, issue_docs/<issue>/*.txt, baseline_docs/*.txt
///   and config.toml (relative paths, output into `out/`).
/// Returns the files written.
std::vector<std::filesystem::path> write_fixture(const std::filesystem::path& dir, const SynthOptions& options = {});

}  // namespace wedgepipe
