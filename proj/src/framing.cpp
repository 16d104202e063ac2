#include "wedgepipe/framing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/errors.hpp"

namespace wedgepipe {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void finish_sentence(ParsedSentence& s, const std::function<void(ParsedSentence&&)>& sink) {
  if (s.tokens.empty()) {
    s = ParsedSentence{};
    return;
  }
  const int n = static_cast<int>(s.tokens.size());
  int roots = 0;
  for (const auto& t : s.tokens) {
    if (t.head < 0 || t.head > n) {
      throw ParseError("head " + std::to_string(t.head) + " of token " + std::to_string(t.id) + " out of range",
                       s.first_line);
    }
    if (t.head == 0) ++roots;
  }
  if (roots != 1) {
    throw ParseError("sentence must have exactly one root, found " + std::to_string(roots), s.first_line);
  }
  sink(std::move(s));
  s = ParsedSentence{};
}

}  // namespace

void for_each_sentence(std::istream& in, const std::function<void(ParsedSentence&&)>& sink) {
  ParsedSentence current;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (current.first_line == 0) current.first_line = lineno;
    if (line.empty()) {
      finish_sentence(current, sink);
      continue;
    }
    if (line.front() == '#') {
      std::string_view body = trim(std::string_view(line).substr(1));
      auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        current.metadata.emplace(std::string(body), "");
      } else {
        current.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 10) {
      throw ParseError("expected 10 tab-separated fields, found " + std::to_string(fields.size()), lineno);
    }
    if (fields[0].find('-') != std::string_view::npos || fields[0].find('.') != std::string_view::npos) continue;

    ConlluToken tok;
    if (!parse_int(fields[0], tok.id)) throw ParseError("bad token id \"" + std::string(fields[0]) + "\"", lineno);
    if (tok.id != static_cast<int>(current.tokens.size()) + 1) {
      throw ParseError("token id " + std::to_string(tok.id) + " out of sequence", lineno);
    }
    if (!parse_int(fields[6], tok.head) || tok.head < 0) {
      throw ParseError("bad head index \"" + std::string(fields[6]) + "\"", lineno);
    }
    tok.form = fields[1];
    tok.lemma = fields[2];
    tok.upos = fields[3];
    tok.xpos = fields[4];
    tok.deprel = fields[7];
    current.tokens.push_back(std::move(tok));
  }
  if (in.bad()) throw IoError("error while reading CoNLL-U input");
  finish_sentence(current, sink);
}

std::vector<ParsedSentence> parse_conllu(std::istream& in) {
  std::vector<ParsedSentence> out;
  for_each_sentence(in, [&](ParsedSentence&& s) { out.push_back(std::move(s)); });
  return out;
}

std::vector<ParsedSentence> parse_conllu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read CoNLL-U file " + path.string());
  return parse_conllu(in);
}

void write_conllu(std::ostream& out, const ParsedSentence& s) {
  for (const auto& [k, v] : s.metadata) {
    out << "# " << k;
    if (!v.empty()) out << " = " << v;
    out << '\n';
  }
  auto field = [](const std::string& v) -> const std::string& {
    static const std::string underscore = "_";
    return v.empty() ? underscore : v;
  };
  for (const auto& t : s.tokens) {
    out << t.id << '\t' << field(t.form) << '\t' << field(t.lemma) << '\t' << field(t.upos) << '\t' << field(t.xpos)
        << "\t_\t" << t.head << '\t' << field(t.deprel) << "\t_\t_\n";
  }
  out << '\n';
}

// ---------------------------------------------------------------------------

namespace {

struct AnchorSpan {
  std::size_t first = 0;  ///< token index, inclusive
  std::size_t last = 0;   ///< token index, inclusive
  std::uint32_t phrase = 0;

  auto operator<=>(const AnchorSpan&) const = default;
};

void collect_spans(const ParsedSentence& s, const IssueMatcher& matcher, bool use_lemma,
                   std::set<AnchorSpan>& spans) {
  std::vector<std::string> seq;
  std::vector<std::size_t> owner;
  for (std::size_t j = 0; j < s.tokens.size(); ++j) {
    const auto& t = s.tokens[j];
    const std::string& text = use_lemma && !t.lemma.empty() && t.lemma != "_" ? t.lemma : t.form;
    for (auto& piece : normalize(text).tokens) {
      seq.push_back(std::move(piece));
      owner.push_back(j);
    }
  }
  for (const auto& m : matcher.find_all(seq)) {
    spans.insert(AnchorSpan{owner[m.begin], owner[m.end - 1], m.phrase});
  }
}

std::string adjective_text(const ConlluToken& t) {
  const std::string& text = !t.lemma.empty() && t.lemma != "_" ? t.lemma : t.form;
  auto seq = normalize(text);
  std::string out;
  for (const auto& piece : seq) {
    if (!out.empty()) out += '-';
    out += piece;
  }
  return out;
}

}  // namespace

std::vector<FramePhrase> extract_frames(const ParsedSentence& s, const IssueMatcher& matcher) {
  std::set<AnchorSpan> spans;
  collect_spans(s, matcher, false, spans);
  // Lemma matches only fill in tokens no surface-form anchor covers, so
  // "vaccines" and its lemma "vaccine" do not both count.
  std::set<AnchorSpan> by_lemma;
  collect_spans(s, matcher, true, by_lemma);
  for (const auto& l : by_lemma) {
    const bool covered = std::any_of(spans.begin(), spans.end(),
                                     [&](const AnchorSpan& f) { return l.first <= f.last && f.first <= l.last; });
    if (!covered) spans.insert(l);
  }

  std::vector<FramePhrase> out;
  if (spans.empty()) return out;
  std::set<std::pair<std::size_t, std::uint32_t>> emitted;

  for (std::size_t x = 0; x < s.tokens.size(); ++x) {
    const auto& adj = s.tokens[x];
    if (adj.deprel != "amod" || adj.head == 0) continue;
    const auto head = static_cast<std::size_t>(adj.head - 1);
    for (const auto& span : spans) {
      if (x >= span.first && x <= span.last) continue;
      bool hit = head >= span.first && head <= span.last;
      for (std::size_t a = span.first; !hit && a <= span.last; ++a) {
        const auto& anchor_tok = s.tokens[a];
        hit = anchor_tok.deprel == "amod" && anchor_tok.head == adj.head;
      }
      if (!hit || !emitted.emplace(x, span.phrase).second) continue;

      std::string word = adjective_text(adj);
      if (word.empty()) continue;
      const std::string& anchor = matcher.phrase(span.phrase);
      for (Issue issue : matcher.issues_of(span.phrase).to_vector()) {
        out.push_back(FramePhrase{word, anchor, word + kNgramSeparator + anchor, issue});
      }
    }
  }
  return out;
}

std::map<std::string, double> log_odds(const PhraseCounts& a, const PhraseCounts& b, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be > 0");
  std::int64_t total_a = 0, total_b = 0;
  for (const auto& [_, c] : a) total_a += c;
  for (const auto& [_, c] : b) total_b += c;
  if (total_a == 0 && total_b == 0) throw ArgumentError("both groups have zero phrase counts");

  auto count_in = [](const PhraseCounts& m, const std::string& key) -> double {
    auto it = m.find(key);
    return it == m.end() ? 0.0 : static_cast<double>(it->second);
  };
  std::map<std::string, double> out;
  auto score = [&](const std::string& key) {
    double ap = count_in(a, key), bp = count_in(b, key);
    double A = static_cast<double>(total_a), B = static_cast<double>(total_b);
    out[key] = std::log((ap + alpha) / (A - ap + alpha)) - std::log((bp + alpha) / (B - bp + alpha));
  };
  for (const auto& [key, _] : a) score(key);
  for (const auto& [key, _] : b) {
    if (!out.count(key)) score(key);
  }
  return out;
}

std::vector<std::pair<std::string, double>> top_phrases(const std::map<std::string, double>& scores, std::size_t k,
                                                        Direction direction) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
  auto better = [direction](const auto& x, const auto& y) {
    if (x.second != y.second) return direction == Direction::group_a ? x.second > y.second : x.second < y.second;
    return x.first < y.first;
  };
  std::stable_sort(out.begin(), out.end(), better);
  if (out.size() > k) out.resize(k);
  return out;
}

std::map<std::string, double> apply_frequency_floor(const std::map<std::string, double>& scores,
                                                    const PhraseCounts& a, const PhraseCounts& b,
                                                    std::int64_t floor) {
  std::map<std::string, double> out;
  for (const auto& [key, v] : scores) {
    std::int64_t n = 0;
    if (auto it = a.find(key); it != a.end()) n += it->second;
    if (auto it = b.find(key); it != b.end()) n += it->second;
    if (n >= floor) out.emplace(key, v);
  }
  return out;
}

}  // namespace wedgepipe
