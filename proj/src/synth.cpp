#include "wedgepipe/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/errors.hpp"
#include "wedgepipe/moral.hpp"

namespace wedgepipe {

namespace fs = std::filesystem;

namespace {

const std::vector<SampleTweet> kSamples = {
    {Issue::origins,
     "No matter what the Chinese Communist Party says, given the mounting evidence, the most likely origins for the "
     "China virus are the Wuhan labs studying bats and coronavirus.",
     {"Wuhan labs"}},
    {Issue::lockdowns,
     "This is a GREAT idea. We're all in this together. Take care of each other. #StayHome #TakeItSeriously "
     "#FlattenTheCurve #COVID19",
     {"#StayHome"}},
    {Issue::masking,
     "We’re in the middle of a pandemic and y’all are still coughing and sneezing without covering your "
     "mouths? Come on now.",
     {"covering your mouths"}},
    {Issue::education,
     "More glimmers of hope as we “safely” move forward and open up Texas A&M University while containing "
     "#COVID19.",
     {"University"}},
    {Issue::vaccines,
     "You are joking right? Zero sympathy for anti-vaxxers who quit their jobs rather than get vaccinated. They put "
     "us all at risk and make the pandemic prolonged for the world.",
     {"anti-vaxxers", "vaccinated"}},
};

const std::vector<std::string> kFiller = {
    "today",   "people",  "think",   "really",  "week",    "going",   "time",     "news",   "still",   "know",
    "need",    "right",   "good",    "many",    "state",   "country", "family",   "work",   "city",    "friends",
    "heard",   "saying",  "update",  "report",  "morning", "night",   "help",     "watch",  "read",    "story",
    "local",   "public",  "official", "plan",   "numbers", "cases",   "health",   "data",   "years",   "months",
    "another", "again",   "maybe",   "honestly", "seems",  "looks",   "talking",  "thread", "post",    "video",
    "week",    "weekend", "meeting", "office",  "street",  "home",    "online",   "store",  "line",    "wait",
    "finally", "every",   "almost",  "enough",  "nothing", "something", "everyone", "nobody", "simple", "hard"};

const std::vector<std::string> kLiberalWords = {"science", "experts",   "climate",  "healthcare", "progress",
                                                "inclusive", "democrats", "biden",   "workers",    "diversity"};
const std::vector<std::string> kConservativeWords = {"freedom",  "liberty",  "constitution", "patriots", "republicans",
                                                     "trump",    "taxpayers", "borders",     "faith",    "maga"};

/// Curated phrases per issue (the fixture lexicon).
const std::map<Issue, std::vector<std::string>> kIssuePhrases = {
    {Issue::origins, {"Wuhan labs", "wet markets", "lab leak", "gain of function", "bats"}},
    {Issue::lockdowns, {"#StayHome", "lockdown", "stay at home", "shelter in place", "reopen"}},
    {Issue::masking, {"covering your mouths", "cover your mouth", "N-95 masks", "mask mandate", "face masks"}},
    {Issue::education, {"University", "school closures", "online classes", "remote learning", "teachers union"}},
    {Issue::vaccines, {"anti-vaxxers", "vaccinated", "vaccine mandate", "booster shot", "pfizer"}},
};

/// Extra vocabulary used by the issue documents for lexicon induction.
const std::map<Issue, std::vector<std::string>> kIssueVocab = {
    {Issue::origins, {"laboratory", "pathogen", "zoonotic", "spillover", "virology", "pangolin"}},
    {Issue::lockdowns, {"curfew", "closures", "restrictions", "quarantine", "businesses", "order"}},
    {Issue::masking, {"respirator", "mouth", "nose", "filtration", "droplets", "coverings"}},
    {Issue::education, {"students", "classroom", "campus", "semester", "schools", "tuition"}},
    {Issue::vaccines, {"immunization", "dose", "moderna", "efficacy", "antibodies", "hesitancy"}},
};

const std::array<std::vector<std::string>, kMoralCategoryCount> kMoralWords = {{
    {"care", "protect", "compassion", "safety", "heal"},
    {"harm", "suffer", "hurt", "kill", "damage"},
    {"fair", "equal", "justice", "rights", "fairness"},
    {"cheat", "fraud", "unfair", "steal", "corrupt"},
    {"loyal", "solidarity", "unite", "allegiance", "devotion"},
    {"betray", "treason", "traitor", "disloyal", "deceive"},
    {"authority", "law", "obey", "respect", "duty"},
    {"rebel", "defy", "protest", "overthrow", "disobey"},
    {"pure", "sacred", "clean", "holy", "wholesome"},
    {"disgust", "filthy", "dirty", "gross", "contaminate"},
}};

/// Per-category base rates of moral words in issue tweets, by group.
constexpr std::array<double, kMoralCategoryCount> kLiberalMoral = {0.25, 0.12, 0.10, 0.05, 0.05,
                                                                  0.03, 0.08, 0.05, 0.03, 0.04};
constexpr std::array<double, kMoralCategoryCount> kConservativeMoral = {0.10, 0.20, 0.06, 0.10, 0.04,
                                                                       0.06, 0.10, 0.18, 0.03, 0.06};

/// Framing anchors (a subset of the lexicon) and the adjectives each group
/// attaches to them.
struct FrameSpec {
  std::vector<std::string> anchors;
  std::vector<std::string> liberal;
  std::vector<std::string> conservative;
};

const std::map<Issue, FrameSpec> kFrames = {
    {Issue::origins, {{"Wuhan labs", "wet markets", "bats"}, {"natural", "zoonotic", "wild"}, {"chinese", "secret", "communist"}}},
    {Issue::lockdowns, {{"lockdown", "shelter in place"}, {"necessary", "temporary", "effective"}, {"tyrannical", "endless", "unconstitutional"}}},
    {Issue::masking, {{"face masks", "mask mandate", "N-95 masks"}, {"simple", "essential", "protective"}, {"useless", "forced", "oppressive"}}},
    {Issue::education, {{"remote learning", "school closures", "online classes"}, {"safe", "flexible", "careful"}, {"failed", "harmful", "radical"}}},
    {Issue::vaccines, {{"vaccine mandate", "booster shot"}, {"free", "lifesaving", "effective"}, {"experimental", "rushed", "forced"}}},
};
const std::vector<std::string> kSharedAdjectives = {"new", "big", "latest", "current"};

const std::vector<std::pair<std::string, double>> kDomains = {
    {"bluepost.com", 0.0},    {"dailyleft.org", 0.25},   {"centerwire.net", 0.5},
    {"rightreport.co.uk", 0.75}, {"redherald.com", 1.0},
};

const std::vector<std::string> kStopwordFillers = {"the", "a", "and", "of", "to", "in", "is", "for", "on", "with"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return uniform() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

std::ofstream open_out(const fs::path& path, std::vector<fs::path>& written) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  written.push_back(path);
  return out;
}

struct User {
  std::string id;
  bool liberal = true;
  bool elite = false;
  bool shares_urls = true;
  double activity = 1.0;
};

/// Relative weight of issue `i` for a group on day `t` (0 = first day).
double issue_weight(Issue i, bool liberal, double t, double split_t) {
  switch (i) {
    case Issue::origins: return liberal ? 0.6 : 1.6 * std::exp(-t / 300.0) + 0.4;
    case Issue::lockdowns: return liberal ? 0.9 : 1.4;
    case Issue::masking: return 1.1;
    case Issue::education: {
      double autumn = std::exp(-std::pow((t - 90.0) / 40.0, 2.0));
      return liberal ? 0.9 + 1.2 * autumn : 0.5 + 0.4 * autumn;
    }
    case Issue::vaccines:
      if (t < split_t) return 0.3;
      if (liberal) return t < split_t + 150 ? 2.0 : 1.0;
      return t < split_t + 150 ? 0.8 : 1.8;
  }
  return 1.0;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string lemma_of(const std::string& form) {
  std::string lower;
  for (char c : form) lower += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  return lower;
}

std::vector<std::string> split_words(const std::string& phrase) {
  std::vector<std::string> out;
  std::istringstream in(phrase);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

void write_vector(std::ostream& out, const std::string& word, const std::vector<double>& v) {
  out << word;
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %.6f", x);
    out << buf;
  }
  out << '\n';
}

}  // namespace

std::span<const SampleTweet> sample_issue_tweets() { return kSamples; }

std::vector<fs::path> write_fixture(const fs::path& dir, const SynthOptions& opt) {
  if (opt.users < 4 || opt.elites < 2 || opt.elites >= opt.users || opt.tweets < 1 || opt.last_day < opt.first_day) {
    throw ArgumentError("invalid synthetic fixture options");
  }
  std::vector<fs::path> written;
  Gen gen(opt.seed);
  fs::create_directories(dir);

  // Users: alternate groups; every (users / elites)-th account is elite.
  std::vector<User> users;
  const int elite_every = opt.users / opt.elites;
  for (int u = 0; u < opt.users; ++u) {
    char id[16];
    std::snprintf(id, sizeof id, "u%05d", u + 1);
    User user{id, u % 2 == 0, u % elite_every == 0 && u / elite_every < opt.elites, true, 1.0};
    user.shares_urls = user.elite || gen.chance(0.75);
    user.activity = user.elite ? 3.0 : 0.5 + gen.uniform();
    users.push_back(user);
  }
  std::vector<double> activity;
  for (const auto& u : users) activity.push_back(u.activity);
  std::discrete_distribution<std::size_t> pick_user(activity.begin(), activity.end());

  // Daily moral intensities: persistent for liberals, noisy for conservatives.
  const auto days = static_cast<std::size_t>((opt.last_day - opt.first_day).count()) + 1;
  const double split_t = static_cast<double>((Day{std::chrono::year{2020} / 12 / 11} - opt.first_day).count());
  std::array<std::vector<double>, kMoralCategoryCount> lib_intensity, con_intensity;
  for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
    double state = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
      state = 0.97 * state + gen.normal(0.08);
      lib_intensity[k].push_back(std::exp(state));
      con_intensity[k].push_back(std::exp(gen.normal(0.45)));
    }
  }

  // Tweets.
  {
    auto out = open_out(dir / "tweets.jsonl", written);
    const auto per_day = static_cast<std::size_t>(opt.tweets) / days;
    const auto remainder = static_cast<std::size_t>(opt.tweets) % days;
    std::uint64_t next_id = 1000000;
    for (std::size_t d = 0; d < days; ++d) {
      const double t = static_cast<double>(d);
      const std::size_t n_today = per_day + (d < remainder ? 1 : 0);
      std::vector<TweetRecord> today;
      for (std::size_t n = 0; n < n_today; ++n) {
        const User& user = users[pick_user(gen.engine())];
        TweetRecord rec;
        rec.id = std::to_string(next_id++);
        rec.user_id = user.id;
        rec.created_at = Timestamp{opt.first_day} + std::chrono::seconds{static_cast<long>(gen.index(86400))};
        double r = gen.uniform();
        rec.kind = user.elite ? (r < 0.85 ? TweetKind::original : TweetKind::reply)
                              : (r < 0.6 ? TweetKind::original : r < 0.9 ? TweetKind::retweet : TweetKind::reply);
        rec.created_at += std::chrono::days{static_cast<long>(d)};

        // Chunks are shuffled as units so multi-word phrases stay intact.
        std::vector<std::string> words;
        const auto n_fill = 5 + gen.index(6);
        for (std::size_t i = 0; i < n_fill; ++i) words.push_back(gen.pick(kFiller));
        if (gen.chance(0.5)) words.push_back(gen.pick(kStopwordFillers));
        if (gen.chance(0.7)) words.push_back(gen.pick(user.liberal ? kLiberalWords : kConservativeWords));

        std::optional<Issue> issue;
        if (gen.chance(0.55)) {
          std::vector<double> w;
          for (Issue i : kAllIssues) w.push_back(issue_weight(i, user.liberal, t, split_t));
          std::discrete_distribution<std::size_t> pick_issue(w.begin(), w.end());
          issue = kAllIssues[pick_issue(gen.engine())];
          words.push_back(gen.pick(kIssuePhrases.at(*issue)));
        }
        const auto& base = user.liberal ? kLiberalMoral : kConservativeMoral;
        const auto& intensity = user.liberal ? lib_intensity : con_intensity;
        for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
          double p = base[k] * intensity[k][d] * (issue ? 1.0 : 0.3) * (user.elite ? 1.6 : 1.0);
          if (gen.chance(std::min(p, 0.9))) words.push_back(gen.pick(kMoralWords[k]));
        }
        std::shuffle(words.begin(), words.end(), gen.engine());
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        text = capitalize(text);
        if (rec.kind == TweetKind::retweet) text = "RT @" + gen.pick(users).id + ": " + text;
        if (gen.chance(0.3)) text += " @" + gen.pick(users).id;
        rec.text = text;

        if (user.shares_urls && gen.chance(0.35)) {
          // Mostly same-side outlets, sometimes the centre or the other side.
          double s = gen.uniform();
          std::size_t dom = s < 0.75 ? (user.liberal ? gen.index(2) : 3 + gen.index(2)) : s < 0.9 ? 2
                                                                                 : (user.liberal ? 3 + gen.index(2) : gen.index(2));
          rec.urls.push_back("https://www." + kDomains[dom].first + "/story/" + std::to_string(gen.index(100000)));
          if (gen.chance(0.1)) rec.urls.push_back("https://example.org/page");
        }
        today.push_back(std::move(rec));
      }
      std::stable_sort(today.begin(), today.end(),
                       [](const TweetRecord& a, const TweetRecord& b) { return a.created_at < b.created_at; });
      for (const auto& rec : today) out << to_json(rec).dump() << '\n';
    }
  }

  // Curated lexicon.
  {
    auto out = open_out(dir / "lexicon.tsv", written);
    out << "# issue\tphrase\n";
    for (const auto& [issue, phrases] : kIssuePhrases) {
      for (const auto& p : phrases) out << to_string(issue) << '\t' << p << '\n';
    }
  }

  // Media-bias table.
  {
    auto out = open_out(dir / "bias.csv", written);
    out << "domain,score\n";
    for (const auto& [domain, score] : kDomains) out << domain << ',' << score << '\n';
  }

  // Moral seed lexicon: every listed word, with a stem entry for the first.
  {
    auto out = open_out(dir / "moral_lexicon.tsv", written);
    out << "# category\tword\n";
    for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
      const auto name = to_string(static_cast<MoralCategory>(k));
      for (std::size_t w = 0; w < kMoralWords[k].size(); ++w) {
        out << name << '\t' << kMoralWords[k][w] << (w == 0 ? "*" : "") << '\n';
      }
    }
  }

  // Embeddings. Dimension 0 separates the ideological vocabularies, 1..10
  // are the moral categories, the rest carry topical noise.
  {
    constexpr std::size_t dim = 16;
    std::map<std::string, std::vector<double>> vectors;
    auto noise = [&](double sd) {
      std::vector<double> v(dim);
      for (double& x : v) x = gen.normal(sd);
      return v;
    };
    auto add = [&](const std::string& word, std::vector<double> v) {
      for (const auto& tok : normalize(word)) vectors.emplace(tok, v);
    };
    for (const auto& w : kFiller) add(w, noise(0.04));
    for (const auto& w : kStopwordFillers) add(w, noise(0.02));
    for (const auto& w : kLiberalWords) {
      auto v = noise(0.05);
      v[0] = -0.8;
      add(w, v);
    }
    for (const auto& w : kConservativeWords) {
      auto v = noise(0.05);
      v[0] = 0.8;
      add(w, v);
    }
    for (const auto& [issue, phrases] : kIssuePhrases) {
      for (const auto& p : phrases) {
        for (const auto& tok : split_words(p)) {
          auto v = noise(0.03);
          v[11 + static_cast<std::size_t>(issue)] = 0.3;
          add(tok, v);
        }
      }
    }
    for (std::size_t k = 0; k < kMoralCategoryCount; ++k) {
      for (const auto& w : kMoralWords[k]) {
        auto v = noise(0.08);
        v[1 + k] = 1.0;
        add(w, v);
      }
    }
    auto out = open_out(dir / "embeddings.vec", written);
    out << vectors.size() << ' ' << dim << '\n';
    for (const auto& [word, v] : vectors) write_vector(out, word, v);
  }

  // Elite roster.
  {
    auto out = open_out(dir / "roster.txt", written);
    out << "# elite accounts\n";
    for (const auto& u : users) {
      if (u.elite) out << u.id << '\n';
    }
  }

  // Dependency parses: "the ADJ ANCHOR spread ." with the adjective as an
  // amod of the anchor head.
  {
    auto out = open_out(dir / "parses.conllu", written);
    for (int s = 0; s < opt.sentences; ++s) {
      const User& user = users[gen.index(users.size())];
      Issue issue = kAllIssues[gen.index(std::size(kAllIssues))];
      const auto& spec = kFrames.at(issue);
      auto anchor = split_words(gen.pick(spec.anchors));
      const std::string& adj = gen.chance(0.7) ? gen.pick(user.liberal ? spec.liberal : spec.conservative)
                                               : gen.pick(kSharedAdjectives);
      const std::string verb = gen.chance(0.5) ? "spread" : "continue";
      const int head = 2 + static_cast<int>(anchor.size());  // last anchor token
      const int root = head + 1;

      std::string text = "The " + adj;
      for (const auto& a : anchor) text += " " + a;
      text += " " + verb + " .";
      out << "# sent_id = s" << (s + 1) << '\n';
      out << "# user_id = " << user.id << '\n';
      out << "# text = " << text << '\n';
      out << "1\tThe\tthe\tDET\tDT\t_\t" << head << "\tdet\t_\t_\n";
      out << "2\t" << adj << '\t' << lemma_of(adj) << "\tADJ\tJJ\t_\t" << head << "\tamod\t_\t_\n";
      for (std::size_t a = 0; a < anchor.size(); ++a) {
        const bool last = a + 1 == anchor.size();
        out << (3 + a) << '\t' << anchor[a] << '\t' << lemma_of(anchor[a]) << "\tNOUN\tNN\t_\t"
            << (last ? root : head) << '\t' << (last ? "nsubj" : "compound") << "\t_\t_\n";
      }
      out << root << '\t' << verb << '\t' << verb << "\tVERB\tVBP\t_\t0\troot\t_\t_\n";
      out << (root + 1) << "\t.\t.\tPUNCT\t.\t_\t" << root << "\tpunct\t_\t_\n\n";
    }
  }

  // Issue and baseline documents for lexicon induction.
  {
    constexpr int kDocsPerIssue = 12;
    constexpr int kBaselineDocs = 40;
    auto background_text = [&](std::size_t n) {
      std::string text;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& w = gen.chance(0.3) ? gen.pick(kStopwordFillers) : gen.pick(kFiller);
        text += (text.empty() ? "" : " ") + w;
      }
      return text;
    };
    for (const auto& [issue, phrases] : kIssuePhrases) {
      for (int d = 0; d < kDocsPerIssue; ++d) {
        std::string text = background_text(150);
        for (int s = 0; s < 20; ++s) {
          text += ". " + (gen.chance(0.5) ? gen.pick(phrases) : gen.pick(kIssueVocab.at(issue)));
          text += " " + background_text(4);
        }
        char name[32];
        std::snprintf(name, sizeof name, "doc%02d.txt", d + 1);
        auto out = open_out(dir / "issue_docs" / std::string(to_string(issue)) / name, written);
        out << text << '\n';
      }
    }
    for (int d = 0; d < kBaselineDocs; ++d) {
      char name[32];
      std::snprintf(name, sizeof name, "doc%02d.txt", d + 1);
      auto out = open_out(dir / "baseline_docs" / name, written);
      out << background_text(300) << '\n';
    }
  }

  // Pipeline config with paths relative to the fixture directory.
  {
    auto out = open_out(dir / "config.toml", written);
    out << "# Synthetic fixture pipeline\n"
           "[paths]\n"
           "tweets = \"tweets.jsonl\"\n"
           "lexicon = \"lexicon.tsv\"\n"
           "bias_table = \"bias.csv\"\n"
           "embeddings = \"embeddings.vec\"\n"
           "moral_lexicon = \"moral_lexicon.tsv\"\n"
           "roster = \"roster.txt\"\n"
           "conllu = \"parses.conllu\"\n"
           "issue_docs = \"issue_docs\"\n"
           "baseline_docs = \"baseline_docs\"\n"
           "output_dir = \"out\"\n"
           "\n[run]\n"
           "seed = "
        << opt.seed
        << "\nthreads = 1\n"
           "\n[induce]\nlambda = 1.0\ntop_k = 25\n"
           "\n[ideology]\nl2 = 0.01\nclass_weight = \"balanced\"\n"
           "\n[moral]\nmethod = \"ddr\"\n"
           "\n[series]\nwindow = 7\n"
           "\n[acf]\nmax_lag = 60\nsplit = 2020-12-11\n"
           "\n[framing]\nalpha = 0.5\ntop_k = 10\nmin_count = 5\n"
           "\n[elites]\nbootstrap = 100\n";
  }

  for (auto& p : written) {
    if (!fs::exists(p)) throw IoError("fixture file missing after write: " + p.string());
  }
  return written;
}

}  // namespace wedgepipe
