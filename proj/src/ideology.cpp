#include "wedgepipe/ideology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>

#include "wedgepipe/errors.hpp"
#include "wedgepipe/public_suffix.hpp"

namespace wedgepipe {

std::string_view to_string(Leaning l) { return l == Leaning::liberal ? "liberal" : "conservative"; }

std::string_view to_string(UrlLabel l) {
  switch (l) {
    case UrlLabel::liberal: return "liberal";
    case UrlLabel::conservative: return "conservative";
    case UrlLabel::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Leaning> parse_leaning(std::string_view s) {
  if (s == "liberal") return Leaning::liberal;
  if (s == "conservative") return Leaning::conservative;
  return std::nullopt;
}

std::optional<UrlLabel> parse_url_label(std::string_view s) {
  if (s == "liberal") return UrlLabel::liberal;
  if (s == "conservative") return UrlLabel::conservative;
  if (s == "unlabeled") return UrlLabel::unlabeled;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim_lower(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\"");
  std::string out(s.substr(b, e - b + 1));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

DomainBiasTable DomainBiasTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read bias table " + path.string());
  return parse(in);
}

DomainBiasTable DomainBiasTable::parse(std::istream& in) {
  DomainBiasTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = trim_lower(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected domain,score", lineno);
    std::string domain = trim_lower(std::string_view(line).substr(0, comma));
    std::string value = trim_lower(std::string_view(line).substr(comma + 1));
    if (lineno == 1 && domain == "domain") continue;
    char* end = nullptr;
    double score = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) throw ParseError("bad score \"" + value + "\"", lineno);
    try {
      table.insert(domain, score);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return table;
}

void DomainBiasTable::insert(std::string_view domain, double score) {
  static constexpr double kScale[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  bool ok = std::any_of(std::begin(kScale), std::end(kScale), [&](double s) { return std::abs(s - score) < 1e-9; });
  if (!ok) throw ArgumentError("bias score must be one of 0, 0.25, 0.5, 0.75, 1");
  std::string key = trim_lower(domain);
  if (key.empty()) throw ArgumentError("empty domain");
  scores_[key] = score;
}

std::optional<double> DomainBiasTable::score(std::string_view domain) const {
  auto it = scores_.find(std::string(domain));
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> extract_pld(std::string_view url) {
  auto host = url_host(url);
  if (!host) return std::nullopt;
  return PublicSuffixList::bundled().registrable_domain(*host);
}

std::optional<double> score_user(std::span<const std::string> urls, const DomainBiasTable& table) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& url : urls) {
    auto pld = extract_pld(url);
    if (!pld) continue;
    if (auto s = table.score(*pld)) {
      sum += *s;
      ++hits;
    }
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

UrlLabel binarize(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw ArgumentError("ideology score must lie in [0, 1]");
  if (score <= 0.4) return UrlLabel::liberal;
  if (score >= 0.6) return UrlLabel::conservative;
  return UrlLabel::unlabeled;
}

std::vector<double> embed_user(std::span<const TokenSeq> tweets, const EmbeddingTable& table, bool* all_oov) {
  std::vector<double> mean(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tweet : tweets) {
    for (const auto& tok : tweet) {
      if (auto v = table.find(tok)) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += (*v)[k];
        ++hits;
      }
    }
  }
  if (hits > 0) {
    for (double& x : mean) x /= static_cast<double>(hits);
  }
  if (all_oov) *all_oov = hits == 0;
  return mean;
}

// ---------------------------------------------------------------------------

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_training_shape(std::span<const double> w, const Matrix& x, std::span<const int> y,
                          std::span<const double> sw) {
  if (w.size() != x.cols) throw ArgumentError("weight dimension does not match features");
  if (y.size() != x.rows) throw ArgumentError("label count does not match feature rows");
  if (!sw.empty() && sw.size() != x.rows) throw ArgumentError("sample weight count does not match rows");
}

}  // namespace

double lr_loss(std::span<const double> w, double b, const Matrix& x, std::span<const int> y, double l2,
               std::span<const double> sw) {
  check_training_shape(w, x, y, sw);
  double total = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double z = dot(w, x.row(i)) + b;
    double wi = sw.empty() ? 1.0 : sw[i];
    total += wi * (softplus(z) - (y[i] ? z : 0.0));
    norm += wi;
  }
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return total / norm + 0.5 * l2 * reg;
}

std::vector<double> lr_gradient(std::span<const double> w, double b, const Matrix& x, std::span<const int> y,
                                double l2, std::span<const double> sw) {
  check_training_shape(w, x, y, sw);
  std::vector<double> g(x.cols + 1, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double wi = sw.empty() ? 1.0 : sw[i];
    double r = wi * (sigmoid(dot(w, row) + b) - (y[i] ? 1.0 : 0.0));
    for (std::size_t k = 0; k < x.cols; ++k) g[k] += r * row[k];
    g[x.cols] += r;
    norm += wi;
  }
  for (double& v : g) v /= norm;
  for (std::size_t k = 0; k < x.cols; ++k) g[k] += l2 * w[k];
  return g;
}

LrModel train_lr(const Matrix& features, std::span<const int> labels, const LrOptions& options) {
  if (labels.size() != features.rows) throw ArgumentError("label count does not match feature rows");
  if (!(options.l2 >= 0.0) || !(options.learning_rate > 0.0) || !(options.tol > 0.0)) {
    throw ArgumentError("l2 must be >= 0; learning_rate and tol must be > 0");
  }
  for (double v : features.data) {
    if (!std::isfinite(v)) throw TrainingError("non-finite feature value");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw ArgumentError("labels must be 0 or 1");
  }

  // Optional seeded row subset.
  Matrix x;
  std::vector<int> y;
  if (options.subsample < 1.0) {
    if (!(options.subsample > 0.0)) throw ArgumentError("subsample must be in (0, 1]");
    std::vector<std::size_t> all(features.rows), picked;
    std::iota(all.begin(), all.end(), 0);
    auto keep = static_cast<std::size_t>(std::ceil(options.subsample * static_cast<double>(features.rows)));
    std::mt19937_64 rng(options.seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), keep, rng);
    x = Matrix(picked.size(), features.cols);
    for (std::size_t i = 0; i < picked.size(); ++i) {
      auto src = features.row(picked[i]);
      std::copy(src.begin(), src.end(), x.row(i).begin());
      y.push_back(labels[picked[i]]);
    }
  } else {
    x = features;
    y.assign(labels.begin(), labels.end());
  }

  std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (positives == 0 || positives == y.size()) throw TrainingError("training data must contain both classes");

  std::vector<double> sw;
  if (options.balanced) {
    double n = static_cast<double>(y.size());
    double w1 = n / (2.0 * static_cast<double>(positives));
    double w0 = n / (2.0 * static_cast<double>(y.size() - positives));
    for (int v : y) sw.push_back(v ? w1 : w0);
  }

  LrModel model;
  model.l2 = options.l2;
  model.weights.assign(x.cols, 0.0);
  double loss = lr_loss(model.weights, model.bias, x, y, options.l2, sw);
  if (options.record_trace) model.loss_trace.push_back(loss);

  std::vector<double> trial_w(x.cols);
  int iter = 0;
  while (iter < options.max_iter) {
    auto grad = lr_gradient(model.weights, model.bias, x, y, options.l2, sw);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < options.tol) {
      model.converged = true;
      break;
    }
    ++iter;
    double step = options.learning_rate;
    bool moved = false;
    while (step > 1e-20) {
      for (std::size_t k = 0; k < x.cols; ++k) trial_w[k] = model.weights[k] - step * grad[k];
      double trial_b = model.bias - step * grad[x.cols];
      double trial_loss = lr_loss(trial_w, trial_b, x, y, options.l2, sw);
      if (trial_loss <= loss) {
        model.weights = trial_w;
        model.bias = trial_b;
        loss = trial_loss;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (options.record_trace) model.loss_trace.push_back(loss);
    if (!moved) {
      model.converged = true;
      break;
    }
  }
  model.iterations = iter;
  model.final_loss = loss;
  return model;
}

Prediction predict(const LrModel& model, std::span<const double> features) {
  if (features.size() != model.weights.size()) throw ArgumentError("feature dimension does not match model");
  double p = sigmoid(dot(model.weights, features) + model.bias);
  return {p >= 0.5 ? Leaning::conservative : Leaning::liberal, p};
}

Agreement agreement(const std::map<std::string, Leaning>& truth, const std::map<std::string, Leaning>& other) {
  std::size_t tp = 0, fp = 0, fn = 0, agree = 0, shared = 0;
  for (const auto& [user, t] : truth) {
    auto it = other.find(user);
    if (it == other.end()) continue;
    ++shared;
    Leaning o = it->second;
    if (t == o) ++agree;
    if (t == Leaning::conservative && o == Leaning::conservative) ++tp;
    if (t == Leaning::liberal && o == Leaning::conservative) ++fp;
    if (t == Leaning::conservative && o == Leaning::liberal) ++fn;
  }
  if (shared == 0) throw ArgumentError("label maps share no users");
  Agreement a;
  a.shared = shared;
  std::size_t denom = 2 * tp + fp + fn;
  a.f1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  a.jaccard = static_cast<double>(agree) / static_cast<double>(shared);
  return a;
}

}  // namespace wedgepipe
