#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wedgepipe/corpus.hpp"
#include "wedgepipe/embeddings.hpp"

namespace wedgepipe {

enum class Leaning : std::uint8_t { liberal, conservative };
enum class UrlLabel : std::uint8_t { liberal, conservative, unlabeled };

std::string_view to_string(Leaning l);
std::string_view to_string(UrlLabel l);
std::optional<Leaning> parse_leaning(std::string_view s);
std::optional<UrlLabel> parse_url_label(std::string_view s);

/// Media-bias scores per pay-level domain, restricted to {0, .25, .5, .75, 1}.
class DomainBiasTable {
 public:
  /// Reads `domain,score` rows. A header row starting with "domain" is
  /// skipped, as are blank lines and '#' comments.
  static DomainBiasTable load(const std::filesystem::path& path);
  static DomainBiasTable parse(std::istream& in);

  /// Throws ArgumentError for scores outside the five-point scale.
  void insert(std::string_view domain, double score);
  std::optional<double> score(std::string_view domain) const;
  std::size_t size() const noexcept { return scores_.size(); }

 private:
  std::unordered_map<std::string, double> scores_;
};

/// Registrable domain of a URL under the bundled public-suffix rules;
/// nullopt means the URL should be skipped.
std::optional<std::string> extract_pld(std::string_view url);

/// Occurrence-weighted mean bias over the URLs whose domain is in the table;
/// nullopt when none is.
std::optional<double> score_user(std::span<const std::string> urls, const DomainBiasTable& table);

/// <= 0.4 liberal, >= 0.6 conservative, otherwise unlabeled.
UrlLabel binarize(double score);

/// Mean token vector over all in-vocabulary tokens of all tweets. If every
/// token is out of vocabulary the result is the zero vector and `all_oov`
/// (when given) is set.
std::vector<double> embed_user(std::span<const TokenSeq> tweets, const EmbeddingTable& table,
                               bool* all_oov = nullptr);

// ---------------------------------------------------------------------------
// Logistic regression

/// Dense row-major feature matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct LrOptions {
  double l2 = 0.01;
  double learning_rate = 1.0;
  double tol = 1e-6;
  int max_iter = 5000;
  std::uint64_t seed = 0;
  /// Weight classes inversely to their frequency.
  bool balanced = false;
  /// Fraction of training rows used; below 1 a seeded subset is drawn.
  double subsample = 1.0;
  bool record_trace = false;
};

struct LrModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  int iterations = 0;
  double final_loss = 0.0;
  bool converged = false;
  std::vector<double> loss_trace;  ///< loss before the first step and after each step
};

/// Per-example weighted mean log-loss plus (l2/2)||w||^2; the bias is not
/// penalized. `sample_weights` may be empty (all ones).
double lr_loss(std::span<const double> weights, double bias, const Matrix& x, std::span<const int> y, double l2,
               std::span<const double> sample_weights = {});

/// Gradient of lr_loss; the last entry is the bias derivative.
std::vector<double> lr_gradient(std::span<const double> weights, double bias, const Matrix& x, std::span<const int> y,
                                double l2, std::span<const double> sample_weights = {});

/// Full-batch gradient descent from zero. A step that would raise the loss is
/// halved until it does not, so the loss sequence is non-increasing. Stops
/// when the gradient max-norm falls below tol or after max_iter steps.
/// Labels are 0 (liberal) / 1 (conservative); both classes must be present,
/// otherwise TrainingError.
LrModel train_lr(const Matrix& features, std::span<const int> labels, const LrOptions& options);

struct Prediction {
  Leaning label = Leaning::liberal;
  double probability = 0.5;  ///< probability of conservative
};

/// Conservative iff probability >= 0.5. Throws ArgumentError on a dimension
/// mismatch.
Prediction predict(const LrModel& model, std::span<const double> features);

double sigmoid(double z);

// ---------------------------------------------------------------------------

struct Agreement {
  double f1 = 0.0;
  double jaccard = 0.0;
  std::size_t shared = 0;
};

/// Agreement over the users present in both maps, `truth` as reference and
/// conservative as the positive class. Throws ArgumentError if no user is
/// shared.
Agreement agreement(const std::map<std::string, Leaning>& truth, const std::map<std::string, Leaning>& other);

}  // namespace wedgepipe
