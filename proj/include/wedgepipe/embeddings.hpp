#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace wedgepipe {

/// Word vectors of one fixed dimension, read from the word2vec/fastText
/// text format: a `<vocab_size> <dim>` header, then `token v1 ... vd` lines.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  /// Throws IoError / ParseError. Rows with the wrong arity or non-finite
  /// values are parse errors; a repeated token keeps its first vector.
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::istream& in);

  /// Adds or replaces a vector. Throws ArgumentError on a dimension mismatch
  /// or non-finite entry.
  void insert(const std::string& token, std::span<const double> vec);

  std::optional<std::span<const double>> find(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace wedgepipe
