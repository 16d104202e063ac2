#include "wedgepipe/embeddings.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wedgepipe/errors.hpp"

namespace wedgepipe {

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embeddings " + path.string());
  return parse(in);
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file", 1);
  std::istringstream header(line);
  long long vocab = -1, dim = -1;
  if (!(header >> vocab >> dim) || vocab < 0 || dim <= 0) {
    throw ParseError("expected header \"<vocab_size> <dim>\"", 1);
  }

  EmbeddingTable table(static_cast<std::size_t>(dim));
  std::vector<double> row(table.dim_);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw ParseError("expected token followed by values", lineno);
    std::string token = line.substr(0, sp);
    const char* p = line.c_str() + sp;
    std::size_t k = 0;
    while (true) {
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      if (k == table.dim_) throw ParseError("too many values for token " + token, lineno);
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p || !std::isfinite(v)) throw ParseError("bad value for token " + token, lineno);
      row[k++] = v;
      p = end;
    }
    if (k != table.dim_) throw ParseError("expected " + std::to_string(table.dim_) + " values for " + token, lineno);
    if (!table.contains(token)) table.insert(token, row);
  }
  return table;
}

void EmbeddingTable::insert(const std::string& token, std::span<const double> vec) {
  if (dim_ == 0) dim_ = vec.size();
  if (vec.size() != dim_) throw ArgumentError("embedding dimension mismatch for " + token);
  for (double v : vec) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite embedding entry for " + token);
  }
  auto [it, inserted] = index_.emplace(token, data_.size() / dim_);
  if (inserted) {
    data_.insert(data_.end(), vec.begin(), vec.end());
  } else {
    std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
  }
}

std::optional<std::span<const double>> EmbeddingTable::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(data_.data() + it->second * dim_, dim_);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace wedgepipe
