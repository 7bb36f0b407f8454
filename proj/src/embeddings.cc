#include <charconv>
#include <cmath>
#include <istream>

#include "affect/corpus.h"

namespace affect {
namespace {

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

EmbeddingTable Load(std::istream& in, const std::unordered_set<std::string>* vocab,
                    std::size_t expected_dim) {
  std::size_t dim = expected_dim;
  std::vector<std::pair<std::string, std::vector<double>>> kept;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitSpaces(line);
    if (fields.empty()) continue;
    if (dim == 0) {
      if (fields.size() < 2) {
        throw EmbeddingError("line " + std::to_string(line_no) + ": no vector components");
      }
      dim = fields.size() - 1;
    }
    if (fields.size() < dim + 1) {
      throw EmbeddingError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(dim) + " components, found " +
                           std::to_string(fields.size() - 1));
    }
    // Tokens may contain spaces; the trailing `dim` fields are the vector.
    const std::size_t token_fields = fields.size() - dim;
    if (token_fields > 1 && expected_dim == 0) {
      throw EmbeddingError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(dim) + " components, found " +
                           std::to_string(fields.size() - 1));
    }
    std::string token(fields[0]);
    for (std::size_t k = 1; k < token_fields; ++k) {
      token += ' ';
      token += fields[k];
    }
    if (vocab != nullptr && !vocab->contains(token)) continue;

    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const std::string_view f = fields[token_fields + k];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw EmbeddingError("line " + std::to_string(line_no) + ": non-numeric component '" +
                             std::string(f) + "'");
      }
      values[k] = v;
    }
    kept.emplace_back(std::move(token), std::move(values));
  }
  EmbeddingTable table(dim);
  for (auto& [token, values] : kept) table.Insert(std::move(token), std::move(values));
  return table;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension)
    : dimension_(dimension), oov_(dimension, 0.0) {}

bool EmbeddingTable::Contains(std::string_view token) const {
  return vectors_.find(std::string(token)) != vectors_.end();
}

std::span<const double> EmbeddingTable::Lookup(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  if (it == vectors_.end()) return oov_;
  return it->second;
}

void EmbeddingTable::Insert(std::string token, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw EmbeddingError("embedding for '" + token + "' has " + std::to_string(vector.size()) +
                         " components, table dimension is " + std::to_string(dimension_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw EmbeddingError("non-finite component for '" + token + "'");
  }
  vectors_[std::move(token)] = std::move(vector);
}

EmbeddingTable LoadEmbeddings(std::istream& in, const std::unordered_set<std::string>& vocab,
                              std::size_t expected_dim) {
  return Load(in, &vocab, expected_dim);
}

EmbeddingTable LoadAllEmbeddings(std::istream& in, std::size_t expected_dim) {
  return Load(in, nullptr, expected_dim);
}

}  // namespace affect
