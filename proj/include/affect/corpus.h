#ifndef AFFECT_CORPUS_H_
#define AFFECT_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "affect/sentiment.h"

namespace affect {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL-U. line() is the 1-based input line that triggered it.
class ConlluError : public CorpusError {
 public:
  ConlluError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

class SstError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

class EmbeddingError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

class AbsaError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

class AlignmentError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

// ---------------------------------------------------------------------------
// Dependency parses

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;  // 0 = root
  std::string deprel;
  std::optional<char> chunk_tag;  // 'B', 'I' or 'O'

  bool operator==(const Token&) const = default;
};

bool IsUniversalPos(std::string_view tag);

struct DepTree {
  std::string sentence_id;
  std::vector<Token> tokens;
  int root_index = 0;

  int size() const { return static_cast<int>(tokens.size()); }
  bool ValidIndex(int index) const { return index >= 1 && index <= size(); }
  // Throws std::out_of_range for an invalid index.
  const Token& token(int index) const;

  // children[i] lists the dependents of token i in ascending order;
  // children[0] holds the root.
  std::vector<std::vector<int>> ChildLists() const;
  std::vector<int> Children(int index) const;
  // The token and all its descendants, ascending.
  std::vector<int> Subtree(int index) const;
  // True if `ancestor` lies on the head path from `node` (exclusive of node).
  bool IsProperAncestor(int ancestor, int node) const;
  bool HasChunkTags() const;

  // Checks every structural invariant; throws CorpusError on violation.
  void Validate() const;

  bool operator==(const DepTree&) const = default;
};

// Reads blank-line separated 10-column CoNLL-U blocks. Multiword-token ranges
// and empty nodes are skipped. `# sent_id = X` names a sentence; otherwise
// sentences are numbered from 1.
std::vector<DepTree> ParseConllu(std::istream& in);
std::vector<DepTree> ParseConlluFile(const std::filesystem::path& path);
std::string SerializeConllu(std::span<const DepTree> trees);

// ---------------------------------------------------------------------------
// Sentiment treebank

struct Span {
  int begin = 0;  // inclusive, 0-based
  int end = 0;    // exclusive

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

struct SstTree {
  int label = 2;  // 0..4
  std::vector<SstTree> children;
  std::optional<std::string> token;  // leaves only
  Span span;

  bool IsLeaf() const { return children.empty(); }
  std::vector<std::string> Leaves() const;
};

std::vector<SstTree> ParseSst(std::istream& in);
SstTree ParseSstLine(std::string_view line);
std::vector<SstTree> ParseSstFile(const std::filesystem::path& path);

// Token normalisation used for treebank/parse alignment: PTB bracket escapes
// undone, quotes unified, ASCII lowercased.
std::string NormalizeToken(std::string_view token);

// Node-level supervision: token index -> coarse sentiment for every dependency
// node whose sub-tree covers a contiguous span that is also a treebank
// constituent. The dependency root always carries the treebank root label.
std::map<int, Sentiment> ProjectSstLabels(const DepTree& dep, const SstTree& sst);

// ---------------------------------------------------------------------------
// Word embeddings

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 0);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  bool Contains(std::string_view token) const;
  // The stored vector, or the all-zeros OOV vector.
  std::span<const double> Lookup(std::string_view token) const;
  std::span<const double> oov_vector() const { return oov_; }

  // Throws EmbeddingError on a wrong dimension or a non-finite component.
  void Insert(std::string token, std::vector<double> vector);

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> oov_;
};

// Reads `token v1 ... vd` lines. Only tokens in `vocab` are retained. The
// dimension is taken from `expected_dim` when non-zero, otherwise from the
// first line; every line must agree.
EmbeddingTable LoadEmbeddings(std::istream& in, const std::unordered_set<std::string>& vocab,
                              std::size_t expected_dim = 0);
// Same, keeping every token.
EmbeddingTable LoadAllEmbeddings(std::istream& in, std::size_t expected_dim = 0);

// ---------------------------------------------------------------------------
// Aspect-based sentiment gold data

struct GoldAspect {
  std::string target;
  Sentiment polarity = Sentiment::kNeutral;
  std::optional<int> from;  // character offsets into the text, when known
  std::optional<int> to;

  bool operator==(const GoldAspect&) const = default;
};

struct AbsaRecord {
  std::string sentence_id;
  std::string text;
  std::vector<GoldAspect> aspects;

  bool operator==(const AbsaRecord&) const = default;
};

// SemEval-style XML or line-delimited JSON, chosen by the first
// non-whitespace byte. Aspects targeting "NULL" are dropped.
std::vector<AbsaRecord> LoadAbsa(std::istream& in);
std::vector<AbsaRecord> LoadAbsaFile(const std::filesystem::path& path);

}  // namespace affect

#endif  // AFFECT_CORPUS_H_
