#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "affect/corpus.h"

namespace affect {
namespace {

constexpr std::array<std::string_view, 17> kUniversalPos = {
    "ADJ",   "ADP",  "ADV",  "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
    "PART",  "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::optional<int> ParseInt(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<char> ChunkFromMisc(const std::string& misc, int line) {
  if (misc == "_" || misc.empty()) return std::nullopt;
  std::size_t start = 0;
  while (start <= misc.size()) {
    std::size_t bar = misc.find('|', start);
    if (bar == std::string::npos) bar = misc.size();
    const std::string_view item(misc.data() + start, bar - start);
    if (item.starts_with("Chunk=")) {
      const std::string_view value = item.substr(6);
      if (value == "B" || value == "I" || value == "O") return value[0];
      throw ConlluError(line, "invalid chunk tag '" + std::string(value) + "'");
    }
    start = bar + 1;
  }
  return std::nullopt;
}

struct PendingSentence {
  std::string sentence_id;
  std::vector<Token> tokens;
  std::vector<int> lines;  // input line of each token
  int first_line = 0;
};

DepTree Finish(PendingSentence& pending, int ordinal) {
  DepTree tree;
  tree.sentence_id = pending.sentence_id.empty() ? std::to_string(ordinal)
                                                 : pending.sentence_id;
  tree.tokens = std::move(pending.tokens);
  const int n = tree.size();

  int root = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = tree.tokens[i];
    const int line = pending.lines[i];
    if (t.head < 0 || t.head > n) {
      throw ConlluError(line, "head " + std::to_string(t.head) + " out of range 1.." +
                                  std::to_string(n));
    }
    if (t.head == t.index) throw ConlluError(line, "token is its own head (cycle)");
    if (t.head == 0) {
      if (root != 0) {
        throw ConlluError(line, "duplicate root: tokens " + std::to_string(root) + " and " +
                                    std::to_string(t.index));
      }
      root = t.index;
    }
  }
  if (n > 0 && root == 0) throw ConlluError(pending.first_line, "sentence has no root");
  tree.root_index = root;

  for (int i = 0; i < n; ++i) {
    int cur = tree.tokens[i].head;
    int steps = 0;
    while (cur != 0) {
      if (++steps > n) {
        throw ConlluError(pending.lines[i], "cyclic head links reach token " +
                                                std::to_string(tree.tokens[i].index));
      }
      cur = tree.tokens[cur - 1].head;
    }
  }

  const bool tagged = tree.HasChunkTags();
  char prev = 'O';
  for (int i = 0; tagged && i < n; ++i) {
    const char tag = tree.tokens[i].chunk_tag.value_or('O');
    if (tag == 'I' && prev == 'O') {
      throw ConlluError(pending.lines[i], "malformed BIO sequence: I follows O or start");
    }
    prev = tag;
  }
  pending = PendingSentence{};
  return tree;
}

}  // namespace

ConlluError::ConlluError(int line, const std::string& message)
    : CorpusError("CoNLL-U line " + std::to_string(line) + ": " + message), line_(line) {}

bool IsUniversalPos(std::string_view tag) {
  return std::find(kUniversalPos.begin(), kUniversalPos.end(), tag) != kUniversalPos.end();
}

const Token& DepTree::token(int index) const {
  if (!ValidIndex(index)) {
    throw std::out_of_range("token index " + std::to_string(index) + " out of range 1.." +
                            std::to_string(size()));
  }
  return tokens[index - 1];
}

std::vector<std::vector<int>> DepTree::ChildLists() const {
  std::vector<std::vector<int>> children(tokens.size() + 1);
  for (const Token& t : tokens) children[t.head].push_back(t.index);
  return children;
}

std::vector<int> DepTree::Children(int index) const {
  token(index);
  std::vector<int> out;
  for (const Token& t : tokens) {
    if (t.head == index) out.push_back(t.index);
  }
  return out;
}

std::vector<int> DepTree::Subtree(int index) const {
  token(index);
  std::vector<int> out;
  for (const Token& t : tokens) {
    if (t.index == index || IsProperAncestor(index, t.index)) out.push_back(t.index);
  }
  return out;
}

bool DepTree::IsProperAncestor(int ancestor, int node) const {
  int cur = token(node).head;
  int steps = 0;
  while (cur != 0 && steps++ <= size()) {
    if (cur == ancestor) return true;
    cur = tokens[cur - 1].head;
  }
  return false;
}

bool DepTree::HasChunkTags() const {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return t.chunk_tag.has_value(); });
}

void DepTree::Validate() const {
  std::ostringstream text;
  text << SerializeConllu(std::span<const DepTree>(this, 1));
  std::istringstream in(text.str());
  try {
    const auto parsed = ParseConllu(in);
    if (parsed.size() != 1 || parsed[0].root_index != root_index) {
      throw CorpusError("root index does not match head links");
    }
  } catch (const ConlluError& e) {
    throw CorpusError("invalid dependency tree '" + sentence_id + "': " + e.what());
  }
  for (int i = 0; i < size(); ++i) {
    if (tokens[i].index != i + 1) throw CorpusError("token indices must be 1..n in order");
  }
}

std::vector<DepTree> ParseConllu(std::istream& in) {
  std::vector<DepTree> trees;
  PendingSentence pending;
  std::string line;
  int line_no = 0;
  bool in_block = false;

  auto flush = [&]() {
    if (!in_block) return;
    if (!pending.tokens.empty()) {
      trees.push_back(Finish(pending, static_cast<int>(trees.size()) + 1));
    }
    pending = PendingSentence{};
    in_block = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    if (!in_block) {
      in_block = true;
      pending.first_line = line_no;
    }
    if (line[0] == '#') {
      const std::string body = Trim(std::string_view(line).substr(1));
      if (body.starts_with("sent_id")) {
        const auto eq = body.find('=');
        if (eq != std::string::npos) pending.sentence_id = Trim(body.substr(eq + 1));
      }
      continue;
    }
    const auto fields = SplitTabs(line);
    if (fields.size() != 10) {
      throw ConlluError(line_no, "expected 10 tab-separated columns, found " +
                                     std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;

    Token token;
    const auto index = ParseInt(id);
    if (!index) throw ConlluError(line_no, "non-integer token id '" + id + "'");
    token.index = *index;
    const int expected = static_cast<int>(pending.tokens.size()) + 1;
    if (token.index != expected) {
      throw ConlluError(line_no, "token id " + id + " out of sequence, expected " +
                                     std::to_string(expected));
    }
    token.form = fields[1];
    token.lemma = fields[2];
    token.upos = fields[3];
    if (!IsUniversalPos(token.upos)) {
      throw ConlluError(line_no, "unknown universal POS tag '" + token.upos + "'");
    }
    const auto head = ParseInt(fields[6]);
    if (!head) throw ConlluError(line_no, "non-integer head '" + fields[6] + "'");
    token.head = *head;
    token.deprel = fields[7];
    token.chunk_tag = ChunkFromMisc(fields[9], line_no);
    pending.tokens.push_back(std::move(token));
    pending.lines.push_back(line_no);
  }
  flush();
  return trees;
}

std::vector<DepTree> ParseConlluFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  return ParseConllu(in);
}

std::string SerializeConllu(std::span<const DepTree> trees) {
  std::ostringstream out;
  for (const DepTree& tree : trees) {
    out << "# sent_id = " << tree.sentence_id << '\n';
    for (const Token& t : tree.tokens) {
      out << t.index << '\t' << t.form << '\t' << (t.lemma.empty() ? "_" : t.lemma) << '\t'
          << t.upos << "\t_\t_\t" << t.head << '\t' << t.deprel << "\t_\t";
      if (t.chunk_tag) {
        out << "Chunk=" << *t.chunk_tag;
      } else {
        out << '_';
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace affect
