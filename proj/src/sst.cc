#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "affect/corpus.h"

namespace affect {
namespace {

class SexprParser {
 public:
  explicit SexprParser(std::string_view text) : text_(text) {}

  SstTree ParseTree() {
    SkipSpace();
    SstTree tree = ParseNode();
    SkipSpace();
    if (pos_ != text_.size()) Fail("trailing characters after tree");
    int next_leaf = 0;
    AssignSpans(tree, next_leaf);
    return tree;
  }

 private:
  SstTree ParseNode() {
    Expect('(');
    SkipSpace();
    const std::string label_text = Atom();
    if (label_text.empty()) Fail("missing label");
    int label = 0;
    const auto [ptr, ec] =
        std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc() || ptr != label_text.data() + label_text.size()) {
      Fail("non-integer label '" + label_text + "'");
    }
    if (label < 0 || label > 4) Fail("label " + label_text + " outside 0..4");

    SstTree node;
    node.label = label;
    SkipSpace();
    if (pos_ >= text_.size()) Fail("unbalanced parentheses");
    if (text_[pos_] == '(') {
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size()) Fail("unbalanced parentheses");
        if (text_[pos_] == ')') break;
        if (text_[pos_] != '(') Fail("token mixed with sub-trees");
        node.children.push_back(ParseNode());
      }
    } else {
      std::string token = Atom();
      if (token.empty()) Fail("empty leaf");
      node.token = std::move(token);
    }
    SkipSpace();
    Expect(')');
    return node;
  }

  std::string Atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void Expect(char c) {
    if (pos_ >= text_.size()) Fail("unbalanced parentheses");
    if (text_[pos_] != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void Fail(const std::string& msg) const {
    throw SstError("treebank parse error at column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  static void AssignSpans(SstTree& node, int& next_leaf) {
    if (node.IsLeaf()) {
      node.span = {next_leaf, next_leaf + 1};
      ++next_leaf;
      return;
    }
    const int begin = next_leaf;
    for (SstTree& child : node.children) AssignSpans(child, next_leaf);
    node.span = {begin, next_leaf};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void CollectLeaves(const SstTree& node, std::vector<std::string>& out) {
  if (node.IsLeaf()) {
    out.push_back(*node.token);
    return;
  }
  for (const SstTree& child : node.children) CollectLeaves(child, out);
}

void CollectSpans(const SstTree& node, std::map<Span, int>& out) {
  // Pre-order, so for unary chains the outermost label is kept.
  out.emplace(node.span, node.label);
  for (const SstTree& child : node.children) CollectSpans(child, out);
}

}  // namespace

std::vector<std::string> SstTree::Leaves() const {
  std::vector<std::string> out;
  CollectLeaves(*this, out);
  return out;
}

SstTree ParseSstLine(std::string_view line) { return SexprParser(line).ParseTree(); }

std::vector<SstTree> ParseSst(std::istream& in) {
  std::vector<SstTree> trees;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      trees.push_back(ParseSstLine(line));
    } catch (const SstError& e) {
      throw SstError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trees;
}

std::vector<SstTree> ParseSstFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  return ParseSst(in);
}

std::string NormalizeToken(std::string_view token) {
  static const std::pair<std::string_view, std::string_view> kEscapes[] = {
      {"-LRB-", "("}, {"-RRB-", ")"}, {"-LSB-", "["}, {"-RSB-", "]"},
      {"-LCB-", "{"}, {"-RCB-", "}"}, {"``", "\""},  {"''", "\""}};
  for (const auto& [from, to] : kEscapes) {
    if (token == from) return std::string(to);
  }
  std::string out(token);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::map<int, Sentiment> ProjectSstLabels(const DepTree& dep, const SstTree& sst) {
  const std::vector<std::string> leaves = sst.Leaves();
  const std::size_t common = std::min<std::size_t>(leaves.size(), dep.tokens.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (NormalizeToken(leaves[i]) != NormalizeToken(dep.tokens[i].form)) {
      throw AlignmentError("sentence '" + dep.sentence_id + "': token " +
                           std::to_string(i + 1) + " differs (parse '" + dep.tokens[i].form +
                           "', treebank '" + leaves[i] + "')");
    }
  }
  if (leaves.size() != dep.tokens.size()) {
    throw AlignmentError("sentence '" + dep.sentence_id + "': token count differs (parse " +
                         std::to_string(dep.tokens.size()) + ", treebank " +
                         std::to_string(leaves.size()) + "), first divergent token " +
                         std::to_string(common + 1));
  }

  std::map<Span, int> constituents;
  CollectSpans(sst, constituents);

  std::map<int, Sentiment> labels;
  for (const Token& t : dep.tokens) {
    const std::vector<int> members = dep.Subtree(t.index);
    const int lo = members.front();
    const int hi = members.back();
    if (hi - lo + 1 != static_cast<int>(members.size())) continue;  // non-contiguous
    auto it = constituents.find(Span{lo - 1, hi});
    if (it != constituents.end()) labels[t.index] = CoarsenLabel(it->second);
  }
  labels[dep.root_index] = CoarsenLabel(sst.label);
  return labels;
}

}  // namespace affect
