#ifndef AFFECT_TESTS_DOT_CHECK_H_
#define AFFECT_TESTS_DOT_CHECK_H_

// Recursive-descent recogniser for the Graphviz DOT language (graphs,
// subgraphs, node/edge/attribute statements, quoted and HTML-free IDs).

#include <cctype>
#include <string>
#include <string_view>

namespace affect::test {

class DotChecker {
 public:
  explicit DotChecker(std::string_view text) : s_(text) {}

  // Empty on success, otherwise a description of the first error.
  std::string Check() {
    try {
      Graph();
      Skip();
      if (pos_ != s_.size()) Fail("trailing input");
    } catch (const std::string& e) {
      return e;
    }
    return {};
  }

 private:
  [[noreturn]] void Fail(const std::string& what) {
    throw what + " at offset " + std::to_string(pos_);
  }

  void Skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_.substr(pos_, 2) == "//") {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (s_.substr(pos_, 2) == "/*") {
        const auto end = s_.find("*/", pos_ + 2);
        if (end == std::string_view::npos) Fail("unterminated comment");
        pos_ = end + 2;
      } else {
        break;
      }
    }
  }

  bool Peek(std::string_view tok) {
    Skip();
    return s_.substr(pos_, tok.size()) == tok;
  }

  bool Accept(std::string_view tok) {
    if (!Peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void Expect(std::string_view tok) {
    if (!Accept(tok)) Fail("expected '" + std::string(tok) + "'");
  }

  bool Keyword(std::string_view kw) {
    Skip();
    if (s_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
    }
    const std::size_t after = pos_ + kw.size();
    if (after < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[after])) || s_[after] == '_')) {
      return false;
    }
    pos_ = after;
    return true;
  }

  bool Id() {
    Skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    if (c == '"') {
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= s_.size()) Fail("unterminated string");
      ++pos_;
      return true;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      return true;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      const std::size_t start = pos_;
      if (s_[pos_] == '-') ++pos_;
      bool digits = false;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        digits = digits || s_[pos_] != '.';
        ++pos_;
      }
      if (!digits) {
        pos_ = start;
        return false;
      }
      return true;
    }
    return false;
  }

  void Graph() {
    Keyword("strict");
    if (!Keyword("digraph") && !Keyword("graph")) Fail("expected graph or digraph");
    Id();
    Expect("{");
    StmtList();
    Expect("}");
  }

  void StmtList() {
    while (!Peek("}")) {
      Stmt();
      Accept(";");
    }
  }

  void AttrList() {
    do {
      Expect("[");
      while (!Peek("]")) {
        if (!Id()) Fail("expected attribute name");
        Expect("=");
        if (!Id()) Fail("expected attribute value");
        if (!Accept(",")) Accept(";");
      }
      Expect("]");
    } while (Peek("["));
  }

  void Subgraph() {
    Id();
    Expect("{");
    StmtList();
    Expect("}");
  }

  void Operand() {
    if (Keyword("subgraph")) {
      Subgraph();
    } else if (Peek("{")) {
      Expect("{");
      StmtList();
      Expect("}");
    } else {
      if (!Id()) Fail("expected node id");
      if (Accept(":")) {
        if (!Id()) Fail("expected port");
        if (Accept(":") && !Id()) Fail("expected compass point");
      }
    }
  }

  void Stmt() {
    if (Keyword("graph") || Keyword("node") || Keyword("edge")) {
      AttrList();
      return;
    }
    const std::size_t start = pos_;
    if (Id() && Accept("=")) {
      if (!Id()) Fail("expected value");
      return;
    }
    pos_ = start;
    Operand();
    while (Accept("->") || Accept("--")) Operand();
    if (Peek("[")) AttrList();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string CheckDot(std::string_view text) { return DotChecker(text).Check(); }

}  // namespace affect::test

#endif  // AFFECT_TESTS_DOT_CHECK_H_
