#ifndef AFFECT_TESTS_TEST_UTIL_H_
#define AFFECT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "affect/corpus.h"

namespace affect::test {

inline std::filesystem::path SourcePath(const std::string& rel) {
  return std::filesystem::path(AFFECT_SOURCE_DIR) / rel;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline DepTree ParseOne(const std::string& conllu) {
  std::istringstream in(conllu);
  auto trees = ParseConllu(in);
  if (trees.size() != 1) throw std::runtime_error("expected one tree");
  return trees.front();
}

struct Row {
  std::string form;
  std::string upos;
  int head;
  std::string deprel;
};

// Builds a validated tree from (form, upos, head, deprel) rows.
inline DepTree MakeTree(const std::vector<Row>& rows, std::string id = "t") {
  DepTree dep;
  dep.sentence_id = std::move(id);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i) + 1;
    t.form = rows[i].form;
    t.lemma = rows[i].form;
    t.upos = rows[i].upos;
    t.head = rows[i].head;
    t.deprel = rows[i].deprel;
    if (t.head == 0) dep.root_index = t.index;
    dep.tokens.push_back(t);
  }
  dep.Validate();
  return dep;
}

inline std::map<std::string, DepTree> WalkthroughParses() {
  std::map<std::string, DepTree> out;
  for (DepTree& t : ParseConlluFile(SourcePath("tests/data/walkthrough.conllu"))) {
    out.emplace(t.sentence_id, std::move(t));
  }
  return out;
}

// Brute-force descendant closure by walking each token's head path.
inline std::vector<int> DescendantsByHeadWalk(const DepTree& dep, int node) {
  std::vector<int> out;
  for (const Token& t : dep.tokens) {
    int cur = t.index;
    while (cur != 0) {
      if (cur == node) {
        out.push_back(t.index);
        break;
      }
      cur = dep.tokens[static_cast<std::size_t>(cur - 1)].head;
    }
  }
  return out;
}

// First `n` lines of an SST file and the first `n` blocks of its parses.
inline void CopySstSubset(const std::string& split, std::size_t n,
                          const std::filesystem::path& dir) {
  std::ifstream txt(SourcePath("data/synthetic/sst_" + split + ".txt"));
  std::ofstream txt_out(dir / ("sst_" + split + ".txt"));
  std::string line;
  for (std::size_t i = 0; i < n && std::getline(txt, line); ++i) txt_out << line << '\n';
  std::ifstream conllu(SourcePath("data/synthetic/sst_" + split + ".conllu"));
  std::ofstream conllu_out(dir / ("sst_" + split + ".conllu"));
  std::size_t blocks = 0;
  while (blocks < n && std::getline(conllu, line)) {
    conllu_out << line << '\n';
    if (line.empty()) ++blocks;
  }
}

// A fresh directory holding an SST subset and a run config that points at it
// (embeddings and ABSA data come from the shipped synthetic corpus). Returns
// the config path; checkpoints go to <dir>/ckpt.
inline std::filesystem::path WriteSubsetConfig(const std::filesystem::path& dir,
                                               std::size_t n_train, std::size_t n_dev,
                                               const std::string& extra) {
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "ckpt");
  CopySstSubset("train", n_train, dir);
  CopySstSubset("dev", n_dev, dir);
  std::ofstream cfg(dir / "run.toml");
  cfg << "embeddings = \"" << SourcePath("data/synthetic/embeddings.txt").string() << "\"\n"
      << "sst_train = \"sst_train.txt\"\nsst_train_parses = \"sst_train.conllu\"\n"
      << "sst_dev = \"sst_dev.txt\"\nsst_dev_parses = \"sst_dev.conllu\"\n"
      << "absa = \"" << SourcePath("data/synthetic/absa.jsonl").string() << "\"\n"
      << "absa_parses = \"" << SourcePath("data/synthetic/absa.conllu").string() << "\"\n"
      << "checkpoint_dir = \"ckpt\"\n"
      << extra;
  return dir / "run.toml";
}

}  // namespace affect::test

#endif  // AFFECT_TESTS_TEST_UTIL_H_
