#include "affect/syntax.h"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <string_view>

namespace affect {
namespace {

constexpr std::array<std::string_view, 6> kNonHeadRelations = {"compound", "flat", "det",
                                                               "amod",     "nummod", "poss"};
constexpr std::array<std::string_view, 5> kChunkModifierRelations = {"det", "amod", "compound",
                                                                     "nummod", "poss"};

// "nmod:poss" counts as "poss", "compound:prt" as "compound".
bool RelationIn(std::string_view deprel, std::span<const std::string_view> set) {
  for (std::string_view r : set) {
    if (deprel == r) return true;
    const auto colon = deprel.find(':');
    if (colon != std::string_view::npos &&
        (deprel.substr(0, colon) == r || deprel.substr(colon + 1) == r)) {
      return true;
    }
  }
  return false;
}

std::string JoinForms(const DepTree& dep, std::span<const int> indices) {
  std::string out;
  for (int idx : indices) {
    if (!out.empty()) out += ' ';
    out += dep.token(idx).form;
  }
  return out;
}

NounChunk MakeChunk(const DepTree& dep, std::vector<int> span, int head) {
  NounChunk chunk;
  chunk.head_index = head;
  chunk.text = JoinForms(dep, span);
  chunk.span = std::move(span);
  return chunk;
}

std::vector<NounChunk> DecodeBio(const DepTree& dep) {
  std::vector<NounChunk> chunks;
  std::vector<int> current;
  auto close = [&]() {
    if (current.empty()) return;
    const int lo = current.front();
    const int hi = current.back();
    int head = hi;
    for (auto it = current.rbegin(); it != current.rend(); ++it) {
      const int h = dep.token(*it).head;
      if (h < lo || h > hi) {
        head = *it;
        break;
      }
    }
    chunks.push_back(MakeChunk(dep, current, head));
    current.clear();
  };
  char prev = 'O';
  for (const Token& t : dep.tokens) {
    const char tag = t.chunk_tag.value_or('O');
    if (tag == 'B') {
      close();
      current.push_back(t.index);
    } else if (tag == 'I') {
      if (prev == 'O') {
        throw CorpusError("sentence '" + dep.sentence_id + "': malformed BIO at token " +
                          std::to_string(t.index));
      }
      current.push_back(t.index);
    } else {
      close();
    }
    prev = tag;
  }
  close();
  return chunks;
}

std::vector<NounChunk> FallbackChunks(const DepTree& dep) {
  std::vector<NounChunk> chunks;
  int last_end = 0;
  for (const Token& t : dep.tokens) {
    if (t.upos != "NOUN" && t.upos != "PROPN" && t.upos != "PRON") continue;
    if (RelationIn(t.deprel, kNonHeadRelations)) continue;
    int start = t.index;
    while (start - 1 >= 1) {
      const Token& left = dep.token(start - 1);
      if (left.head != t.index || !RelationIn(left.deprel, kChunkModifierRelations)) break;
      --start;
    }
    start = std::max(start, last_end + 1);
    std::vector<int> span;
    for (int i = start; i <= t.index; ++i) span.push_back(i);
    chunks.push_back(MakeChunk(dep, std::move(span), t.index));
    last_end = t.index;
  }
  return chunks;
}

// Number of head links from `node` up to `ancestor`, if it is a proper ancestor.
std::optional<int> UpwardDistance(const DepTree& dep, int node, int ancestor) {
  int cur = dep.token(node).head;
  int steps = 1;
  while (cur != 0 && steps <= dep.size()) {
    if (cur == ancestor) return steps;
    cur = dep.token(cur).head;
    ++steps;
  }
  return std::nullopt;
}

}  // namespace

std::vector<int> FindVerbs(const DepTree& dep, bool include_aux) {
  std::vector<int> verbs;
  for (const Token& t : dep.tokens) {
    if (t.upos == "VERB" || (include_aux && t.upos == "AUX")) verbs.push_back(t.index);
  }
  return verbs;
}

std::string SubSentence(const DepTree& dep, int node) {
  const std::vector<int> members = dep.Subtree(node);
  return JoinForms(dep, members);
}

std::vector<NounChunk> ExtractNounChunks(const DepTree& dep) {
  if (dep.HasChunkTags()) return DecodeBio(dep);
  return FallbackChunks(dep);
}

std::vector<TargetPair> IdentifyTargets(const DepTree& dep, const SyntaxOptions& options) {
  const std::vector<int> verbs = FindVerbs(dep, options.include_aux);
  if (verbs.empty()) return {};
  const std::vector<NounChunk> chunks = ExtractNounChunks(dep);

  std::vector<std::vector<std::string>> verb_words;
  verb_words.reserve(verbs.size());
  for (int v : verbs) verb_words.push_back(SplitWords(SubSentence(dep, v)));

  std::vector<TargetPair> targets;
  for (const NounChunk& chunk : chunks) {
    const std::vector<std::string> chunk_words = SplitWords(chunk.text);
    int best_verb = 0;
    int best_distance = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < verbs.size(); ++k) {
      if (!ContainsSubsequence(verb_words[k], chunk_words)) continue;
      const auto distance = UpwardDistance(dep, chunk.head_index, verbs[k]);
      if (!distance) continue;
      // Strict '<' keeps the earlier candidate on a tie; ancestors on one path
      // never tie, so this only documents intent.
      if (*distance < best_distance) {
        best_distance = *distance;
        best_verb = verbs[k];
      }
    }
    if (best_verb != 0) targets.push_back(TargetPair{chunk, best_verb});
  }
  return targets;
}

std::vector<VerbSubTree> SplitByVerbs(const DepTree& dep, std::span<const int> verbs) {
  std::vector<VerbSubTree> out;
  out.reserve(verbs.size());
  for (int v : verbs) {
    VerbSubTree sub;
    sub.verb_index = v;
    sub.member_indices = dep.Subtree(v);
    sub.sub_sentence = JoinForms(dep, sub.member_indices);
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool ContainsSubsequence(std::span<const std::string> haystack,
                         std::span<const std::string> needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace affect
