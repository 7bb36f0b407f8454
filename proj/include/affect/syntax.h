#ifndef AFFECT_SYNTAX_H_
#define AFFECT_SYNTAX_H_

// Rule-based affect target identification over dependency parses.
//
// Every verb roots a sub-tree; noun chunks found inside a verb's sub-tree are
// candidate targets, and each chunk is owned by its closest ancestor verb.

#include <span>
#include <string>
#include <vector>

#include "affect/corpus.h"

namespace affect {

struct NounChunk {
  int head_index = 0;
  std::vector<int> span;  // contiguous, ascending
  std::string text;       // space-joined forms

  bool operator==(const NounChunk&) const = default;
};

struct VerbSubTree {
  int verb_index = 0;
  std::vector<int> member_indices;  // descendant closure including the verb
  std::string sub_sentence;

  bool operator==(const VerbSubTree&) const = default;
};

struct TargetPair {
  NounChunk chunk;
  int verb_index = 0;

  bool operator==(const TargetPair&) const = default;
};

struct SyntaxOptions {
  // Count AUX tokens as verbs; taggers commonly mark copulas as AUX.
  bool include_aux = true;
};

// Indices of VERB (and optionally AUX) tokens, ascending.
std::vector<int> FindVerbs(const DepTree& dep, bool include_aux = true);

// Forms of the node's sub-tree in token order, single-space joined.
std::string SubSentence(const DepTree& dep, int node);

// BIO chunk tags when the parse carries them; otherwise nominal heads with
// their adjacent left determiners/modifiers.
std::vector<NounChunk> ExtractNounChunks(const DepTree& dep);

std::vector<TargetPair> IdentifyTargets(const DepTree& dep, const SyntaxOptions& options = {});

std::vector<VerbSubTree> SplitByVerbs(const DepTree& dep, std::span<const int> verbs);

// Splits on single spaces.
std::vector<std::string> SplitWords(const std::string& text);

// True if `needle` occurs as a contiguous run inside `haystack`.
bool ContainsSubsequence(std::span<const std::string> haystack,
                         std::span<const std::string> needle);

}  // namespace affect

#endif  // AFFECT_SYNTAX_H_
