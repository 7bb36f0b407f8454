#ifndef AFFECT_ASSOCIATE_H_
#define AFFECT_ASSOCIATE_H_

// Target-sentiment association: each verb sub-tree is classified in isolation
// and its root sentiment is inherited by the noun chunks it owns.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affect/corpus.h"
#include "affect/sentiment.h"
#include "affect/syntax.h"
#include "affect/treelstm.h"
#include "json.hpp"

namespace affect {

enum class MatchMode { kToken, kChar };

std::string_view ToString(MatchMode mode);
std::optional<MatchMode> MatchModeFromString(std::string_view name);

struct TargetAssociation {
  NounChunk chunk;
  int verb_index = 0;
  Sentiment sentiment = Sentiment::kNeutral;
  std::map<int, Sentiment> node_trace;  // every member of the verb sub-tree

  bool operator==(const TargetAssociation&) const = default;
};

std::vector<TargetAssociation> LabelTargets(const DepTree& dep, const TreeLstmParams& params,
                                            const EmbeddingTable& emb,
                                            const SyntaxOptions& options = {});

// Case-insensitive containment of `aspect` in the chunk text. kToken requires
// a contiguous token run; kChar is a raw substring test.
bool MatchAspect(const NounChunk& chunk, std::string_view aspect, MatchMode mode);

// Light tokenisation for aspect strings: whitespace split, punctuation and
// English clitics ('s, n't, ...) separated, lowercased.
std::vector<std::string> TokenizeAspect(std::string_view text);

// Classifies one verb sub-tree. Lets the baselines share the evaluation path.
using SubtreeClassifier = std::function<Sentiment(const DepTree&, const VerbSubTree&)>;

struct LabeledTarget {
  NounChunk chunk;
  int verb_index = 0;
  Sentiment sentiment = Sentiment::kNeutral;
};

std::vector<LabeledTarget> ClassifyTargets(const DepTree& dep,
                                           const SubtreeClassifier& classifier,
                                           const SyntaxOptions& options = {});

SubtreeClassifier TreeLstmClassifier(const TreeLstmParams& params, const EmbeddingTable& emb);

struct EvalReport {
  // Per gold-aspect occurrence.
  long gold_aspects = 0;
  long identified = 0;
  long label_correct = 0;
  std::array<std::array<long, kNumClasses>, kNumClasses> confusion{};  // [gold][predicted]
  // Per unique aspect string within a sentence.
  long unique_gold_aspects = 0;
  long unique_identified = 0;
  long unique_label_correct = 0;

  std::optional<double> identification_recall() const;
  std::optional<double> label_accuracy() const;

  nlohmann::json ToJson() const;
  bool operator==(const EvalReport&) const = default;
};

struct EvalOptions {
  MatchMode match_mode = MatchMode::kToken;
  SyntaxOptions syntax;
  int threads = 1;
};

// Throws CorpusError if a record has no parse.
EvalReport EvaluateAbsa(std::span<const AbsaRecord> records,
                        const std::map<std::string, DepTree>& parses,
                        const SubtreeClassifier& classifier, const EvalOptions& options = {});

EvalReport EvaluateAbsa(std::span<const AbsaRecord> records,
                        const std::map<std::string, DepTree>& parses,
                        const TreeLstmParams& params, const EmbeddingTable& emb,
                        const EvalOptions& options = {});

// Graphviz digraph of a parse: fill colour from `trace` (blue positive,
// orange negative, grey neutral, white untraced), diamonds for verbs, squares
// for chunk heads, ellipses otherwise. Edges run head -> dependent.
std::string EmitDot(const DepTree& dep, const std::map<int, Sentiment>& trace,
                    std::span<const NounChunk> targets, std::span<const int> verbs);

}  // namespace affect

#endif  // AFFECT_ASSOCIATE_H_
