#include "affect/associate.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace affect {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) && c != '\'' && c != '-' && c != '&';
}

// Character offsets of each token form in `text`, found left to right.
std::vector<std::optional<std::pair<int, int>>> AlignTokens(const DepTree& dep,
                                                            const std::string& text) {
  std::vector<std::optional<std::pair<int, int>>> out(dep.tokens.size());
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < dep.tokens.size(); ++i) {
    const std::string& form = dep.tokens[i].form;
    const std::size_t pos = text.find(form, cursor);
    if (pos == std::string::npos) continue;
    out[i] = std::make_pair(static_cast<int>(pos), static_cast<int>(pos + form.size()));
    cursor = pos + form.size();
  }
  return out;
}

struct RecordOutcome {
  long gold = 0, identified = 0, correct = 0;
  std::array<std::array<long, kNumClasses>, kNumClasses> confusion{};
  long unique_gold = 0, unique_identified = 0, unique_correct = 0;
};

RecordOutcome ScoreRecord(const AbsaRecord& record, const DepTree& dep,
                          const SubtreeClassifier& classifier, const EvalOptions& options) {
  RecordOutcome out;
  if (record.aspects.empty()) return out;
  const std::vector<LabeledTarget> targets = ClassifyTargets(dep, classifier, options.syntax);
  const auto offsets = AlignTokens(dep, record.text);

  auto aspect_position = [&](const GoldAspect& aspect) -> std::optional<int> {
    if (!aspect.from) return std::nullopt;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (offsets[i] && offsets[i]->first <= *aspect.from && *aspect.from < offsets[i]->second) {
        return static_cast<int>(i) + 1;
      }
    }
    return std::nullopt;
  };

  // Smallest span wins; then proximity to the annotated occurrence; then
  // leftmost.
  auto choose = [&](const GoldAspect& aspect) -> const LabeledTarget* {
    const LabeledTarget* best = nullptr;
    std::tuple<std::size_t, int, int> best_key{};
    const auto position = aspect_position(aspect);
    for (const LabeledTarget& t : targets) {
      if (!MatchAspect(t.chunk, aspect.target, options.match_mode)) continue;
      int distance = 0;
      if (position) {
        const int lo = t.chunk.span.front();
        const int hi = t.chunk.span.back();
        distance = *position < lo ? lo - *position : (*position > hi ? *position - hi : 0);
      }
      const std::tuple<std::size_t, int, int> key{t.chunk.span.size(), distance,
                                                  t.chunk.span.front()};
      if (best == nullptr || key < best_key) {
        best = &t;
        best_key = key;
      }
    }
    return best;
  };

  std::vector<std::string> seen;
  for (const GoldAspect& aspect : record.aspects) {
    const LabeledTarget* match = choose(aspect);
    ++out.gold;
    const std::string key = Lower(aspect.target);
    const bool first_of_string = std::find(seen.begin(), seen.end(), key) == seen.end();
    if (first_of_string) {
      seen.push_back(key);
      ++out.unique_gold;
    }
    if (match == nullptr) continue;
    ++out.identified;
    const bool correct = match->sentiment == aspect.polarity;
    if (correct) ++out.correct;
    ++out.confusion[ClassIndex(aspect.polarity)][ClassIndex(match->sentiment)];
    if (first_of_string) {
      ++out.unique_identified;
      if (correct) ++out.unique_correct;
    }
  }
  return out;
}

std::string DotEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string_view FillColor(const std::map<int, Sentiment>& trace, int index) {
  auto it = trace.find(index);
  if (it == trace.end()) return "white";
  switch (it->second) {
    case Sentiment::kPositive:
      return "blue";
    case Sentiment::kNegative:
      return "orange";
    case Sentiment::kNeutral:
      return "grey";
  }
  return "white";
}

}  // namespace

std::string_view ToString(MatchMode mode) { return mode == MatchMode::kToken ? "token" : "char"; }

std::optional<MatchMode> MatchModeFromString(std::string_view name) {
  if (name == "token") return MatchMode::kToken;
  if (name == "char") return MatchMode::kChar;
  return std::nullopt;
}

std::vector<std::string> TokenizeAspect(std::string_view text) {
  static constexpr std::string_view kClitics[] = {"n't", "'s", "'re", "'ll", "'ve", "'d", "'m"};
  std::vector<std::string> out;
  std::istringstream ss{std::string(text)};
  std::string word;
  while (ss >> word) {
    word = Lower(word);
    std::vector<std::string> trailing;
    while (!word.empty() && IsPunct(word.back())) {
      trailing.insert(trailing.begin(), std::string(1, word.back()));
      word.pop_back();
    }
    std::size_t lead = 0;
    while (lead < word.size() && IsPunct(word[lead])) {
      out.emplace_back(1, word[lead]);
      ++lead;
    }
    word = word.substr(lead);
    std::string clitic;
    for (std::string_view c : kClitics) {
      if (word.size() > c.size() && word.ends_with(c)) {
        clitic = std::string(c);
        word.erase(word.size() - c.size());
        break;
      }
    }
    if (!word.empty()) out.push_back(word);
    if (!clitic.empty()) out.push_back(clitic);
    for (auto& t : trailing) out.push_back(std::move(t));
  }
  return out;
}

bool MatchAspect(const NounChunk& chunk, std::string_view aspect, MatchMode mode) {
  if (mode == MatchMode::kChar) {
    const std::string needle = Lower(aspect);
    if (needle.empty()) return false;
    return Lower(chunk.text).find(needle) != std::string::npos;
  }
  const std::vector<std::string> needle = TokenizeAspect(aspect);
  if (needle.empty()) return false;
  std::vector<std::string> hay = SplitWords(Lower(chunk.text));
  return ContainsSubsequence(hay, needle);
}

std::vector<TargetAssociation> LabelTargets(const DepTree& dep, const TreeLstmParams& params,
                                            const EmbeddingTable& emb,
                                            const SyntaxOptions& options) {
  std::vector<TargetAssociation> out;
  std::map<int, NodeStates> by_verb;
  const auto children = dep.ChildLists();
  for (const TargetPair& pair : IdentifyTargets(dep, options)) {
    auto it = by_verb.find(pair.verb_index);
    if (it == by_verb.end()) {
      it = by_verb.emplace(pair.verb_index,
                           ForwardTree(params, dep, children, emb, pair.verb_index))
               .first;
    }
    TargetAssociation assoc;
    assoc.chunk = pair.chunk;
    assoc.verb_index = pair.verb_index;
    for (const auto& [node, state] : it->second) assoc.node_trace[node] = state.predicted;
    assoc.sentiment = assoc.node_trace.at(pair.verb_index);
    out.push_back(std::move(assoc));
  }
  return out;
}

std::vector<LabeledTarget> ClassifyTargets(const DepTree& dep,
                                           const SubtreeClassifier& classifier,
                                           const SyntaxOptions& options) {
  std::vector<LabeledTarget> out;
  std::map<int, Sentiment> by_verb;
  for (const TargetPair& pair : IdentifyTargets(dep, options)) {
    auto it = by_verb.find(pair.verb_index);
    if (it == by_verb.end()) {
      const int verb = pair.verb_index;
      const auto sub = SplitByVerbs(dep, std::span<const int>(&verb, 1));
      it = by_verb.emplace(verb, classifier(dep, sub.front())).first;
    }
    out.push_back(LabeledTarget{pair.chunk, pair.verb_index, it->second});
  }
  return out;
}

SubtreeClassifier TreeLstmClassifier(const TreeLstmParams& params, const EmbeddingTable& emb) {
  return [&params, &emb](const DepTree& dep, const VerbSubTree& sub) {
    return ForwardTree(params, dep, emb, sub.verb_index).at(sub.verb_index).predicted;
  };
}

std::optional<double> EvalReport::identification_recall() const {
  if (gold_aspects == 0) return std::nullopt;
  return static_cast<double>(identified) / static_cast<double>(gold_aspects);
}

std::optional<double> EvalReport::label_accuracy() const {
  if (identified == 0) return std::nullopt;
  return static_cast<double>(label_correct) / static_cast<double>(identified);
}

nlohmann::json EvalReport::ToJson() const {
  auto ratio = [](long num, long den) -> nlohmann::json {
    if (den == 0) return nullptr;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  nlohmann::json j;
  j["gold_aspects"] = gold_aspects;
  j["identified"] = identified;
  j["identification_recall"] = ratio(identified, gold_aspects);
  j["label_correct"] = label_correct;
  j["label_accuracy"] = ratio(label_correct, identified);
  j["confusion"] = confusion;
  j["confusion_labels"] = {"negative", "neutral", "positive"};
  j["unique_gold_aspects"] = unique_gold_aspects;
  j["unique_identified"] = unique_identified;
  j["unique_identification_recall"] = ratio(unique_identified, unique_gold_aspects);
  j["unique_label_correct"] = unique_label_correct;
  j["unique_label_accuracy"] = ratio(unique_label_correct, unique_identified);
  return j;
}

EvalReport EvaluateAbsa(std::span<const AbsaRecord> records,
                        const std::map<std::string, DepTree>& parses,
                        const SubtreeClassifier& classifier, const EvalOptions& options) {
  std::vector<const DepTree*> trees(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = parses.find(records[i].sentence_id);
    if (it == parses.end()) {
      throw CorpusError("no parse for ABSA record '" + records[i].sentence_id + "'");
    }
    trees[i] = &it->second;
  }

  std::vector<RecordOutcome> outcomes(records.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), 1,
                              std::max<std::size_t>(records.size(), 1));
  auto work = [&](std::size_t worker) {
    for (std::size_t i = worker; i < records.size(); i += workers) {
      outcomes[i] = ScoreRecord(records[i], *trees[i], classifier, options);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  for (const RecordOutcome& o : outcomes) {
    report.gold_aspects += o.gold;
    report.identified += o.identified;
    report.label_correct += o.correct;
    report.unique_gold_aspects += o.unique_gold;
    report.unique_identified += o.unique_identified;
    report.unique_label_correct += o.unique_correct;
    for (int g = 0; g < kNumClasses; ++g) {
      for (int p = 0; p < kNumClasses; ++p) report.confusion[g][p] += o.confusion[g][p];
    }
  }
  return report;
}

EvalReport EvaluateAbsa(std::span<const AbsaRecord> records,
                        const std::map<std::string, DepTree>& parses,
                        const TreeLstmParams& params, const EmbeddingTable& emb,
                        const EvalOptions& options) {
  return EvaluateAbsa(records, parses, TreeLstmClassifier(params, emb), options);
}

std::string EmitDot(const DepTree& dep, const std::map<int, Sentiment>& trace,
                    std::span<const NounChunk> targets, std::span<const int> verbs) {
  std::ostringstream out;
  out << "digraph \"" << DotEscape(dep.sentence_id) << "\" {\n";
  out << "  node [style=filled, fontname=\"Helvetica\"];\n";
  for (const Token& t : dep.tokens) {
    std::string_view shape = "ellipse";
    if (std::find(verbs.begin(), verbs.end(), t.index) != verbs.end()) {
      shape = "diamond";
    } else if (std::any_of(targets.begin(), targets.end(),
                           [&](const NounChunk& c) { return c.head_index == t.index; })) {
      shape = "square";
    }
    out << "  n" << t.index << " [label=\"" << DotEscape(t.form) << "\", shape=" << shape
        << ", fillcolor=" << FillColor(trace, t.index) << "];\n";
  }
  for (const Token& t : dep.tokens) {
    if (t.head == 0) continue;
    out << "  n" << t.head << " -> n" << t.index << " [label=\"" << DotEscape(t.deprel)
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace affect
