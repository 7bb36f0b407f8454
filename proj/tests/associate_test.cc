#include <gtest/gtest.h>

#include <fstream>

#include "affect/associate.h"
#include "affect/gradcheck.h"
#include "affect/random.h"
#include "dot_check.h"
#include "test_util.h"

namespace affect {
namespace {

NounChunk Chunk(const std::string& text) {
  NounChunk c;
  c.text = text;
  const auto words = SplitWords(text);
  for (std::size_t i = 0; i < words.size(); ++i) c.span.push_back(static_cast<int>(i) + 1);
  c.head_index = c.span.back();
  return c;
}

// Verb-level rule used as a stand-in model: like -> positive, hate ->
// negative, a copula takes the polarity of its adjectival complement.
Sentiment StubSentiment(const DepTree& dep, const VerbSubTree& sub) {
  const Token& verb = dep.token(sub.verb_index);
  if (verb.lemma == "like") return Sentiment::kPositive;
  if (verb.lemma == "hate") return Sentiment::kNegative;
  if (verb.lemma == "be") {
    for (int c : dep.Children(sub.verb_index)) {
      if (dep.token(c).deprel != "acomp") continue;
      if (dep.token(c).form == "good") return Sentiment::kPositive;
      if (dep.token(c).form == "bad") return Sentiment::kNegative;
    }
  }
  return Sentiment::kNeutral;
}

struct Fixture {
  std::vector<AbsaRecord> records;
  std::map<std::string, DepTree> parses;
};

Fixture LoadFixture() {
  Fixture f;
  f.records = LoadAbsaFile(test::SourcePath("tests/data/absa_fixture.jsonl"));
  for (DepTree& t : ParseConlluFile(test::SourcePath("tests/data/absa_fixture.conllu"))) {
    f.parses.emplace(t.sentence_id, std::move(t));
  }
  return f;
}

const EmbeddingTable& SyntheticEmbeddings() {
  static const EmbeddingTable table = [] {
    std::ifstream in(test::SourcePath("data/synthetic/embeddings.txt"));
    return LoadAllEmbeddings(in, 300);
  }();
  return table;
}

const TreeLstmParams& ShippedModel() {
  static const TreeLstmParams params = TreeLstmParams::FromCheckpoint(
      LoadCheckpoint(test::SourcePath("data/checkpoints/treelstm.ckpt")));
  return params;
}

TEST(MatchAspect, Examples) {
  EXPECT_TRUE(MatchAspect(Chunk("the red ball"), "ball", MatchMode::kToken));
  EXPECT_TRUE(MatchAspect(Chunk("ball"), "ball", MatchMode::kToken));
  EXPECT_TRUE(MatchAspect(Chunk("The Four Seasons"), "the four seasons", MatchMode::kToken));
  EXPECT_FALSE(MatchAspect(Chunk("the start"), "art", MatchMode::kToken));
  EXPECT_TRUE(MatchAspect(Chunk("the start"), "art", MatchMode::kChar));
  EXPECT_FALSE(MatchAspect(Chunk("the red ball"), "red balls", MatchMode::kToken));
  EXPECT_TRUE(MatchAspect(Chunk("the chef 's special"), "chef's special", MatchMode::kToken));
  EXPECT_FALSE(MatchAspect(Chunk("ball"), "  ", MatchMode::kToken));
}

TEST(TokenizeAspect, SplitsPunctuationAndClitics) {
  EXPECT_EQ(TokenizeAspect("The Four Seasons"),
            (std::vector<std::string>{"the", "four", "seasons"}));
  EXPECT_EQ(TokenizeAspect("chef's"), (std::vector<std::string>{"chef", "'s"}));
  EXPECT_EQ(TokenizeAspect("(pasta)"), (std::vector<std::string>{"(", "pasta", ")"}));
  EXPECT_EQ(TokenizeAspect("don't"), (std::vector<std::string>{"do", "n't"}));
  EXPECT_EQ(TokenizeAspect("wi-fi"), (std::vector<std::string>{"wi-fi"}));
}

TEST(EvaluateAbsa, HandCountedFixture) {
  const Fixture f = LoadFixture();
  ASSERT_EQ(f.records.size(), 10u);
  const EvalReport r = EvaluateAbsa(f.records, f.parses, StubSentiment);
  EXPECT_EQ(r.gold_aspects, 12);
  EXPECT_EQ(r.identified, 10);
  EXPECT_EQ(r.label_correct, 8);
  EXPECT_DOUBLE_EQ(*r.identification_recall(), 10.0 / 12.0);
  EXPECT_DOUBLE_EQ(*r.label_accuracy(), 8.0 / 10.0);
  using Row = std::array<long, kNumClasses>;
  EXPECT_EQ(r.confusion[0], (Row{4, 0, 1}));
  EXPECT_EQ(r.confusion[1], (Row{0, 1, 0}));
  EXPECT_EQ(r.confusion[2], (Row{1, 0, 3}));
  EXPECT_EQ(r.unique_gold_aspects, 11);
  EXPECT_EQ(r.unique_identified, 9);
  EXPECT_EQ(r.unique_label_correct, 7);
}

TEST(EvaluateAbsa, CharModeMatchesSubstrings) {
  const Fixture f = LoadFixture();
  EvalOptions options;
  options.match_mode = MatchMode::kChar;
  const EvalReport r = EvaluateAbsa(f.records, f.parses, StubSentiment, options);
  EXPECT_EQ(r.gold_aspects, 12);
  EXPECT_EQ(r.identified, 11);
  EXPECT_EQ(r.label_correct, 9);
  EXPECT_EQ(r.confusion[0][0], 5);
}

TEST(EvaluateAbsa, ThreadsDoNotChangeCounts) {
  const Fixture f = LoadFixture();
  EvalOptions options;
  options.threads = 4;
  EXPECT_EQ(EvaluateAbsa(f.records, f.parses, StubSentiment, options),
            EvaluateAbsa(f.records, f.parses, StubSentiment));
}

TEST(EvaluateAbsa, IdentificationIndependentOfModel) {
  const Fixture f = LoadFixture();
  const EvalReport stub = EvaluateAbsa(f.records, f.parses, StubSentiment);
  const EvalReport neutral = EvaluateAbsa(
      f.records, f.parses, [](const DepTree&, const VerbSubTree&) { return Sentiment::kNeutral; });
  EXPECT_EQ(stub.identified, neutral.identified);
  EXPECT_EQ(stub.unique_identified, neutral.unique_identified);
  EXPECT_NE(stub.label_correct, neutral.label_correct);
}

TEST(EvaluateAbsa, ZeroAspectsAndMissingParse) {
  Fixture f = LoadFixture();
  std::vector<AbsaRecord> empty = {f.records[8]};
  ASSERT_TRUE(empty[0].aspects.empty());
  const EvalReport r = EvaluateAbsa(empty, f.parses, StubSentiment);
  EXPECT_EQ(r, EvalReport{});
  EXPECT_FALSE(r.identification_recall().has_value());
  const nlohmann::json j = r.ToJson();
  EXPECT_TRUE(j["identification_recall"].is_null());
  EXPECT_TRUE(j["label_accuracy"].is_null());
  EXPECT_EQ(j["identified"], 0);
  f.parses.erase("r3");
  EXPECT_THROW(EvaluateAbsa(f.records, f.parses, StubSentiment), CorpusError);
}

TEST(LabelTargets, WalkthroughWithShippedModel) {
  const auto parses = test::WalkthroughParses();
  const auto fig1 = LabelTargets(parses.at("fig1"), ShippedModel(), SyntheticEmbeddings());
  ASSERT_EQ(fig1.size(), 2u);
  EXPECT_EQ(fig1[0].chunk.text, "the food");
  EXPECT_EQ(fig1[0].sentiment, Sentiment::kPositive);
  EXPECT_EQ(fig1[1].chunk.text, "The Four Seasons");
  EXPECT_EQ(fig1[1].sentiment, Sentiment::kNegative);

  const auto fig3 = LabelTargets(parses.at("fig3"), ShippedModel(), SyntheticEmbeddings());
  ASSERT_EQ(fig3.size(), 1u);
  EXPECT_EQ(fig3[0].sentiment, Sentiment::kPositive);
  for (const auto& [node, s] : fig3[0].node_trace) {
    const bool charged = node == 3 || node == 4;
    EXPECT_EQ(s, charged ? Sentiment::kPositive : Sentiment::kNeutral) << "node " << node;
  }

  const auto fig5 = LabelTargets(parses.at("fig5"), ShippedModel(), SyntheticEmbeddings());
  ASSERT_EQ(fig5.size(), 1u);
  EXPECT_EQ(fig5[0].chunk.text, "this place");
  EXPECT_EQ(fig5[0].sentiment, Sentiment::kNegative);
  for (const auto& [node, s] : fig5[0].node_trace) {
    if (node != fig5[0].verb_index) {
      EXPECT_EQ(s, Sentiment::kNeutral) << "node " << node;
    }
  }
}

TEST(LabelTargets, TraceCoversVerbSubtree) {
  Rng rng(6);
  const TreeLstmParams params = TreeLstmParams::Initialize({3, 4, CandidateActivation::kTanh}, 6);
  EmbeddingTable emb(3);
  for (const char* w : {"food", "was", "good", "i", "ate", "the", "place"}) {
    emb.Insert(w, {UniformRange(rng, -1, 1), UniformRange(rng, -1, 1), UniformRange(rng, -1, 1)});
  }
  for (const DepTree& dep : ParseConlluFile(test::SourcePath("tests/data/absa_fixture.conllu"))) {
    for (const TargetAssociation& a : LabelTargets(dep, params, emb)) {
      EXPECT_EQ(a.node_trace.at(a.verb_index), a.sentiment);
      std::vector<int> keys;
      for (const auto& [k, v] : a.node_trace) keys.push_back(k);
      EXPECT_EQ(keys, test::DescendantsByHeadWalk(dep, a.verb_index));
    }
  }
}

TEST(LabelTargets, InvariantToEditsOutsideVerbSubtree) {
  Rng rng(19);
  const TreeLstmParams params = TreeLstmParams::Initialize({3, 5, CandidateActivation::kTanh}, 2);
  EmbeddingTable emb(3);
  for (int w = 1; w <= 20; ++w) {
    emb.Insert("w" + std::to_string(w),
               {UniformRange(rng, -2, 2), UniformRange(rng, -2, 2), UniformRange(rng, -2, 2)});
  }
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + static_cast<int>(UniformIndex(rng, 10));
    DepTree dep = RandomDepTree(rng, n);
    for (Token& t : dep.tokens) t.chunk_tag.reset();
    const auto before = LabelTargets(dep, params, emb);
    for (const TargetAssociation& a : before) {
      DepTree edited = dep;
      const auto members = test::DescendantsByHeadWalk(dep, a.verb_index);
      for (Token& t : edited.tokens) {
        if (std::find(members.begin(), members.end(), t.index) == members.end()) {
          t.form = "w" + std::to_string(n + 1 + static_cast<int>(UniformIndex(rng, 7)));
        }
      }
      for (const TargetAssociation& b : LabelTargets(edited, params, emb)) {
        if (b.chunk.span == a.chunk.span && b.verb_index == a.verb_index) {
          EXPECT_EQ(b.sentiment, a.sentiment);
          EXPECT_EQ(b.node_trace, a.node_trace);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(EmitDot, EmptyTraceIsWhiteEllipses) {
  const DepTree dep = test::WalkthroughParses().at("fig3");
  const std::string dot = EmitDot(dep, {}, {}, {});
  EXPECT_EQ(test::CheckDot(dot), "");
  EXPECT_EQ(dot.find("diamond"), std::string::npos);
  EXPECT_EQ(dot.find("square"), std::string::npos);
  std::size_t whites = 0;
  for (std::size_t p = dot.find("fillcolor=white"); p != std::string::npos;
       p = dot.find("fillcolor=white", p + 1)) {
    ++whites;
  }
  EXPECT_EQ(whites, 5u);
}

TEST(EmitDot, Fig3GoldenFile) {
  const DepTree dep = test::WalkthroughParses().at("fig3");
  const std::map<int, Sentiment> trace = {{1, Sentiment::kNeutral},
                                          {2, Sentiment::kNeutral},
                                          {3, Sentiment::kPositive},
                                          {4, Sentiment::kPositive},
                                          {5, Sentiment::kNeutral}};
  const auto chunks = ExtractNounChunks(dep);
  const std::vector<int> verbs = FindVerbs(dep);
  const std::string dot = EmitDot(dep, trace, chunks, verbs);
  EXPECT_EQ(dot, test::ReadFile(test::SourcePath("tests/data/fig3.dot")));
  EXPECT_EQ(dot, EmitDot(dep, trace, chunks, verbs));
  EXPECT_EQ(test::CheckDot(dot), "");
}

TEST(EmitDot, EscapesQuotes) {
  DepTree dep = test::MakeTree({{"say", "VERB", 0, "root"}, {"\"hi\\", "NOUN", 1, "dep"}}, "q\"1");
  const std::string dot = EmitDot(dep, {{1, Sentiment::kNegative}}, {}, std::vector<int>{1});
  EXPECT_EQ(test::CheckDot(dot), "");
  EXPECT_NE(dot.find("label=\"\\\"hi\\\\\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("fillcolor=orange"), std::string::npos);
}

TEST(DotChecker, RejectsMalformed) {
  EXPECT_NE(test::CheckDot("digraph {"), "");
  EXPECT_NE(test::CheckDot("digraph g { a -> ; }"), "");
  EXPECT_NE(test::CheckDot("digraph g { a [label=\"x] }"), "");
  EXPECT_NE(test::CheckDot("graph g { a [label] }"), "");
  EXPECT_EQ(test::CheckDot("strict digraph \"g\" { rankdir=LR; a -> b -> c [color=red]; }"), "");
}

}  // namespace
}  // namespace affect
