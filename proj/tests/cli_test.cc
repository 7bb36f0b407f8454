#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.h"
#include "json.hpp"
#include "test_util.h"

namespace affect {
namespace {

using nlohmann::json;
using test::ReadFile;
using test::SourcePath;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path TempDir(const std::string& name) {
  return std::filesystem::path(AFFECT_BINARY_DIR) / "cli_test" / name;
}

std::string ShippedConfig() { return SourcePath("data/synthetic/run.toml").string(); }
std::string ShippedCheckpoint() { return SourcePath("data/checkpoints/treelstm.ckpt").string(); }

std::vector<json> JsonLines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

TEST(CliTrain, WritesCheckpointAndOneMetricsLinePerEpoch) {
  const auto dir = TempDir("train");
  const auto cfg = test::WriteSubsetConfig(dir, 20, 5, "hidden = 16\nepochs = 2\n");
  const Result r = RunCli({"train", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "ckpt" / "treelstm.ckpt"));
  const auto metrics = JsonLines(ReadFile(dir / "ckpt" / "treelstm.ckpt.metrics.jsonl"));
  ASSERT_EQ(metrics.size(), 2u);
  EXPECT_EQ(metrics[0]["epoch"], 1);
  EXPECT_EQ(metrics[1]["epoch"], 2);
  EXPECT_TRUE(metrics[1]["dev_accuracy"].is_number());
}

TEST(CliTrain, RepeatedRunsGiveIdenticalCheckpoints) {
  std::string bytes[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = TempDir("repeat" + std::to_string(run));
    const auto cfg = test::WriteSubsetConfig(dir, 20, 5, "hidden = 16\nepochs = 2\n");
    ASSERT_EQ(RunCli({"train", "--config", cfg.string()}).code, 0);
    bytes[run] = ReadFile(dir / "ckpt" / "treelstm.ckpt");
  }
  EXPECT_FALSE(bytes[0].empty());
  EXPECT_EQ(bytes[0], bytes[1]);
}

TEST(CliTrain, BaselinesTrain) {
  for (const std::string model : {"logreg", "blstm"}) {
    const auto dir = TempDir("train_" + model);
    const auto cfg = test::WriteSubsetConfig(dir, 20, 5, "blstm_hidden = 8\nblstm_epochs = 1\n");
    const Result r = RunCli({"train", "--config", cfg.string(), "--model", model});
    ASSERT_EQ(r.code, 0) << model << ": " << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "ckpt" / (model + ".ckpt")));
  }
}

TEST(CliTrain, MissingEmbeddingsIsUserErrorAndWritesNothing) {
  const auto dir = TempDir("missing");
  const auto cfg = test::WriteSubsetConfig(dir, 5, 2, "embeddings = \"nowhere.txt\"\n");
  const Result r = RunCli({"train", "--config", cfg.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("embeddings"), std::string::npos) << r.err;
  EXPECT_TRUE(std::filesystem::is_empty(dir / "ckpt"));
}

TEST(CliTrain, UnknownConfigKeyIsUserError) {
  const auto dir = TempDir("unknown_key");
  const auto cfg = test::WriteSubsetConfig(dir, 5, 2, "hiden = 16\n");
  const Result r = RunCli({"train", "--config", cfg.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hiden"), std::string::npos) << r.err;
}

TEST(CliArgs, UnknownSubcommandAndMissingFlag) {
  EXPECT_EQ(RunCli({"frobnicate"}).code, 1);
  EXPECT_EQ(RunCli({"viz"}).code, 1);
  EXPECT_EQ(RunCli({"eval", "--dataset", "imdb"}).code, 1);
}

TEST(CliExtract, WalkthroughAssociations) {
  const Result r = RunCli({"extract", "--config", ShippedConfig(), "--checkpoint",
                           ShippedCheckpoint(), "--input",
                           SourcePath("tests/data/walkthrough.conllu").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = JsonLines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0]["id"], "fig1");
  const json& a = lines[0]["associations"];
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0]["target"], "the food");
  EXPECT_EQ(a[0]["verb"], "was");
  EXPECT_EQ(a[0]["sentiment"], "positive");
  EXPECT_EQ(a[1]["target"], "The Four Seasons");
  EXPECT_EQ(a[1]["verb"], "left");
  EXPECT_EQ(a[1]["sentiment"], "negative");
  for (const json& assoc : a) EXPECT_FALSE(assoc["trace"].empty());
}

TEST(CliExtract, VerblessSentenceHasNoAssociations) {
  const auto dir = TempDir("verbless");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "in.conllu");
    f << "# sent_id = v1\n"
         "1\tgreat\tgreat\tADJ\t_\t_\t2\tamod\t_\t_\n"
         "2\tpizza\tpizza\tNOUN\t_\t_\t0\troot\t_\t_\n\n";
  }
  const Result r = RunCli({"extract", "--config", ShippedConfig(), "--checkpoint",
                           ShippedCheckpoint(), "--input", (dir / "in.conllu").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "{\"associations\":[],\"id\":\"v1\"}\n");
}

TEST(CliExtract, HiddenSizeMismatchIsUserError) {
  const auto dir = TempDir("mismatch");
  const auto cfg = test::WriteSubsetConfig(dir, 1, 1, "hidden = 17\n");
  const Result bad = RunCli({"extract", "--config", cfg.string(), "--checkpoint",
                             ShippedCheckpoint(), "--input",
                             SourcePath("tests/data/walkthrough.conllu").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("hidden"), std::string::npos) << bad.err;
}

TEST(CliExtract, MissingInputIsUserError) {
  const Result r = RunCli({"extract", "--config", ShippedConfig(), "--input", "/nonexistent.conllu"});
  EXPECT_EQ(r.code, 1);
}

TEST(CliExtract, WrongModelKindIsUserError) {
  const Result r = RunCli({"extract", "--config", ShippedConfig(), "--checkpoint",
                           ShippedCheckpoint(), "--model", "logreg", "--input",
                           SourcePath("tests/data/walkthrough.conllu").string()});
  EXPECT_EQ(r.code, 1);
}

std::filesystem::path AbsaConfig(const std::string& name, const std::string& jsonl,
                                 const std::string& conllu) {
  const auto dir = TempDir(name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream cfg(dir / "run.toml");
  cfg << "embeddings = \"" << SourcePath("data/synthetic/embeddings.txt").string() << "\"\n"
      << "absa = \"" << jsonl << "\"\nabsa_parses = \"" << conllu << "\"\n"
      << "hidden = 168\n";
  return dir / "run.toml";
}

TEST(CliEval, AbsaFixtureCounts) {
  const auto cfg = AbsaConfig("absa", SourcePath("tests/data/absa_fixture.jsonl").string(),
                              SourcePath("tests/data/absa_fixture.conllu").string());
  const Result r = RunCli({"eval", "--config", cfg.string(), "--checkpoint", ShippedCheckpoint(),
                           "--dataset", "absa"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["gold_aspects"], 12);
  EXPECT_EQ(j["identified"], 10);
  EXPECT_EQ(j["model"], "treelstm");
  const Result c = RunCli({"eval", "--config", cfg.string(), "--checkpoint", ShippedCheckpoint(),
                           "--dataset", "absa", "--match-mode", "char"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(json::parse(c.out)["identified"], 11);
}

TEST(CliEval, ZeroAspectDatasetHasNullRatios) {
  const auto dir = TempDir("zero_src");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "a.jsonl");
    f << "{\"id\":\"z1\",\"text\":\"pizza\",\"aspects\":[]}\n";
    std::ofstream p(dir / "a.conllu");
    p << "# sent_id = z1\n1\tpizza\tpizza\tNOUN\t_\t_\t0\troot\t_\t_\n\n";
  }
  const auto cfg = AbsaConfig("zero", (dir / "a.jsonl").string(), (dir / "a.conllu").string());
  const Result r = RunCli({"eval", "--config", cfg.string(), "--checkpoint", ShippedCheckpoint(),
                           "--dataset", "absa"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["identification_recall"].is_null());
  EXPECT_EQ(j["identified"], 0);
}

TEST(CliEval, SstDevRootAccuracy) {
  const Result r = RunCli({"eval", "--config", ShippedConfig(), "--dataset", "sst", "--split", "dev"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["dataset"], "sst");
  EXPECT_GE(j["root_accuracy"].get<double>(), 0.0);
  EXPECT_LE(j["root_accuracy"].get<double>(), 1.0);
}

TEST(CliViz, Fig3MatchesGolden) {
  const Result r = RunCli({"viz", "--config", ShippedConfig(), "--input",
                           SourcePath("tests/data/walkthrough.conllu").string(), "--sentence",
                           "fig3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, ReadFile(SourcePath("tests/data/fig3.dot")));
}

TEST(CliViz, UnknownSentenceIsUserError) {
  const Result r = RunCli({"viz", "--config", ShippedConfig(), "--input",
                           SourcePath("tests/data/walkthrough.conllu").string(), "--sentence",
                           "nope"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
}

TEST(CliGradcheck, PassesAndCatchesCorruptRule) {
  const Result ok = RunCli({"gradcheck"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const Result bad = RunCli({"gradcheck", "--corrupt", "tanh"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
  const Result again = RunCli({"gradcheck"});
  EXPECT_EQ(again.code, 0);
}

}  // namespace
}  // namespace affect
