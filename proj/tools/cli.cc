#include "cli.h"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "affect/associate.h"
#include "affect/baselines.h"
#include "affect/checkpoint.h"
#include "affect/config.h"
#include "affect/corpus.h"
#include "affect/gradcheck.h"
#include "affect/syntax.h"
#include "affect/treelstm.h"
#include "json.hpp"

namespace affect::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string model;
  std::string checkpoint;
  std::string input;
  std::string dataset = "absa";
  std::string split = "test";
  std::string sentence;
  std::string corrupt;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<bool> include_aux;
  std::optional<std::string> match_mode;
};

std::shared_ptr<spdlog::logger> Logger() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_logger_st("affect-tree");
    l->set_pattern("[%l] %v");
    return l;
  }();
  const char* env = std::getenv("AFFECT_TREE_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    logger->set_level(spdlog::level::err);
  } else if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else {
    logger->set_level(spdlog::level::info);
  }
  return logger;
}

RunConfig ResolveConfig(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : LoadRunConfig(o.config);
  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.include_aux) cfg.include_aux = *o.include_aux;
  if (o.match_mode) cfg.Set("match_mode", *o.match_mode);
  cfg.Validate();
  return cfg;
}

void Require(const std::filesystem::path& p, const char* key) {
  if (p.empty()) throw ConfigError(std::string("config key '") + key + "' is required");
}

std::filesystem::path CheckpointPath(const Options& o, const RunConfig& cfg,
                                     const std::string& model) {
  if (!o.checkpoint.empty()) return o.checkpoint;
  if (cfg.checkpoint_dir.empty()) {
    throw ConfigError("no --checkpoint given and checkpoint_dir unset");
  }
  return cfg.checkpoint_dir / (model + ".ckpt");
}

void WriteTextAtomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void AddVocab(std::unordered_set<std::string>& vocab, std::span<const DepTree> trees) {
  for (const DepTree& d : trees) {
    for (const Token& t : d.tokens) {
      for (const std::string* s : {&t.form, &t.lemma}) {
        std::string lower = *s;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        vocab.insert(std::move(lower));
        vocab.insert(NormalizeToken(*s));
      }
    }
  }
}

EmbeddingTable LoadTable(const RunConfig& cfg, const std::unordered_set<std::string>& vocab,
                         std::size_t expected_dim = 0) {
  Require(cfg.embeddings, "embeddings");
  std::ifstream in(cfg.embeddings);
  if (!in) throw ConfigError("cannot open embeddings " + cfg.embeddings.string());
  EmbeddingTable emb = LoadEmbeddings(in, vocab, expected_dim);
  if (emb.dimension() == 0) throw ConfigError("embeddings file holds no vectors");
  if (expected_dim != 0 && emb.dimension() != expected_dim) {
    throw ad::DimensionError("embedding dimension " + std::to_string(emb.dimension()) +
                             " does not match checkpoint input_dim " +
                             std::to_string(expected_dim));
  }
  return emb;
}

struct SstSplit {
  std::vector<SstTree> trees;
  std::vector<DepTree> parses;  // empty when not requested
};

SstSplit LoadSst(const std::filesystem::path& trees, const std::filesystem::path& parses,
                 bool need_parses, const char* name) {
  SstSplit s;
  Require(trees, name);
  s.trees = ParseSstFile(trees);
  if (need_parses) {
    Require(parses, (std::string(name) + "_parses").c_str());
    s.parses = ParseConlluFile(parses);
    if (s.parses.size() != s.trees.size()) {
      throw CorpusError(std::string(name) + ": " + std::to_string(s.trees.size()) +
                        " treebank lines but " + std::to_string(s.parses.size()) + " parses");
    }
  }
  return s;
}

std::vector<std::string> NormalizedLeaves(const SstTree& t) {
  std::vector<std::string> out = t.Leaves();
  for (std::string& s : out) s = NormalizeToken(s);
  return out;
}

std::vector<RootLabeledTree> RootLabeled(const SstSplit& s) {
  std::vector<RootLabeledTree> out;
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    out.push_back(RootLabeledTree{s.parses[i], CoarsenLabel(s.trees[i].label)});
  }
  return out;
}

std::vector<SequenceSample> Sequences(const SstSplit& s) {
  std::vector<SequenceSample> out;
  for (const SstTree& t : s.trees) out.push_back(SequenceSample{NormalizedLeaves(t), CoarsenLabel(t.label)});
  return out;
}

json MetricsLine(int epoch, double loss, double train_acc, std::optional<double> dev) {
  json j;
  j["epoch"] = epoch;
  j["loss"] = loss;
  j["train_accuracy"] = train_acc;
  j["dev_accuracy"] = dev ? json(*dev) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

int CmdTrain(const Options& o, std::ostream& out) {
  auto log = Logger();
  const RunConfig cfg = ResolveConfig(o);
  const std::string model = o.model.empty() ? "treelstm" : o.model;
  const std::filesystem::path ckpt_path = CheckpointPath(o, cfg, model);
  if (model != "logreg") Require(cfg.embeddings, "embeddings");

  const bool dev_present = !cfg.sst_dev.empty();
  const SstSplit train = LoadSst(cfg.sst_train, cfg.sst_train_parses, model == "treelstm", "sst_train");
  SstSplit dev;
  if (dev_present) dev = LoadSst(cfg.sst_dev, cfg.sst_dev_parses, model == "treelstm", "sst_dev");

  Checkpoint ckpt;
  std::ostringstream metrics;
  if (model == "treelstm") {
    std::unordered_set<std::string> vocab;
    AddVocab(vocab, train.parses);
    AddVocab(vocab, dev.parses);
    const EmbeddingTable emb = LoadTable(cfg, vocab);
    std::vector<LabeledTree> labeled;
    labeled.reserve(train.trees.size());
    for (std::size_t i = 0; i < train.trees.size(); ++i) {
      labeled.push_back(LabeledTree{train.parses[i], ProjectSstLabels(train.parses[i], train.trees[i])});
    }
    const std::vector<RootLabeledTree> dev_set = RootLabeled(dev);
    TreeLstmConfig mc{emb.dimension(), cfg.hidden, cfg.candidate_activation};
    log->info("training treelstm on {} trees (input {}, hidden {})", labeled.size(), mc.input_dim,
              mc.hidden_dim);
    const TrainResult result = TrainTreeLstm(
        TreeLstmParams::Initialize(mc, cfg.seed), labeled, dev_set, emb, cfg.treelstm_train(),
        [&](const EpochLog& e) {
          metrics << MetricsLine(e.epoch, e.loss, e.train_root_accuracy, e.dev_root_accuracy).dump()
                  << "\n";
          log->info("epoch {} loss {:.6f} train {:.4f} dev {}", e.epoch, e.loss,
                    e.train_root_accuracy,
                    e.dev_root_accuracy ? std::to_string(*e.dev_root_accuracy) : "-");
        });
    ckpt = result.params.ToCheckpoint();
    ckpt.meta["best_epoch"] = std::to_string(result.best_epoch);
  } else if (model == "logreg") {
    const std::vector<BowSample> samples = SubtreeSamples(train.trees);
    log->info("training logreg on {} constituents", samples.size());
    const LogRegFit fit = TrainLogReg(samples, cfg.logreg_l2);
    auto root_acc = [&](const SstSplit& s) -> std::optional<double> {
      if (s.trees.empty()) return std::nullopt;
      std::size_t correct = 0;
      for (const SstTree& t : s.trees) {
        if (PredictLogReg(fit.model, NormalizedLeaves(t)).label == CoarsenLabel(t.label)) ++correct;
      }
      return static_cast<double>(correct) / static_cast<double>(s.trees.size());
    };
    json j = MetricsLine(fit.iterations, fit.objective, *root_acc(train), root_acc(dev));
    j["gradient_norm"] = fit.gradient_norm;
    metrics << j.dump() << "\n";
    ckpt = fit.model.ToCheckpoint();
  } else {
    std::unordered_set<std::string> vocab;
    for (const SstSplit* s : std::initializer_list<const SstSplit*>{&train, &dev}) {
      for (const SstTree& t : s->trees) {
        for (std::string& tok : NormalizedLeaves(t)) vocab.insert(std::move(tok));
      }
    }
    const EmbeddingTable emb = LoadTable(cfg, vocab);
    const BlstmConfig mc{emb.dimension(), cfg.blstm_hidden, cfg.blstm_dropout_keep};
    BlstmTrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.weight_decay = cfg.weight_decay;
    tc.batch_size = cfg.batch;
    tc.epochs = cfg.blstm_epochs;
    tc.seed = cfg.seed;
    const std::vector<SequenceSample> train_seq = Sequences(train);
    const std::vector<SequenceSample> dev_seq = Sequences(dev);
    log->info("training blstm on {} sentences", train_seq.size());
    const BlstmFit fit = TrainBlstm(train_seq, dev_seq, emb, mc, tc, [&](const BlstmEpochLog& e) {
      metrics << MetricsLine(e.epoch, e.loss, e.train_accuracy, e.dev_accuracy).dump() << "\n";
      log->info("epoch {} loss {:.6f}", e.epoch, e.loss);
    });
    ckpt = fit.model.ToCheckpoint();
    ckpt.meta["best_epoch"] = std::to_string(fit.best_epoch);
  }
  ckpt.meta["seed"] = std::to_string(cfg.seed);

  if (ckpt_path.has_parent_path()) std::filesystem::create_directories(ckpt_path.parent_path());
  SaveCheckpointAtomic(ckpt, ckpt_path);
  std::filesystem::path metrics_path = ckpt_path;
  metrics_path += ".metrics.jsonl";
  WriteTextAtomic(metrics_path, metrics.str());
  out << "wrote " << ckpt_path.string() << "\n";
  return kExitOk;
}

// A loaded model of any kind, usable as a sub-tree classifier.
struct LoadedModel {
  std::string kind;
  std::optional<TreeLstmParams> treelstm;
  std::optional<BowModel> logreg;
  std::optional<BlstmModel> blstm;
  std::optional<EmbeddingTable> emb;

  SubtreeClassifier Classifier() const {
    if (treelstm) return TreeLstmClassifier(*treelstm, *emb);
    if (logreg) return LogRegClassifier(*logreg);
    return BlstmClassifier(*blstm, *emb);
  }
};

LoadedModel LoadModel(const Options& o, const RunConfig& cfg,
                      const std::unordered_set<std::string>& vocab) {
  const std::string model = o.model.empty() ? "treelstm" : o.model;
  const Checkpoint ckpt = LoadCheckpoint(CheckpointPath(o, cfg, model));
  if (!o.model.empty() && ckpt.model_kind != o.model) {
    throw ConfigError("--model " + o.model + " but checkpoint holds " + ckpt.model_kind);
  }
  LoadedModel m;
  m.kind = ckpt.model_kind;
  if (m.kind == "treelstm") {
    m.treelstm = TreeLstmParams::FromCheckpoint(ckpt);
    if (m.treelstm->config().hidden_dim != cfg.hidden) {
      throw ad::DimensionError("checkpoint hidden_dim " +
                               std::to_string(m.treelstm->config().hidden_dim) +
                               " does not match config hidden " + std::to_string(cfg.hidden));
    }
    m.emb = LoadTable(cfg, vocab, m.treelstm->config().input_dim);
  } else if (m.kind == "logreg") {
    m.logreg = BowModel::FromCheckpoint(ckpt);
  } else if (m.kind == "blstm") {
    m.blstm = BlstmModel::FromCheckpoint(ckpt);
    if (m.blstm->config.hidden_dim != cfg.blstm_hidden) {
      throw ad::DimensionError("checkpoint hidden_dim does not match config blstm_hidden");
    }
    m.emb = LoadTable(cfg, vocab, m.blstm->config.input_dim);
  } else {
    throw CheckpointError("unknown model kind '" + m.kind + "'");
  }
  return m;
}

std::vector<DepTree> LoadInputParses(const Options& o, const RunConfig& cfg) {
  const std::filesystem::path input = o.input.empty() ? cfg.conllu : std::filesystem::path(o.input);
  if (input.empty()) throw ConfigError("no --input given and conllu unset");
  if (!std::filesystem::exists(input)) throw ConfigError("input does not exist: " + input.string());
  return ParseConlluFile(input);
}

int CmdExtract(const Options& o, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(o);
  const std::vector<DepTree> parses = LoadInputParses(o, cfg);
  std::unordered_set<std::string> vocab;
  AddVocab(vocab, parses);
  const LoadedModel model = LoadModel(o, cfg, vocab);
  const SyntaxOptions syntax{cfg.include_aux};
  for (const DepTree& dep : parses) {
    json assocs = json::array();
    auto add = [&](const NounChunk& chunk, int verb, Sentiment s, const std::map<int, Sentiment>* trace) {
      json a;
      a["target"] = chunk.text;
      a["verb"] = dep.token(verb).form;
      a["verb_index"] = verb;
      a["sentiment"] = std::string(ToString(s));
      json t = json::array();
      if (trace) {
        for (const auto& [idx, label] : *trace) {
          t.push_back({{"index", idx}, {"form", dep.token(idx).form}, {"sentiment", std::string(ToString(label))}});
        }
      }
      a["trace"] = std::move(t);
      assocs.push_back(std::move(a));
    };
    if (model.treelstm) {
      for (const TargetAssociation& a : LabelTargets(dep, *model.treelstm, *model.emb, syntax)) {
        add(a.chunk, a.verb_index, a.sentiment, &a.node_trace);
      }
    } else {
      for (const LabeledTarget& t : ClassifyTargets(dep, model.Classifier(), syntax)) {
        add(t.chunk, t.verb_index, t.sentiment, nullptr);
      }
    }
    out << json{{"id", dep.sentence_id}, {"associations", std::move(assocs)}}.dump() << "\n";
  }
  return kExitOk;
}

int CmdEval(const Options& o, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(o);
  if (o.dataset == "sst") {
    const bool test = o.split == "test";
    const SstSplit split = LoadSst(test ? cfg.sst_test : cfg.sst_dev,
                                   test ? cfg.sst_test_parses : cfg.sst_dev_parses,
                                   o.model.empty() || o.model == "treelstm",
                                   test ? "sst_test" : "sst_dev");
    std::unordered_set<std::string> vocab;
    AddVocab(vocab, split.parses);
    for (const SstTree& t : split.trees) {
      for (std::string& tok : NormalizedLeaves(t)) vocab.insert(std::move(tok));
    }
    const LoadedModel model = LoadModel(o, cfg, vocab);
    if (split.trees.empty()) throw CorpusError("sst split is empty");
    std::size_t correct = 0;
    if (model.treelstm) {
      correct = static_cast<std::size_t>(
          EvaluateRootAccuracy(*model.treelstm, RootLabeled(split), *model.emb) *
              static_cast<double>(split.trees.size()) + 0.5);
    } else {
      for (const SstTree& t : split.trees) {
        const auto tokens = NormalizedLeaves(t);
        const Prediction p = model.logreg ? PredictLogReg(*model.logreg, tokens)
                                          : PredictBlstm(*model.blstm, tokens, *model.emb);
        if (p.label == CoarsenLabel(t.label)) ++correct;
      }
    }
    json j = EvalReport{}.ToJson();
    for (auto& [k, v] : j.items()) v = nullptr;
    j["dataset"] = "sst";
    j["model"] = model.kind;
    j["sentences"] = split.trees.size();
    j["root_correct"] = correct;
    j["root_accuracy"] = static_cast<double>(correct) / static_cast<double>(split.trees.size());
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  Require(cfg.absa, "absa");
  Require(cfg.absa_parses, "absa_parses");
  const std::vector<AbsaRecord> records = LoadAbsaFile(cfg.absa);
  std::map<std::string, DepTree> parses;
  std::vector<DepTree> list = ParseConlluFile(cfg.absa_parses);
  std::unordered_set<std::string> vocab;
  AddVocab(vocab, list);
  for (DepTree& d : list) {
    const std::string id = d.sentence_id;
    parses.emplace(id, std::move(d));
  }
  const LoadedModel model = LoadModel(o, cfg, vocab);
  EvalOptions eo;
  eo.match_mode = cfg.match_mode;
  eo.syntax.include_aux = cfg.include_aux;
  eo.threads = cfg.threads;
  const EvalReport report = EvaluateAbsa(records, parses, model.Classifier(), eo);
  json j = report.ToJson();
  j["dataset"] = "absa";
  j["model"] = model.kind;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int CmdViz(const Options& o, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(o);
  const std::vector<DepTree> parses = LoadInputParses(o, cfg);
  auto it = std::find_if(parses.begin(), parses.end(),
                         [&](const DepTree& d) { return d.sentence_id == o.sentence; });
  if (it == parses.end()) throw ConfigError("unknown sentence id '" + o.sentence + "'");
  const DepTree& dep = *it;
  const std::vector<int> verbs = FindVerbs(dep, cfg.include_aux);
  std::vector<NounChunk> targets;
  for (const TargetPair& p : IdentifyTargets(dep, SyntaxOptions{cfg.include_aux})) {
    targets.push_back(p.chunk);
  }

  std::map<int, Sentiment> trace;
  const bool have_ckpt = !o.checkpoint.empty() ||
                         (!cfg.checkpoint_dir.empty() &&
                          std::filesystem::exists(cfg.checkpoint_dir / "treelstm.ckpt"));
  if (have_ckpt && !verbs.empty()) {
    std::unordered_set<std::string> vocab;
    AddVocab(vocab, std::span<const DepTree>(&dep, 1));
    Options tree_opts = o;
    if (tree_opts.model.empty()) tree_opts.model = "treelstm";
    const LoadedModel model = LoadModel(tree_opts, cfg, vocab);
    if (!model.treelstm) throw ConfigError("viz needs a treelstm checkpoint");
    // Outer verbs first so each token ends up with its nearest verb's run.
    std::vector<std::pair<int, int>> by_depth;
    for (int v : verbs) {
      int depth = 0;
      for (int h = dep.token(v).head; h != 0; h = dep.token(h).head) ++depth;
      by_depth.emplace_back(depth, v);
    }
    std::sort(by_depth.begin(), by_depth.end());
    const auto children = dep.ChildLists();
    for (const auto& [depth, v] : by_depth) {
      for (const auto& [idx, state] : ForwardTree(*model.treelstm, dep, children, *model.emb, v)) {
        trace[idx] = state.predicted;
      }
    }
  }
  out << EmitDot(dep, trace, targets, verbs);
  return kExitOk;
}

int CmdGradcheck(const Options& o, std::ostream& out) {
  GradCheckOptions go;
  if (o.seed) go.seed = *o.seed;
  if (!o.corrupt.empty()) {
    std::optional<ad::OpKind> kind;
    for (int k = 0; k <= static_cast<int>(ad::OpKind::kSoftmaxCrossEntropy); ++k) {
      if (ToString(static_cast<ad::OpKind>(k)) == o.corrupt) kind = static_cast<ad::OpKind>(k);
    }
    if (!kind) throw ConfigError("unknown op kind '" + o.corrupt + "'");
    ad::testing::CorruptGradientRule(kind);
  }
  GradCheckReport report;
  try {
    report = RunGradientChecks(go);
  } catch (...) {
    ad::testing::CorruptGradientRule(std::nullopt);
    throw;
  }
  ad::testing::CorruptGradientRule(std::nullopt);
  double graphs = 0.0, trees = 0.0;
  for (const GradCheckCase& c : report.cases) {
    double& worst = c.name.starts_with("graph") ? graphs : trees;
    worst = std::max(worst, c.max_relative_error);
    if (!c.passed()) out << "FAIL " << c.name << " max_rel_err=" << c.max_relative_error << "\n";
  }
  out << "graphs: " << go.graphs << " max_rel_err=" << graphs << "\n";
  out << "trees: " << go.trees << " max_rel_err=" << trees << "\n";
  out << (report.passed() ? "PASS" : "FAIL") << " (" << report.failures() << " of "
      << report.cases.size() << " checks failed, tolerance " << go.tolerance << ")\n";
  return report.passed() ? kExitOk : kExitUserError;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affect target extraction and sentiment association", "affect-tree"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run config file")->check(CLI::ExistingFile);
    sub->add_option("--threads", o.threads, "Evaluation threads");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--include-aux", o.include_aux, "Treat AUX tokens as verbs (true/false)");
    sub->add_option("--match-mode", o.match_mode, "Aspect matching: token or char")
        ->check(CLI::IsMember({"token", "char"}));
    sub->add_option("--checkpoint", o.checkpoint, "Checkpoint path");
    sub->add_option("--model", o.model, "Model kind")
        ->check(CLI::IsMember({"treelstm", "logreg", "blstm"}));
  };
  CLI::App* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(train);
  CLI::App* extract = app.add_subcommand("extract", "Emit target associations as JSON lines");
  add_common(extract);
  extract->add_option("--input", o.input, "CoNLL-U parses");
  CLI::App* eval = app.add_subcommand("eval", "Score a checkpoint");
  add_common(eval);
  eval->add_option("--dataset", o.dataset, "sst or absa")->check(CLI::IsMember({"sst", "absa"}));
  eval->add_option("--split", o.split, "SST split: dev or test")->check(CLI::IsMember({"dev", "test"}));
  CLI::App* viz = app.add_subcommand("viz", "Render one parse as Graphviz DOT");
  add_common(viz);
  viz->add_option("--input", o.input, "CoNLL-U parses");
  viz->add_option("--sentence", o.sentence, "Sentence id")->required();
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("--seed", o.seed, "Random seed");
  gradcheck->add_option("--corrupt", o.corrupt, "")->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (train->parsed()) return CmdTrain(o, out);
    if (extract->parsed()) return CmdExtract(o, out);
    if (eval->parsed()) return CmdEval(o, out);
    if (viz->parsed()) return CmdViz(o, out);
    return CmdGradcheck(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ad::DimensionError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUserError;
}

}  // namespace affect::cli
