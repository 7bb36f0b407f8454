#include "affect/treelstm.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "affect/random.h"

namespace affect {
namespace {

constexpr const char* kGates[] = {"f", "i", "o", "u"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Tape handles for every parameter, fetched once per tape.
struct ParamVars {
  ad::Var w[4], u[4], b[4];
  ad::Var ws, bs;
  ad::Var zero_hidden;
};

enum Gate { kF = 0, kI = 1, kO = 2, kU = 3 };

ParamVars BindParams(ad::Tape& tape, const TreeLstmParams& params) {
  ParamVars p;
  const auto& set = params.set();
  for (int g = 0; g < 4; ++g) {
    p.w[g] = tape.Parameter(set, std::string("W_") + kGates[g]);
    p.u[g] = tape.Parameter(set, std::string("U_") + kGates[g]);
    p.b[g] = tape.Parameter(set, std::string("b_") + kGates[g]);
  }
  p.ws = tape.Parameter(set, "W_s");
  p.bs = tape.Parameter(set, "b_s");
  p.zero_hidden = tape.Constant(ad::Tensor(params.config().hidden_dim, 1));
  return p;
}

struct NodeVars {
  ad::Var h, c, logits;
};

NodeVars RecordNode(ad::Tape& tape, const ParamVars& p, CandidateActivation candidate,
                    ad::Var x, std::span<const NodeVars> children) {
  ad::Var h_sum = p.zero_hidden;
  if (!children.empty()) {
    std::vector<ad::Var> hs;
    hs.reserve(children.size());
    for (const NodeVars& ch : children) hs.push_back(ch.h);
    h_sum = tape.SumList(hs);
  }
  auto gate_pre = [&](Gate g, ad::Var hidden) {
    return tape.Add(tape.Affine(p.w[g], x, p.b[g]), tape.MatVec(p.u[g], hidden));
  };
  const ad::Var i = tape.Sigmoid(gate_pre(kI, h_sum));
  const ad::Var o = tape.Sigmoid(gate_pre(kO, h_sum));
  const ad::Var u_pre = gate_pre(kU, h_sum);
  const ad::Var u =
      candidate == CandidateActivation::kTanh ? tape.Tanh(u_pre) : tape.Sigmoid(u_pre);

  std::vector<ad::Var> cell_terms;
  cell_terms.reserve(children.size() + 1);
  cell_terms.push_back(tape.Hadamard(i, u));
  if (!children.empty()) {
    const ad::Var wf_x = tape.Affine(p.w[kF], x, p.b[kF]);
    for (const NodeVars& ch : children) {
      const ad::Var f = tape.Sigmoid(tape.Add(wf_x, tape.MatVec(p.u[kF], ch.h)));
      cell_terms.push_back(tape.Hadamard(f, ch.c));
    }
  }
  NodeVars out;
  out.c = tape.SumList(cell_terms);
  out.h = tape.Hadamard(o, tape.Tanh(out.c));
  out.logits = tape.Affine(p.ws, out.h, p.bs);
  return out;
}

NodeState StateFrom(const ad::Tape& tape, const NodeVars& v) {
  NodeState s;
  const auto h = tape.Value(v.h).data();
  const auto c = tape.Value(v.c).data();
  s.h.assign(h.begin(), h.end());
  s.c.assign(c.begin(), c.end());
  s.probs = ad::Softmax(tape.Value(v.logits).data());
  s.predicted = ArgmaxSentiment(s.probs);
  return s;
}

// Children before parents, starting from `root`.
std::vector<int> PostOrder(const std::vector<std::vector<int>>& children, int root) {
  std::vector<int> order;
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < children[node].size()) {
      const int child = children[node][next++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

ad::Tensor UniformMatrix(std::size_t rows, std::size_t cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  ad::Tensor t(rows, cols);
  for (double& v : t.data()) v = UniformRange(rng, -a, a);
  return t;
}

}  // namespace

std::string_view ToString(CandidateActivation a) {
  return a == CandidateActivation::kTanh ? "tanh" : "sigmoid";
}

std::optional<CandidateActivation> CandidateActivationFromString(std::string_view name) {
  if (name == "tanh") return CandidateActivation::kTanh;
  if (name == "sigmoid") return CandidateActivation::kSigmoid;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parameters

TreeLstmParams::TreeLstmParams(const TreeLstmConfig& config) : config_(config) {
  if (config.input_dim == 0 || config.hidden_dim == 0) {
    throw ad::DimensionError("tree-lstm dimensions must be positive");
  }
}

TreeLstmParams TreeLstmParams::Zeros(const TreeLstmConfig& config) {
  TreeLstmParams p(config);
  const std::size_t in = config.input_dim;
  const std::size_t hid = config.hidden_dim;
  for (const char* g : kGates) {
    p.set_.Add(std::string("W_") + g, ad::Tensor(hid, in));
    p.set_.Add(std::string("U_") + g, ad::Tensor(hid, hid));
    p.set_.Add(std::string("b_") + g, ad::Tensor(hid, 1));
  }
  p.set_.Add("W_s", ad::Tensor(kNumClasses, hid));
  p.set_.Add("b_s", ad::Tensor(kNumClasses, 1));
  return p;
}

TreeLstmParams TreeLstmParams::Initialize(const TreeLstmConfig& config, std::uint64_t seed) {
  TreeLstmParams p = Zeros(config);
  Rng rng(seed);
  // Alphabetical order keeps initialisation independent of insertion order.
  for (auto& [name, t] : p.set_.mutable_tensors()) {
    if (name[0] == 'b') continue;
    t = UniformMatrix(t.rows(), t.cols(), rng);
  }
  return p;
}

TreeLstmParams TreeLstmParams::FromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.model_kind != "treelstm") {
    throw CheckpointError("expected a treelstm checkpoint, found '" + ckpt.model_kind + "'");
  }
  TreeLstmConfig config;
  config.input_dim = std::stoul(ckpt.Meta("input_dim"));
  config.hidden_dim = std::stoul(ckpt.Meta("hidden_dim"));
  const auto act = CandidateActivationFromString(ckpt.Meta("candidate_activation"));
  if (!act) throw CheckpointError("unknown candidate_activation in checkpoint");
  config.candidate = *act;
  TreeLstmParams p(config);
  p.set_ = ckpt.tensors;
  p.Validate();
  return p;
}

Checkpoint TreeLstmParams::ToCheckpoint() const {
  Checkpoint ckpt;
  ckpt.model_kind = "treelstm";
  ckpt.meta["input_dim"] = std::to_string(config_.input_dim);
  ckpt.meta["hidden_dim"] = std::to_string(config_.hidden_dim);
  ckpt.meta["candidate_activation"] = std::string(ToString(config_.candidate));
  ckpt.tensors = set_;
  return ckpt;
}

void TreeLstmParams::Validate() const {
  const TreeLstmParams reference = Zeros(config_);
  if (set_.tensors().size() != reference.set_.tensors().size()) {
    throw ad::DimensionError("tree-lstm parameter set has unexpected tensors");
  }
  for (const auto& [name, expected] : reference.set_.tensors()) {
    if (!set_.Contains(name)) throw ad::DimensionError("missing tree-lstm parameter " + name);
    const ad::Tensor& t = set_.Get(name);
    if (t.rows() != expected.rows() || t.cols() != expected.cols()) {
      throw ad::DimensionError("tree-lstm parameter " + name + " has shape " + t.ShapeString() +
                               ", expected " + expected.ShapeString());
    }
    t.CheckFinite("tree-lstm parameter " + name);
  }
}

// ---------------------------------------------------------------------------
// Forward

NodeState ForwardNode(const TreeLstmParams& params, std::span<const double> input,
                      std::span<const NodeState> children) {
  const std::size_t hid = params.config().hidden_dim;
  if (input.size() != params.config().input_dim) {
    throw ad::DimensionError("input vector has " + std::to_string(input.size()) +
                             " entries, expected " + std::to_string(params.config().input_dim));
  }
  ad::Tape tape;
  const ParamVars p = BindParams(tape, params);
  std::vector<NodeVars> child_vars;
  child_vars.reserve(children.size());
  for (const NodeState& ch : children) {
    if (ch.h.size() != hid || ch.c.size() != hid) {
      throw ad::DimensionError("child state dimension does not match hidden_dim");
    }
    NodeVars v;
    v.h = tape.Constant(ad::Tensor::Vector(ch.h));
    v.c = tape.Constant(ad::Tensor::Vector(ch.c));
    v.logits = v.h;
    child_vars.push_back(v);
  }
  const ad::Var x = tape.Constant(ad::Tensor::Vector({input.begin(), input.end()}));
  const NodeVars out = RecordNode(tape, p, params.config().candidate, x, child_vars);
  return StateFrom(tape, out);
}

std::span<const double> TokenEmbedding(const EmbeddingTable& emb, const Token& token) {
  const std::string form = Lower(token.form);
  if (emb.Contains(form)) return emb.Lookup(form);
  return emb.Lookup(Lower(token.lemma));
}

TreeGraph RecordTree(ad::Tape& tape, const TreeLstmParams& params, const DepTree& dep,
                     const std::vector<std::vector<int>>& children, const EmbeddingTable& emb,
                     int root) {
  if (!dep.ValidIndex(root)) {
    throw std::out_of_range("sub-tree root " + std::to_string(root) + " out of range 1.." +
                            std::to_string(dep.size()));
  }
  if (emb.dimension() != params.config().input_dim) {
    throw ad::DimensionError("embedding dimension " + std::to_string(emb.dimension()) +
                             " does not match model input_dim " +
                             std::to_string(params.config().input_dim));
  }
  const ParamVars p = BindParams(tape, params);
  std::map<int, NodeVars> vars;
  std::vector<NodeVars> child_vars;
  for (int node : PostOrder(children, root)) {
    child_vars.clear();
    for (int ch : children[node]) child_vars.push_back(vars.at(ch));
    const auto e = TokenEmbedding(emb, dep.token(node));
    const ad::Var x = tape.Constant(ad::Tensor::Vector({e.begin(), e.end()}));
    vars[node] = RecordNode(tape, p, params.config().candidate, x, child_vars);
  }
  TreeGraph graph;
  for (const auto& [node, v] : vars) {
    graph.h[node] = v.h;
    graph.c[node] = v.c;
    graph.logits[node] = v.logits;
  }
  return graph;
}

ad::Var RecordTreeLoss(ad::Tape& tape, const TreeGraph& graph,
                       const std::map<int, Sentiment>& labels) {
  std::vector<ad::Var> terms;
  for (const auto& [node, label] : labels) {
    auto it = graph.logits.find(node);
    if (it == graph.logits.end()) continue;
    terms.push_back(tape.SoftmaxCrossEntropy(it->second, ClassIndex(label)));
  }
  if (terms.empty()) throw std::invalid_argument("tree has no labelled nodes in the graph");
  return tape.SumList(terms);
}

NodeStates ForwardTree(const TreeLstmParams& params, const DepTree& dep,
                       const std::vector<std::vector<int>>& children, const EmbeddingTable& emb,
                       int root) {
  ad::Tape tape;
  const TreeGraph graph = RecordTree(tape, params, dep, children, emb, root);
  NodeStates states;
  for (const auto& [node, h] : graph.h) {
    states[node] = StateFrom(tape, NodeVars{h, graph.c.at(node), graph.logits.at(node)});
  }
  return states;
}

NodeStates ForwardTree(const TreeLstmParams& params, const DepTree& dep,
                       const EmbeddingTable& emb, int root) {
  return ForwardTree(params, dep, dep.ChildLists(), emb, root);
}

// ---------------------------------------------------------------------------
// Training

double EvaluateRootAccuracy(const TreeLstmParams& params, std::span<const RootLabeledTree> corpus,
                            const EmbeddingTable& emb) {
  if (corpus.empty()) throw std::invalid_argument("cannot evaluate an empty corpus");
  std::size_t correct = 0;
  for (const RootLabeledTree& item : corpus) {
    const NodeStates states = ForwardTree(params, item.tree, emb, item.tree.root_index);
    if (states.at(item.tree.root_index).predicted == item.gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

TrainResult TrainTreeLstm(const TreeLstmParams& initial, std::span<const LabeledTree> train,
                          std::span<const RootLabeledTree> dev, const EmbeddingTable& emb,
                          const TrainConfig& config,
                          const std::function<void(const EpochLog&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("training corpus is empty");
  if (config.batch_size == 0 || config.epochs <= 0 || !(config.learning_rate > 0.0)) {
    throw std::invalid_argument("training configuration values must be positive");
  }
  for (const LabeledTree& item : train) {
    if (item.labels.empty()) {
      throw std::invalid_argument("tree '" + item.tree.sentence_id + "' has no labels");
    }
  }

  TreeLstmParams params = initial;
  params.Validate();
  const ad::AdagradConfig opt{config.learning_rate, config.weight_decay, 1e-8};
  ad::AdagradState opt_state;
  Rng rng(config.seed);

  std::vector<std::vector<std::vector<int>>> child_lists;
  child_lists.reserve(train.size());
  for (const LabeledTree& item : train) child_lists.push_back(item.tree.ChildLists());

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result{params, {}, 0};
  double best_dev = -1.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Shuffle(order, rng);
    double epoch_loss = 0.0;
    std::size_t root_correct = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      ad::Gradients grads = ad::ZeroGradients(params.set());
      for (std::size_t k = start; k < end; ++k) {
        const LabeledTree& item = train[order[k]];
        ad::Tape tape;
        const TreeGraph graph =
            RecordTree(tape, params, item.tree, child_lists[order[k]], emb, item.tree.root_index);
        const ad::Var loss = RecordTreeLoss(tape, graph, item.labels);
        const double loss_value = tape.Value(loss)[0];
        if (!std::isfinite(loss_value)) {
          throw ad::NonFiniteError("non-finite loss on tree '" + item.tree.sentence_id + "'");
        }
        epoch_loss += loss_value;
        const auto root_probs =
            ad::Softmax(tape.Value(graph.logits.at(item.tree.root_index)).data());
        auto gold = item.labels.find(item.tree.root_index);
        if (gold != item.labels.end() && ArgmaxSentiment(root_probs) == gold->second) {
          ++root_correct;
        }
        tape.Backward(loss, grads);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& [name, g] : grads) {
        for (double& v : g.data()) v *= scale;
      }
      ad::AdagradStep(params.mutable_set(), grads, opt_state, opt);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = epoch_loss / static_cast<double>(train.size());
    entry.train_root_accuracy =
        static_cast<double>(root_correct) / static_cast<double>(train.size());
    if (!dev.empty()) {
      entry.dev_root_accuracy = EvaluateRootAccuracy(params, dev, emb);
      if (*entry.dev_root_accuracy > best_dev) {
        best_dev = *entry.dev_root_accuracy;
        result.params = params;
        result.best_epoch = epoch;
      }
    } else {
      result.params = params;
      result.best_epoch = epoch;
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return result;
}

}  // namespace affect
