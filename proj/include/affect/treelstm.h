#ifndef AFFECT_TREELSTM_H_
#define AFFECT_TREELSTM_H_

// Child-Sum Tree-LSTM over dependency trees with a per-node 3-class softmax.
//
// For node j with input x_j and children C(j):
//
//   h~_j  = sum_{k in C(j)} h_k
//   i_j   = sigma(W_i x_j + U_i h~_j + b_i)
//   f_jk  = sigma(W_f x_j + U_f h_k  + b_f)      one per child
//   o_j   = sigma(W_o x_j + U_o h~_j + b_o)
//   u_j   = tanh (W_u x_j + U_u h~_j + b_u)      (sigmoid when configured)
//   c_j   = i_j * u_j + sum_k f_jk * c_k
//   h_j   = o_j * tanh(c_j)
//   p_j   = softmax(Ws h_j + bs)

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affect/autodiff.h"
#include "affect/checkpoint.h"
#include "affect/corpus.h"
#include "affect/sentiment.h"

namespace affect {

enum class CandidateActivation { kTanh, kSigmoid };

std::string_view ToString(CandidateActivation a);
std::optional<CandidateActivation> CandidateActivationFromString(std::string_view name);

struct TreeLstmConfig {
  std::size_t input_dim = 300;
  std::size_t hidden_dim = 168;
  CandidateActivation candidate = CandidateActivation::kTanh;

  bool operator==(const TreeLstmConfig&) const = default;
};

class TreeLstmParams {
 public:
  static TreeLstmParams Zeros(const TreeLstmConfig& config);
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static TreeLstmParams Initialize(const TreeLstmConfig& config, std::uint64_t seed);
  static TreeLstmParams FromCheckpoint(const Checkpoint& ckpt);

  Checkpoint ToCheckpoint() const;

  const TreeLstmConfig& config() const { return config_; }
  const ad::ParameterSet& set() const { return set_; }
  ad::ParameterSet& mutable_set() { return set_; }

  // Shape and finiteness check; throws ad::DimensionError / ad::NonFiniteError.
  void Validate() const;

  bool operator==(const TreeLstmParams&) const = default;

 private:
  explicit TreeLstmParams(const TreeLstmConfig& config);

  TreeLstmConfig config_;
  ad::ParameterSet set_;
};

struct NodeState {
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> probs;
  Sentiment predicted = Sentiment::kNeutral;

  bool operator==(const NodeState&) const = default;
};

using NodeStates = std::map<int, NodeState>;

NodeState ForwardNode(const TreeLstmParams& params, std::span<const double> input,
                      std::span<const NodeState> children);

// x_j for a token: lowercased form, falling back to the lowercased lemma when
// the form is out of vocabulary, else the zero vector.
std::span<const double> TokenEmbedding(const EmbeddingTable& emb, const Token& token);

// Post-order evaluation of the sub-tree rooted at `root` in isolation.
NodeStates ForwardTree(const TreeLstmParams& params, const DepTree& dep,
                       const EmbeddingTable& emb, int root);
// Same, with caller-supplied child lists (children[i] = dependents of i).
NodeStates ForwardTree(const TreeLstmParams& params, const DepTree& dep,
                       const std::vector<std::vector<int>>& children, const EmbeddingTable& emb,
                       int root);

// Tape handles for one recorded sub-tree.
struct TreeGraph {
  std::map<int, ad::Var> h;
  std::map<int, ad::Var> c;
  std::map<int, ad::Var> logits;
};

TreeGraph RecordTree(ad::Tape& tape, const TreeLstmParams& params, const DepTree& dep,
                     const std::vector<std::vector<int>>& children, const EmbeddingTable& emb,
                     int root);

// Sum of node cross-entropies over `labels` (nodes outside the graph ignored).
ad::Var RecordTreeLoss(ad::Tape& tape, const TreeGraph& graph,
                       const std::map<int, Sentiment>& labels);

struct LabeledTree {
  DepTree tree;
  std::map<int, Sentiment> labels;  // always contains the root
};

struct RootLabeledTree {
  DepTree tree;
  Sentiment gold = Sentiment::kNeutral;
};

struct TrainConfig {
  double learning_rate = 0.05;
  double weight_decay = 1e-4;
  std::size_t batch_size = 25;
  int epochs = 10;
  std::uint64_t seed = 1;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean summed node loss per tree
  double train_root_accuracy = 0.0;
  std::optional<double> dev_root_accuracy;
};

struct TrainResult {
  TreeLstmParams params;
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

// Minibatch AdaGrad on summed node cross-entropy. With a dev set, returns the
// parameters of the epoch with the best dev root accuracy (earliest on ties);
// otherwise those after the last epoch.
TrainResult TrainTreeLstm(const TreeLstmParams& initial, std::span<const LabeledTree> train,
                          std::span<const RootLabeledTree> dev, const EmbeddingTable& emb,
                          const TrainConfig& config,
                          const std::function<void(const EpochLog&)>& on_epoch = {});

double EvaluateRootAccuracy(const TreeLstmParams& params, std::span<const RootLabeledTree> corpus,
                            const EmbeddingTable& emb);

}  // namespace affect

#endif  // AFFECT_TREELSTM_H_
