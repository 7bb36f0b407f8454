#ifndef AFFECT_BASELINES_H_
#define AFFECT_BASELINES_H_

// Comparison models that see sub-trees in flattened form: a bag-of-words
// multinomial logistic regression and a bidirectional LSTM.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "affect/associate.h"
#include "affect/autodiff.h"
#include "affect/checkpoint.h"
#include "affect/corpus.h"
#include "affect/random.h"
#include "affect/sentiment.h"

namespace affect {

struct Prediction {
  Sentiment label = Sentiment::kNeutral;
  std::vector<double> probs;
};

// ---------------------------------------------------------------------------
// Bag-of-words logistic regression

struct BowSample {
  std::vector<std::string> tokens;  // multiset; order irrelevant
  Sentiment label = Sentiment::kNeutral;
};

struct BowModel {
  std::map<std::string, int> vocab;  // lowercased token -> feature index
  ad::Tensor weights;                // 3 x |vocab|
  ad::Tensor bias;                   // 3 x 1
  double l2 = 0.0;

  Checkpoint ToCheckpoint() const;
  static BowModel FromCheckpoint(const Checkpoint& ckpt);
};

struct LogRegOptions {
  double gradient_tolerance = 1e-6;  // on the 2-norm of the full gradient
  int max_iterations = 5000;
  int history = 10;
  // Starting point: zeros when `init_seed` is 0, otherwise uniform +-init_scale.
  std::uint64_t init_seed = 0;
  double init_scale = 0.5;
};

struct LogRegFit {
  BowModel model;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Minimises mean cross-entropy + (l2 / 2) * ||weights||^2 (bias unpenalised)
// with L-BFGS. Features are lowercased token counts.
LogRegFit TrainLogReg(std::span<const BowSample> samples, double l2,
                      const LogRegOptions& options = {});

Prediction PredictLogReg(const BowModel& model, std::span<const std::string> tokens);

// One sample per treebank constituent: its normalised leaves and coarse label.
std::vector<BowSample> SubtreeSamples(std::span<const SstTree> trees);

// ---------------------------------------------------------------------------
// Bidirectional LSTM

struct BlstmConfig {
  std::size_t input_dim = 300;
  std::size_t hidden_dim = 64;
  double dropout_keep = 0.5;
};

struct BlstmModel {
  BlstmConfig config;
  ad::ParameterSet params;

  static BlstmModel Initialize(const BlstmConfig& config, std::uint64_t seed);
  Checkpoint ToCheckpoint() const;
  static BlstmModel FromCheckpoint(const Checkpoint& ckpt);
};

struct SequenceSample {
  std::vector<std::string> tokens;
  Sentiment label = Sentiment::kNeutral;
};

// Records logits for `tokens`. With a mask (2*hidden entries, values 0 or
// 1/keep), dropout is applied to the concatenated final states; without one
// the network runs in inference mode.
ad::Var RecordBlstmLogits(ad::Tape& tape, const BlstmModel& model,
                          std::span<const std::string> tokens, const EmbeddingTable& emb,
                          const ad::Tensor* dropout_mask);

// Inverted dropout mask: each entry is 1/keep with probability keep, else 0.
ad::Tensor SampleDropoutMask(std::size_t size, double keep, Rng& rng);

struct BlstmTrainConfig {
  double learning_rate = 0.05;
  double weight_decay = 1e-4;
  std::size_t batch_size = 25;
  int epochs = 10;
  std::uint64_t seed = 1;
};

struct BlstmEpochLog {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> dev_accuracy;
};

struct BlstmFit {
  BlstmModel model;
  std::vector<BlstmEpochLog> log;
  int best_epoch = 0;
};

BlstmFit TrainBlstm(std::span<const SequenceSample> train, std::span<const SequenceSample> dev,
                    const EmbeddingTable& emb, const BlstmConfig& model_config,
                    const BlstmTrainConfig& config,
                    const std::function<void(const BlstmEpochLog&)>& on_epoch = {});

Prediction PredictBlstm(const BlstmModel& model, std::span<const std::string> tokens,
                        const EmbeddingTable& emb);

// ---------------------------------------------------------------------------
// Sub-tree adapters for the association evaluation.

SubtreeClassifier LogRegClassifier(const BowModel& model);
SubtreeClassifier BlstmClassifier(const BlstmModel& model, const EmbeddingTable& emb);

}  // namespace affect

#endif  // AFFECT_BASELINES_H_
