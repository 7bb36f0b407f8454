#include <algorithm>
#include <cctype>
#include <cmath>

#include "affect/baselines.h"

namespace affect {
namespace {

constexpr const char* kDirections[] = {"bw", "fw"};
constexpr const char* kGates[] = {"f", "g", "i", "o"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Name(const char* dir, const char* kind, const char* gate) {
  return std::string(dir) + "_" + kind + "_" + gate;
}

struct LstmVars {
  ad::Var w[4], u[4], b[4];  // indexed like kGates
};

LstmVars Bind(ad::Tape& tape, const ad::ParameterSet& params, const char* dir) {
  LstmVars v;
  for (int g = 0; g < 4; ++g) {
    v.w[g] = tape.Parameter(params, Name(dir, "W", kGates[g]));
    v.u[g] = tape.Parameter(params, Name(dir, "U", kGates[g]));
    v.b[g] = tape.Parameter(params, Name(dir, "b", kGates[g]));
  }
  return v;
}

// Runs one direction over `inputs` in the given order; returns the last h.
ad::Var RunDirection(ad::Tape& tape, const LstmVars& p, std::span<const ad::Var> inputs,
                     bool reverse, ad::Var zero) {
  ad::Var h = zero;
  ad::Var c = zero;
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    const ad::Var x = inputs[reverse ? inputs.size() - 1 - step : step];
    auto pre = [&](int g) { return tape.Add(tape.Affine(p.w[g], x, p.b[g]), tape.MatVec(p.u[g], h)); };
    const ad::Var f = tape.Sigmoid(pre(0));
    const ad::Var cand = tape.Tanh(pre(1));
    const ad::Var i = tape.Sigmoid(pre(2));
    const ad::Var o = tape.Sigmoid(pre(3));
    c = tape.Add(tape.Hadamard(f, c), tape.Hadamard(i, cand));
    h = tape.Hadamard(o, tape.Tanh(c));
  }
  return h;
}

ad::Tensor UniformMatrix(std::size_t rows, std::size_t cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  ad::Tensor t(rows, cols);
  for (double& v : t.data()) v = UniformRange(rng, -a, a);
  return t;
}

}  // namespace

BlstmModel BlstmModel::Initialize(const BlstmConfig& config, std::uint64_t seed) {
  if (config.input_dim == 0 || config.hidden_dim == 0 || !(config.dropout_keep > 0.0) ||
      config.dropout_keep > 1.0) {
    throw std::invalid_argument("invalid BLSTM configuration");
  }
  BlstmModel m;
  m.config = config;
  Rng rng(seed);
  const std::size_t in = config.input_dim;
  const std::size_t hid = config.hidden_dim;
  for (const char* dir : kDirections) {
    for (const char* g : kGates) {
      m.params.Add(Name(dir, "W", g), UniformMatrix(hid, in, rng));
      m.params.Add(Name(dir, "U", g), UniformMatrix(hid, hid, rng));
      // Forget gates start open.
      m.params.Add(Name(dir, "b", g), ad::Tensor::Filled(hid, 1, g[0] == 'f' ? 1.0 : 0.0));
    }
  }
  m.params.Add("dense_W", UniformMatrix(kNumClasses, 2 * hid, rng));
  m.params.Add("dense_b", ad::Tensor(kNumClasses, 1));
  return m;
}

Checkpoint BlstmModel::ToCheckpoint() const {
  Checkpoint ckpt;
  ckpt.model_kind = "blstm";
  ckpt.meta["dropout_keep"] = FormatDouble(config.dropout_keep);
  ckpt.meta["hidden_dim"] = std::to_string(config.hidden_dim);
  ckpt.meta["input_dim"] = std::to_string(config.input_dim);
  ckpt.tensors = params;
  return ckpt;
}

BlstmModel BlstmModel::FromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.model_kind != "blstm") {
    throw CheckpointError("expected a blstm checkpoint, found '" + ckpt.model_kind + "'");
  }
  BlstmConfig config;
  config.input_dim = std::stoul(ckpt.Meta("input_dim"));
  config.hidden_dim = std::stoul(ckpt.Meta("hidden_dim"));
  config.dropout_keep = std::stod(ckpt.Meta("dropout_keep"));
  const BlstmModel shape = Initialize(config, 1);
  for (const auto& [name, t] : shape.params.tensors()) {
    if (!ckpt.tensors.Contains(name)) throw CheckpointError("blstm checkpoint lacks " + name);
    const ad::Tensor& got = ckpt.tensors.Get(name);
    if (got.rows() != t.rows() || got.cols() != t.cols()) {
      throw CheckpointError("blstm tensor " + name + " has shape " + got.ShapeString());
    }
  }
  BlstmModel m;
  m.config = config;
  m.params = ckpt.tensors;
  return m;
}

ad::Tensor SampleDropoutMask(std::size_t size, double keep, Rng& rng) {
  ad::Tensor mask(size, 1);
  for (double& v : mask.data()) v = UniformUnit(rng) < keep ? 1.0 / keep : 0.0;
  return mask;
}

ad::Var RecordBlstmLogits(ad::Tape& tape, const BlstmModel& model,
                          std::span<const std::string> tokens, const EmbeddingTable& emb,
                          const ad::Tensor* dropout_mask) {
  if (tokens.empty()) throw std::invalid_argument("BLSTM input sequence is empty");
  if (emb.dimension() != model.config.input_dim) {
    throw ad::DimensionError("embedding dimension does not match BLSTM input_dim");
  }
  std::vector<ad::Var> inputs;
  inputs.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    const auto e = emb.Lookup(Lower(tok));
    inputs.push_back(tape.Constant(ad::Tensor::Vector({e.begin(), e.end()})));
  }
  const ad::Var zero = tape.Constant(ad::Tensor(model.config.hidden_dim, 1));
  const LstmVars fw = Bind(tape, model.params, "fw");
  const LstmVars bw = Bind(tape, model.params, "bw");
  const ad::Var h_fw = RunDirection(tape, fw, inputs, false, zero);
  const ad::Var h_bw = RunDirection(tape, bw, inputs, true, zero);
  const ad::Var parts[] = {h_fw, h_bw};
  ad::Var features = tape.Concat(parts);
  if (dropout_mask != nullptr) {
    features = tape.DropoutMaskApply(features, tape.Constant(*dropout_mask));
  }
  return tape.Affine(tape.Parameter(model.params, "dense_W"), features,
                     tape.Parameter(model.params, "dense_b"));
}

Prediction PredictBlstm(const BlstmModel& model, std::span<const std::string> tokens,
                        const EmbeddingTable& emb) {
  ad::Tape tape;
  const ad::Var logits = RecordBlstmLogits(tape, model, tokens, emb, nullptr);
  Prediction p;
  p.probs = ad::Softmax(tape.Value(logits).data());
  p.label = ArgmaxSentiment(p.probs);
  return p;
}

BlstmFit TrainBlstm(std::span<const SequenceSample> train, std::span<const SequenceSample> dev,
                    const EmbeddingTable& emb, const BlstmConfig& model_config,
                    const BlstmTrainConfig& config,
                    const std::function<void(const BlstmEpochLog&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("BLSTM training set is empty");
  for (const SequenceSample& s : train) {
    if (s.tokens.empty()) throw std::invalid_argument("BLSTM training sample has no tokens");
  }
  if (config.batch_size == 0 || config.epochs <= 0) {
    throw std::invalid_argument("training configuration values must be positive");
  }
  BlstmModel model = BlstmModel::Initialize(model_config, config.seed);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const ad::AdagradConfig opt{config.learning_rate, config.weight_decay, 1e-8};
  ad::AdagradState state;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  BlstmFit fit{model, {}, 0};
  double best_dev = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Shuffle(order, rng);
    double total_loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      ad::Gradients grads = ad::ZeroGradients(model.params);
      for (std::size_t k = start; k < end; ++k) {
        const SequenceSample& s = train[order[k]];
        const ad::Tensor mask =
            SampleDropoutMask(2 * model_config.hidden_dim, model_config.dropout_keep, rng);
        ad::Tape tape;
        const ad::Var logits = RecordBlstmLogits(tape, model, s.tokens, emb, &mask);
        const ad::Var loss = tape.SoftmaxCrossEntropy(logits, ClassIndex(s.label));
        const double value = tape.Value(loss)[0];
        if (!std::isfinite(value)) throw ad::NonFiniteError("non-finite BLSTM loss");
        total_loss += value;
        if (ArgmaxSentiment(ad::Softmax(tape.Value(logits).data())) == s.label) ++correct;
        tape.Backward(loss, grads);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& [name, g] : grads) {
        for (double& v : g.data()) v *= scale;
      }
      ad::AdagradStep(model.params, grads, state, opt);
    }
    BlstmEpochLog entry;
    entry.epoch = epoch;
    entry.loss = total_loss / static_cast<double>(train.size());
    entry.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    if (!dev.empty()) {
      std::size_t dev_correct = 0;
      for (const SequenceSample& s : dev) {
        if (PredictBlstm(model, s.tokens, emb).label == s.label) ++dev_correct;
      }
      entry.dev_accuracy = static_cast<double>(dev_correct) / static_cast<double>(dev.size());
      if (*entry.dev_accuracy > best_dev) {
        best_dev = *entry.dev_accuracy;
        fit.model = model;
        fit.best_epoch = epoch;
      }
    } else {
      fit.model = model;
      fit.best_epoch = epoch;
    }
    fit.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return fit;
}

SubtreeClassifier BlstmClassifier(const BlstmModel& model, const EmbeddingTable& emb) {
  return [&model, &emb](const DepTree& dep, const VerbSubTree& sub) {
    std::vector<std::string> tokens;
    tokens.reserve(sub.member_indices.size());
    for (int idx : sub.member_indices) tokens.push_back(dep.token(idx).form);
    return PredictBlstm(model, tokens, emb).label;
  };
}

}  // namespace affect
