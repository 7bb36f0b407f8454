#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>

#include "affect/baselines.h"

namespace affect {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

using SparseRow = std::vector<std::pair<int, double>>;

SparseRow Featurize(const std::map<std::string, int>& vocab, std::span<const std::string> tokens) {
  std::map<int, double> counts;
  for (const std::string& tok : tokens) {
    auto it = vocab.find(Lower(tok));
    if (it != vocab.end()) counts[it->second] += 1.0;
  }
  return SparseRow(counts.begin(), counts.end());
}

// Parameter vector layout: weights row-major (3 x V), then 3 biases.
class Objective {
 public:
  Objective(std::vector<SparseRow> rows, std::vector<int> labels, int vocab_size, double l2)
      : rows_(std::move(rows)), labels_(std::move(labels)), vocab_(vocab_size), l2_(l2) {}

  std::size_t dim() const { return static_cast<std::size_t>(kNumClasses * vocab_ + kNumClasses); }

  double Evaluate(const std::vector<double>& theta, std::vector<double>& grad) const {
    grad.assign(theta.size(), 0.0);
    const std::size_t bias_offset = static_cast<std::size_t>(kNumClasses * vocab_);
    const double inv_n = 1.0 / static_cast<double>(rows_.size());
    double loss = 0.0;
    double scores[kNumClasses];
    for (std::size_t n = 0; n < rows_.size(); ++n) {
      for (int k = 0; k < kNumClasses; ++k) {
        double s = theta[bias_offset + k];
        for (const auto& [f, v] : rows_[n]) s += theta[static_cast<std::size_t>(k * vocab_ + f)] * v;
        scores[k] = s;
      }
      const double mx = *std::max_element(scores, scores + kNumClasses);
      double z = 0.0;
      for (double s : scores) z += std::exp(s - mx);
      const double log_z = mx + std::log(z);
      loss += log_z - scores[labels_[n]];
      for (int k = 0; k < kNumClasses; ++k) {
        const double p = std::exp(scores[k] - log_z);
        const double d = (p - (k == labels_[n] ? 1.0 : 0.0)) * inv_n;
        grad[bias_offset + k] += d;
        for (const auto& [f, v] : rows_[n]) grad[static_cast<std::size_t>(k * vocab_ + f)] += d * v;
      }
    }
    loss *= inv_n;
    double reg = 0.0;
    for (std::size_t i = 0; i < bias_offset; ++i) {
      reg += theta[i] * theta[i];
      grad[i] += l2_ * theta[i];
    }
    return loss + 0.5 * l2_ * reg;
  }

 private:
  std::vector<SparseRow> rows_;
  std::vector<int> labels_;
  int vocab_;
  double l2_;
};

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<BowSample> SubtreeSamples(std::span<const SstTree> trees) {
  std::vector<BowSample> out;
  std::function<void(const SstTree&)> visit = [&](const SstTree& node) {
    std::vector<std::string> tokens = node.Leaves();
    for (std::string& t : tokens) t = NormalizeToken(t);
    out.push_back(BowSample{std::move(tokens), CoarsenLabel(node.label)});
    for (const SstTree& child : node.children) visit(child);
  };
  for (const SstTree& t : trees) visit(t);
  return out;
}

LogRegFit TrainLogReg(std::span<const BowSample> samples, double l2,
                      const LogRegOptions& options) {
  if (samples.empty()) throw std::invalid_argument("logistic regression needs samples");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");

  BowModel model;
  model.l2 = l2;
  {
    std::map<std::string, int> vocab;
    for (const BowSample& s : samples) {
      for (const std::string& t : s.tokens) vocab.emplace(Lower(t), 0);
    }
    if (vocab.empty()) throw std::invalid_argument("logistic regression samples have no tokens");
    int next = 0;
    for (auto& [tok, idx] : vocab) idx = next++;
    model.vocab = std::move(vocab);
  }
  const int vocab_size = static_cast<int>(model.vocab.size());

  std::vector<SparseRow> rows;
  std::vector<int> labels;
  rows.reserve(samples.size());
  for (const BowSample& s : samples) {
    rows.push_back(Featurize(model.vocab, s.tokens));
    labels.push_back(ClassIndex(s.label));
  }
  const Objective objective(std::move(rows), std::move(labels), vocab_size, l2);

  std::vector<double> x(objective.dim(), 0.0);
  if (options.init_seed != 0) {
    Rng rng(options.init_seed);
    for (double& v : x) v = UniformRange(rng, -options.init_scale, options.init_scale);
  }
  std::vector<double> g;
  double f = objective.Evaluate(x, g);

  // L-BFGS with Armijo backtracking.
  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
  std::vector<double> d(x.size()), x_new(x.size()), g_new;
  int iter = 0;
  double gnorm = std::sqrt(Dot(g, g));
  for (; iter < options.max_iterations && gnorm > options.gradient_tolerance; ++iter) {
    // Two-loop recursion.
    d = g;
    std::vector<double> alphas(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [s, y] = history[k];
      alphas[k] = Dot(s, d) / Dot(y, s);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= alphas[k] * y[i];
    }
    double gamma = 1.0 / std::max(1.0, gnorm);
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      gamma = Dot(s, y) / Dot(y, y);
    }
    for (double& v : d) v *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      const double beta = Dot(y, d) / Dot(y, s);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i] * (alphas[k] - beta);
    }
    for (double& v : d) v = -v;

    double slope = Dot(g, d);
    if (slope >= 0.0) {
      history.clear();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = -g[i] / std::max(1.0, gnorm);
      slope = Dot(g, d);
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + step * d[i];
      f_new = objective.Evaluate(x_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable

    std::vector<double> s(x.size()), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    if (Dot(s, y) > 1e-12) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > options.history) history.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    gnorm = std::sqrt(Dot(g, g));
  }

  const std::size_t v = static_cast<std::size_t>(vocab_size);
  model.weights = ad::Tensor(kNumClasses, v,
                             std::vector<double>(x.begin(), x.begin() + kNumClasses * v));
  model.bias = ad::Tensor(kNumClasses, 1, std::vector<double>(x.begin() + kNumClasses * v, x.end()));
  return LogRegFit{std::move(model), f, gnorm, iter};
}

Prediction PredictLogReg(const BowModel& model, std::span<const std::string> tokens) {
  const SparseRow row = Featurize(model.vocab, tokens);
  std::vector<double> scores(kNumClasses);
  for (int k = 0; k < kNumClasses; ++k) {
    double s = model.bias[k];
    for (const auto& [f, v] : row) s += model.weights.at(k, f) * v;
    scores[k] = s;
  }
  Prediction p;
  p.probs = ad::Softmax(scores);
  p.label = ArgmaxSentiment(p.probs);
  return p;
}

Checkpoint BowModel::ToCheckpoint() const {
  Checkpoint ckpt;
  ckpt.model_kind = "logreg";
  ckpt.meta["l2"] = FormatDouble(l2);
  ckpt.vocab.resize(vocab.size());
  for (const auto& [tok, idx] : vocab) ckpt.vocab[idx] = tok;
  ckpt.tensors.Add("bias", bias);
  ckpt.tensors.Add("weights", weights);
  return ckpt;
}

BowModel BowModel::FromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.model_kind != "logreg") {
    throw CheckpointError("expected a logreg checkpoint, found '" + ckpt.model_kind + "'");
  }
  BowModel m;
  m.l2 = std::stod(ckpt.Meta("l2"));
  for (std::size_t i = 0; i < ckpt.vocab.size(); ++i) {
    m.vocab.emplace(ckpt.vocab[i], static_cast<int>(i));
  }
  m.weights = ckpt.tensors.Get("weights");
  m.bias = ckpt.tensors.Get("bias");
  if (m.weights.rows() != kNumClasses || m.weights.cols() != ckpt.vocab.size() ||
      m.bias.rows() != kNumClasses || m.bias.cols() != 1) {
    throw CheckpointError("logreg checkpoint tensor shapes do not match its vocabulary");
  }
  return m;
}

SubtreeClassifier LogRegClassifier(const BowModel& model) {
  return [&model](const DepTree& dep, const VerbSubTree& sub) {
    std::vector<std::string> tokens;
    tokens.reserve(sub.member_indices.size());
    for (int idx : sub.member_indices) tokens.push_back(dep.token(idx).form);
    return PredictLogReg(model, tokens).label;
  };
}

}  // namespace affect
