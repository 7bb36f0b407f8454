#include "affect/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "affect/treelstm.h"

namespace affect {
namespace {

ad::Tensor RandomTensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  ad::Tensor t(rows, cols);
  for (double& v : t.data()) v = UniformRange(rng, -scale, scale);
  return t;
}

constexpr ad::OpKind kComposable[] = {
    ad::OpKind::kMatVec,  ad::OpKind::kAdd,       ad::OpKind::kHadamard,
    ad::OpKind::kSigmoid, ad::OpKind::kTanh,      ad::OpKind::kSumList,
    ad::OpKind::kConcat,  ad::OpKind::kLookupRow, ad::OpKind::kAffine,
    ad::OpKind::kDropoutMaskApply,
};
constexpr std::size_t kNumComposable = std::size(kComposable);

// A graph is a fixed recipe replayed on each fresh tape.
struct GraphStep {
  ad::OpKind kind;
  std::vector<std::size_t> operands;  // indices into the value pool
  std::size_t aux = 0;
};

struct GraphRecipe {
  std::size_t dim = 0;
  std::vector<GraphStep> steps;
  ad::Tensor mask;
  std::size_t gold = 0;
};

GraphRecipe MakeRecipe(Rng& rng, std::size_t dim, std::size_t forced) {
  GraphRecipe r;
  r.dim = dim;
  r.mask = ad::Tensor(dim, 1);
  for (double& v : r.mask.data()) v = UniformUnit(rng) < 0.5 ? 0.0 : 2.0;
  r.gold = UniformIndex(rng, 3);
  // Pool starts as {x, y}; every step appends one dim-vector.
  std::size_t pool = 2;
  const std::size_t n_steps = 4 + UniformIndex(rng, 7);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const ad::OpKind kind =
        k == 0 ? kComposable[forced % kNumComposable] : kComposable[UniformIndex(rng, kNumComposable)];
    GraphStep s{kind, {}, 0};
    auto pick = [&] { return UniformIndex(rng, pool); };
    switch (kind) {
      case ad::OpKind::kAdd:
      case ad::OpKind::kHadamard:
      case ad::OpKind::kConcat:
        s.operands = {pick(), pick()};
        break;
      case ad::OpKind::kSumList: {
        const std::size_t n = 1 + UniformIndex(rng, 3);
        for (std::size_t j = 0; j < n; ++j) s.operands.push_back(pick());
        break;
      }
      case ad::OpKind::kLookupRow:
        s.aux = UniformIndex(rng, 4);
        break;
      default:
        s.operands = {pick()};
        break;
    }
    r.steps.push_back(std::move(s));
    ++pool;
  }
  return r;
}

ad::ParameterSet RecipeParams(const GraphRecipe& r, Rng& rng) {
  ad::ParameterSet p;
  const std::size_t d = r.dim;
  p.Add("A", RandomTensor(d, d, rng));
  p.Add("B", RandomTensor(d, 2 * d, rng));
  p.Add("E", RandomTensor(4, d, rng));
  p.Add("W_out", RandomTensor(3, d, rng));
  p.Add("b", RandomTensor(d, 1, rng));
  p.Add("b_out", RandomTensor(3, 1, rng));
  p.Add("x", RandomTensor(d, 1, rng));
  p.Add("y", RandomTensor(d, 1, rng));
  return p;
}

ad::Var BuildRecipe(ad::Tape& tape, const ad::ParameterSet& p, const GraphRecipe& r) {
  std::vector<ad::Var> pool = {tape.Parameter(p, "x"), tape.Parameter(p, "y")};
  const ad::Var a = tape.Parameter(p, "A");
  const ad::Var b = tape.Parameter(p, "b");
  for (const GraphStep& s : r.steps) {
    ad::Var out;
    switch (s.kind) {
      case ad::OpKind::kMatVec:
        out = tape.MatVec(a, pool[s.operands[0]]);
        break;
      case ad::OpKind::kAdd:
        out = tape.Add(pool[s.operands[0]], pool[s.operands[1]]);
        break;
      case ad::OpKind::kHadamard:
        out = tape.Hadamard(pool[s.operands[0]], pool[s.operands[1]]);
        break;
      case ad::OpKind::kSigmoid:
        out = tape.Sigmoid(pool[s.operands[0]]);
        break;
      case ad::OpKind::kTanh:
        out = tape.Tanh(pool[s.operands[0]]);
        break;
      case ad::OpKind::kSumList: {
        std::vector<ad::Var> terms;
        for (std::size_t i : s.operands) terms.push_back(pool[i]);
        out = tape.SumList(terms);
        break;
      }
      case ad::OpKind::kConcat: {
        const ad::Var parts[] = {pool[s.operands[0]], pool[s.operands[1]]};
        out = tape.MatVec(tape.Parameter(p, "B"), tape.Concat(parts));
        break;
      }
      case ad::OpKind::kLookupRow:
        out = tape.LookupRow(tape.Parameter(p, "E"), s.aux);
        break;
      case ad::OpKind::kAffine:
        out = tape.Affine(a, pool[s.operands[0]], b);
        break;
      case ad::OpKind::kDropoutMaskApply:
        out = tape.DropoutMaskApply(pool[s.operands[0]], tape.Constant(r.mask));
        break;
      default:
        throw std::logic_error("unexpected op in gradient recipe");
    }
    pool.push_back(out);
  }
  const ad::Var logits =
      tape.Affine(tape.Parameter(p, "W_out"), pool.back(), tape.Parameter(p, "b_out"));
  return tape.SoftmaxCrossEntropy(logits, r.gold);
}

double EvalLoss(const ad::ParameterSet& params, const LossBuilder& build) {
  ad::Tape tape;
  const ad::Var loss = build(tape, params);
  return tape.Value(loss)[0];
}

}  // namespace

bool GradCheckReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const GradCheckCase& c) { return c.passed(); });
}

double GradCheckReport::max_relative_error() const {
  double m = 0.0;
  for (const GradCheckCase& c : cases) m = std::max(m, c.max_relative_error);
  return m;
}

std::size_t GradCheckReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [](const GradCheckCase& c) { return !c.passed(); }));
}

double RelativeError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckCase CheckGradients(std::string name, ad::ParameterSet& params, const LossBuilder& build,
                             double step, double tolerance) {
  GradCheckCase result;
  result.name = std::move(name);
  result.tolerance = tolerance;
  ad::Gradients analytic;
  {
    ad::Tape tape;
    analytic = tape.Backward(build(tape, params), params);
  }
  for (auto& [pname, tensor] : params.mutable_tensors()) {
    const ad::Tensor& g = analytic.at(pname);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor[i];
      tensor[i] = saved + step;
      const double plus = EvalLoss(params, build);
      tensor[i] = saved - step;
      const double minus = EvalLoss(params, build);
      tensor[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      result.max_relative_error = std::max(result.max_relative_error, RelativeError(g[i], numeric));
      ++result.coordinates;
    }
  }
  return result;
}

DepTree RandomDepTree(Rng& rng, int n) {
  static constexpr const char* kTags[] = {"NOUN", "VERB", "ADJ", "DET", "AUX", "PRON", "ADV"};
  DepTree dep;
  dep.sentence_id = "random";
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  Shuffle(order, rng);
  dep.tokens.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int idx = order[static_cast<std::size_t>(k)];
    Token& t = dep.tokens[static_cast<std::size_t>(idx - 1)];
    t.index = idx;
    t.form = "w" + std::to_string(idx);
    t.lemma = t.form;
    t.upos = kTags[UniformIndex(rng, std::size(kTags))];
    t.head = k == 0 ? 0 : order[UniformIndex(rng, static_cast<std::size_t>(k))];
    t.deprel = k == 0 ? "root" : "dep";
  }
  dep.root_index = order[0];
  return dep;
}

GradCheckReport RunGradientChecks(const GradCheckOptions& options) {
  GradCheckReport report;
  Rng rng(options.seed);
  for (int g = 0; g < options.graphs; ++g) {
    const std::size_t dim = 2 + UniformIndex(rng, 3);
    const GraphRecipe recipe = MakeRecipe(rng, dim, static_cast<std::size_t>(g));
    ad::ParameterSet params = RecipeParams(recipe, rng);
    report.cases.push_back(CheckGradients(
        "graph-" + std::to_string(g), params,
        [&recipe](ad::Tape& tape, const ad::ParameterSet& p) { return BuildRecipe(tape, p, recipe); },
        options.step, options.tolerance));
  }
  for (int t = 0; t < options.trees; ++t) {
    TreeLstmConfig cfg;
    cfg.input_dim = 2 + UniformIndex(rng, 3);
    cfg.hidden_dim = 2 + UniformIndex(rng, 3);
    cfg.candidate = t % 2 == 0 ? CandidateActivation::kTanh : CandidateActivation::kSigmoid;
    TreeLstmParams params = TreeLstmParams::Initialize(cfg, rng());
    // Non-zero biases so every bias gradient is exercised away from symmetry.
    for (auto& [name, tensor] : params.mutable_set().mutable_tensors()) {
      if (name.starts_with("b_")) {
        for (double& v : tensor.data()) v = UniformRange(rng, -0.5, 0.5);
      }
    }
    const DepTree dep = RandomDepTree(rng, 1 + static_cast<int>(UniformIndex(rng, 7)));
    EmbeddingTable emb(cfg.input_dim);
    for (const Token& tok : dep.tokens) {
      std::vector<double> v(cfg.input_dim);
      for (double& x : v) x = UniformRange(rng, -1.0, 1.0);
      emb.Insert(tok.form, std::move(v));
    }
    std::map<int, Sentiment> labels;
    labels[dep.root_index] = kAllSentiments[UniformIndex(rng, 3)];
    for (const Token& tok : dep.tokens) {
      if (UniformUnit(rng) < 0.5) labels[tok.index] = kAllSentiments[UniformIndex(rng, 3)];
    }
    const auto children = dep.ChildLists();
    report.cases.push_back(CheckGradients(
        "tree-" + std::to_string(t), params.mutable_set(),
        [&](ad::Tape& tape, const ad::ParameterSet&) {
          const TreeGraph graph = RecordTree(tape, params, dep, children, emb, dep.root_index);
          return RecordTreeLoss(tape, graph, labels);
        },
        options.step, options.tolerance));
  }
  return report;
}

}  // namespace affect
