#include "affect/autodiff.h"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace affect::ad {
namespace {

std::atomic<int> g_corrupted_rule{-1};

bool IsCorrupted(OpKind kind) {
  return g_corrupted_rule.load(std::memory_order_relaxed) == static_cast<int>(kind);
}

double Logistic(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

[[noreturn]] void ShapeFail(OpKind kind, const std::vector<const Tensor*>& shapes) {
  std::string msg = "dimension mismatch in ";
  msg += ToString(kind);
  msg += ":";
  for (const Tensor* t : shapes) {
    msg += " ";
    msg += t->ShapeString();
  }
  throw DimensionError(msg);
}

void AddInto(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

std::string_view ToString(OpKind kind) {
  switch (kind) {
    case OpKind::kParameter:
      return "parameter";
    case OpKind::kConstant:
      return "constant";
    case OpKind::kMatVec:
      return "matvec";
    case OpKind::kAdd:
      return "add";
    case OpKind::kHadamard:
      return "hadamard";
    case OpKind::kSigmoid:
      return "sigmoid";
    case OpKind::kTanh:
      return "tanh";
    case OpKind::kSumList:
      return "sum_list";
    case OpKind::kConcat:
      return "concat";
    case OpKind::kLookupRow:
      return "lookup_row";
    case OpKind::kAffine:
      return "affine";
    case OpKind::kDropoutMaskApply:
      return "dropout_mask_apply";
    case OpKind::kSoftmaxCrossEntropy:
      return "softmax_cross_entropy";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ParameterSet

Tensor& ParameterSet::Add(std::string name, Tensor value) {
  auto [it, inserted] = tensors_.emplace(std::move(name), std::move(value));
  if (!inserted) {
    throw std::invalid_argument("duplicate parameter name: " + it->first);
  }
  return it->second;
}

bool ParameterSet::Contains(std::string_view name) const {
  return tensors_.find(name) != tensors_.end();
}

const Tensor& ParameterSet::Get(std::string_view name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return it->second;
}

Tensor& ParameterSet::Get(std::string_view name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return it->second;
}

std::size_t ParameterSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

Gradients ZeroGradients(const ParameterSet& params) {
  Gradients grads;
  for (const auto& [name, t] : params.tensors()) {
    grads.emplace(name, Tensor(t.rows(), t.cols()));
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Tape

const Tape::Node& Tape::NodeAt(Var v) const {
  if (v.id >= nodes_.size()) {
    throw std::out_of_range("tape variable " + std::to_string(v.id) + " does not exist");
  }
  return nodes_[v.id];
}

const Tensor& Tape::Value(Var v) const {
  const Node& n = NodeAt(v);
  return n.external != nullptr ? *n.external : n.value;
}

Var Tape::Parameter(const ParameterSet& params, std::string_view name) {
  const Tensor* storage = &params.Get(name);
  if (auto it = parameter_nodes_.find(storage); it != parameter_nodes_.end()) {
    return it->second;
  }
  Node node;
  node.kind = OpKind::kParameter;
  node.external = storage;
  node.name = std::string(name);
  nodes_.push_back(std::move(node));
  const Var v{static_cast<std::uint32_t>(nodes_.size() - 1)};
  parameter_nodes_.emplace(storage, v);
  return v;
}

Var Tape::Constant(Tensor value) {
  if (value.empty()) throw DimensionError("constant must be non-empty");
  value.CheckFinite("constant");
  Node node;
  node.kind = OpKind::kConstant;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::Record(OpKind kind, std::span<const Var> operands, std::size_t aux) {
  if (kind == OpKind::kParameter || kind == OpKind::kConstant) {
    throw std::invalid_argument("leaves are created with Parameter() or Constant()");
  }
  Tensor value = Forward(kind, operands, aux);
  Node node;
  node.kind = kind;
  node.operands.assign(operands.begin(), operands.end());
  node.aux = aux;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tensor Tape::Forward(OpKind kind, std::span<const Var> operands, std::size_t aux) const {
  std::vector<const Tensor*> in;
  in.reserve(operands.size());
  for (Var v : operands) in.push_back(&Value(v));

  auto expect_arity = [&](std::size_t n) {
    if (in.size() != n) {
      throw DimensionError(std::string(ToString(kind)) + " expects " + std::to_string(n) +
                           " operands, got " + std::to_string(in.size()));
    }
  };

  switch (kind) {
    case OpKind::kMatVec: {
      expect_arity(2);
      const Tensor& m = *in[0];
      const Tensor& v = *in[1];
      if (!v.is_vector() || m.cols() != v.rows()) ShapeFail(kind, in);
      Tensor out(m.rows(), 1);
      const std::size_t cols = m.cols();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = &m.data()[r * cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * v[c];
        out[r] = acc;
      }
      return out;
    }
    case OpKind::kAffine: {
      expect_arity(3);
      const Tensor& w = *in[0];
      const Tensor& x = *in[1];
      const Tensor& b = *in[2];
      if (!x.is_vector() || !b.is_vector() || w.cols() != x.rows() || w.rows() != b.rows()) {
        ShapeFail(kind, in);
      }
      Tensor out(w.rows(), 1);
      const std::size_t cols = w.cols();
      for (std::size_t r = 0; r < w.rows(); ++r) {
        const double* row = &w.data()[r * cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        out[r] = acc + b[r];
      }
      return out;
    }
    case OpKind::kAdd:
    case OpKind::kHadamard:
    case OpKind::kDropoutMaskApply: {
      expect_arity(2);
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      if (a.rows() != b.rows() || a.cols() != b.cols()) ShapeFail(kind, in);
      Tensor out(a.rows(), a.cols());
      for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = kind == OpKind::kAdd ? a[i] + b[i] : a[i] * b[i];
      }
      return out;
    }
    case OpKind::kSigmoid:
    case OpKind::kTanh: {
      expect_arity(1);
      const Tensor& a = *in[0];
      Tensor out(a.rows(), a.cols());
      for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = kind == OpKind::kSigmoid ? Logistic(a[i]) : std::tanh(a[i]);
      }
      return out;
    }
    case OpKind::kSumList: {
      if (in.empty()) throw DimensionError("sum_list needs at least one operand");
      for (const Tensor* t : in) {
        if (t->rows() != in[0]->rows() || t->cols() != in[0]->cols()) ShapeFail(kind, in);
      }
      Tensor out(in[0]->rows(), in[0]->cols());
      std::vector<double> column(in.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = 0; k < in.size(); ++k) column[k] = (*in[k])[i];
        std::sort(column.begin(), column.end());
        double acc = 0.0;
        for (double v : column) acc += v;
        out[i] = acc;
      }
      return out;
    }
    case OpKind::kConcat: {
      if (in.empty()) throw DimensionError("concat needs at least one operand");
      std::size_t rows = 0;
      for (const Tensor* t : in) {
        if (t->cols() != in[0]->cols()) ShapeFail(kind, in);
        rows += t->rows();
      }
      Tensor out(rows, in[0]->cols());
      std::size_t offset = 0;
      for (const Tensor* t : in) {
        std::copy(t->data().begin(), t->data().end(), out.data().begin() + offset);
        offset += t->size();
      }
      return out;
    }
    case OpKind::kLookupRow: {
      expect_arity(1);
      const Tensor& table = *in[0];
      if (aux >= table.rows()) {
        throw DimensionError("lookup_row: row " + std::to_string(aux) +
                             " out of range for " + table.ShapeString());
      }
      Tensor out(table.cols(), 1);
      for (std::size_t c = 0; c < table.cols(); ++c) out[c] = table.at(aux, c);
      return out;
    }
    case OpKind::kSoftmaxCrossEntropy: {
      expect_arity(1);
      const Tensor& logits = *in[0];
      if (!logits.is_vector() || aux >= logits.rows()) {
        throw DimensionError("softmax_cross_entropy: gold class " + std::to_string(aux) +
                             " invalid for logits " + logits.ShapeString());
      }
      const double mx = *std::max_element(logits.data().begin(), logits.data().end());
      double total = 0.0;
      for (double v : logits.data()) total += std::exp(v - mx);
      Tensor out(1, 1);
      out[0] = -(logits[aux] - mx - std::log(total));
      return out;
    }
    case OpKind::kParameter:
    case OpKind::kConstant:
      break;
  }
  throw std::logic_error("unhandled op kind");
}

void Tape::Backward(Var loss, Gradients& grads) const {
  const Node& loss_node = NodeAt(loss);
  const Tensor& loss_value = Value(loss);
  if (loss_value.rows() != 1 || loss_value.cols() != 1) {
    throw DimensionError("backward: loss must be 1x1, got " + loss_value.ShapeString());
  }
  (void)loss_node;

  std::vector<Tensor> adj(loss.id + 1);
  adj[loss.id] = Tensor::Filled(1, 1, 1.0);

  auto adj_of = [&](Var v) -> Tensor& {
    Tensor& t = adj[v.id];
    if (t.empty()) {
      const Tensor& val = Value(v);
      t = Tensor(val.rows(), val.cols());
    }
    return t;
  };

  for (std::size_t idx = loss.id + 1; idx-- > 0;) {
    if (adj[idx].empty()) continue;
    const Node& node = nodes_[idx];
    Tensor& g = adj[idx];
    const double scale = IsCorrupted(node.kind) ? 1.25 : 1.0;

    switch (node.kind) {
      case OpKind::kParameter: {
        auto it = grads.find(node.name);
        if (it == grads.end()) {
          grads.emplace(node.name, g);
        } else {
          if (it->second.rows() != g.rows() || it->second.cols() != g.cols()) {
            throw DimensionError("gradient shape mismatch for parameter " + node.name);
          }
          AddInto(it->second, g);
        }
        break;
      }
      case OpKind::kConstant:
        break;
      case OpKind::kMatVec:
      case OpKind::kAffine: {
        const Tensor& m = Value(node.operands[0]);
        const Tensor& v = Value(node.operands[1]);
        const std::size_t cols = m.cols();
        if (nodes_[node.operands[0].id].kind != OpKind::kConstant) {
          Tensor& gm = adj_of(node.operands[0]);
          for (std::size_t r = 0; r < m.rows(); ++r) {
            const double gr = g[r] * scale;
            if (gr == 0.0) continue;
            double* row = &gm.data()[r * cols];
            for (std::size_t c = 0; c < cols; ++c) row[c] += gr * v[c];
          }
        }
        if (nodes_[node.operands[1].id].kind != OpKind::kConstant) {
          Tensor& gv = adj_of(node.operands[1]);
          for (std::size_t r = 0; r < m.rows(); ++r) {
            const double gr = g[r] * scale;
            if (gr == 0.0) continue;
            const double* row = &m.data()[r * cols];
            for (std::size_t c = 0; c < cols; ++c) gv[c] += row[c] * gr;
          }
        }
        if (node.kind == OpKind::kAffine) {
          Tensor& gb = adj_of(node.operands[2]);
          for (std::size_t r = 0; r < gb.size(); ++r) gb[r] += g[r] * scale;
        }
        break;
      }
      case OpKind::kAdd: {
        for (Var operand : node.operands) {
          Tensor& ga = adj_of(operand);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * scale;
        }
        break;
      }
      case OpKind::kHadamard: {
        const Tensor& a = Value(node.operands[0]);
        const Tensor& b = Value(node.operands[1]);
        Tensor& ga = adj_of(node.operands[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * b[i] * scale;
        Tensor& gb = adj_of(node.operands[1]);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * a[i] * scale;
        break;
      }
      case OpKind::kDropoutMaskApply: {
        const Tensor& mask = Value(node.operands[1]);
        Tensor& ga = adj_of(node.operands[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * mask[i] * scale;
        break;
      }
      case OpKind::kSigmoid: {
        const Tensor& y = node.value;
        Tensor& ga = adj_of(node.operands[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) {
          ga[i] += g[i] * y[i] * (1.0 - y[i]) * scale;
        }
        break;
      }
      case OpKind::kTanh: {
        const Tensor& y = node.value;
        Tensor& ga = adj_of(node.operands[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) {
          ga[i] += g[i] * (1.0 - y[i] * y[i]) * scale;
        }
        break;
      }
      case OpKind::kSumList: {
        for (Var operand : node.operands) {
          Tensor& ga = adj_of(operand);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * scale;
        }
        break;
      }
      case OpKind::kConcat: {
        std::size_t offset = 0;
        for (Var operand : node.operands) {
          Tensor& ga = adj_of(operand);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[offset + i] * scale;
          offset += ga.size();
        }
        break;
      }
      case OpKind::kLookupRow: {
        Tensor& gt = adj_of(node.operands[0]);
        for (std::size_t c = 0; c < gt.cols(); ++c) gt.at(node.aux, c) += g[c] * scale;
        break;
      }
      case OpKind::kSoftmaxCrossEntropy: {
        const Tensor& logits = Value(node.operands[0]);
        const std::vector<double> p = Softmax(logits.data());
        Tensor& gl = adj_of(node.operands[0]);
        for (std::size_t k = 0; k < p.size(); ++k) {
          const double target = k == node.aux ? 1.0 : 0.0;
          gl[k] += g[0] * (p[k] - target) * scale;
        }
        break;
      }
    }
    // Intermediate adjoints are no longer needed once propagated.
    if (node.kind != OpKind::kParameter) adj[idx] = Tensor();
  }
}

Gradients Tape::Backward(Var loss, const ParameterSet& params) const {
  Gradients grads = ZeroGradients(params);
  Backward(loss, grads);
  return grads;
}

// ---------------------------------------------------------------------------
// AdaGrad

void AdagradStep(ParameterSet& params, const Gradients& grads, AdagradState& state,
                 const AdagradConfig& config) {
  if (!(config.learning_rate > 0.0) || !(config.weight_decay >= 0.0)) {
    throw std::invalid_argument("adagrad: learning_rate must be > 0 and weight_decay >= 0");
  }
  for (auto& [name, param] : params.mutable_tensors()) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Tensor& g = git->second;
    if (g.rows() != param.rows() || g.cols() != param.cols()) {
      throw DimensionError("adagrad: gradient " + g.ShapeString() + " does not match parameter " +
                           name + " " + param.ShapeString());
    }
    auto sit = state.accumulators.find(name);
    if (sit == state.accumulators.end()) {
      sit = state.accumulators.emplace(name, Tensor(param.rows(), param.cols())).first;
    } else if (sit->second.rows() != param.rows() || sit->second.cols() != param.cols()) {
      throw DimensionError("adagrad: accumulator shape does not match parameter " + name);
    }
    Tensor& acc = sit->second;
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double gi = g[i] + config.weight_decay * param[i];
      acc[i] += gi * gi;
      param[i] -= config.learning_rate * gi / (std::sqrt(acc[i]) + config.epsilon);
    }
    param.CheckFinite("parameter " + name + " after adagrad step");
  }
}

namespace testing {

void CorruptGradientRule(std::optional<OpKind> kind) {
  g_corrupted_rule.store(kind ? static_cast<int>(*kind) : -1, std::memory_order_relaxed);
}

}  // namespace testing

}  // namespace affect::ad
