#ifndef AFFECT_AUTODIFF_H_
#define AFFECT_AUTODIFF_H_

// Reverse-mode automatic differentiation over dense double tensors.
//
// A Tape records operations in execution order; since operands must already
// exist when an operation is recorded, the node list is topologically sorted
// by construction and Backward() is a single reverse sweep.
//
// Parameters live in a ParameterSet owned by the caller. The tape refers to
// them by pointer, so a ParameterSet must outlive every tape that reads it and
// must not be modified while such a tape is in use.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affect/tensor.h"

namespace affect::ad {

enum class OpKind {
  kParameter,
  kConstant,
  kMatVec,
  kAdd,
  kHadamard,
  kSigmoid,
  kTanh,
  kSumList,
  kConcat,
  kLookupRow,
  kAffine,
  kDropoutMaskApply,
  kSoftmaxCrossEntropy,
};

std::string_view ToString(OpKind kind);

// Handle to a tape node.
struct Var {
  std::uint32_t id = 0;
};

// Named trainable tensors, iterated in alphabetical order.
class ParameterSet {
 public:
  using Map = std::map<std::string, Tensor, std::less<>>;

  Tensor& Add(std::string name, Tensor value);
  bool Contains(std::string_view name) const;
  const Tensor& Get(std::string_view name) const;
  Tensor& Get(std::string_view name);

  const Map& tensors() const { return tensors_; }
  Map& mutable_tensors() { return tensors_; }
  std::size_t NumScalars() const;

  bool operator==(const ParameterSet&) const = default;

 private:
  Map tensors_;
};

using Gradients = std::map<std::string, Tensor, std::less<>>;

// One zero tensor per parameter, same shapes.
Gradients ZeroGradients(const ParameterSet& params);

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Leaf bound to params.Get(name) by reference; `params` must outlive the
  // tape. Repeated calls return the same node.
  Var Parameter(const ParameterSet& params, std::string_view name);
  Var Constant(Tensor value);

  // Generic entry point. `aux` carries the row for kLookupRow and the gold
  // class for kSoftmaxCrossEntropy; it is ignored otherwise.
  Var Record(OpKind kind, std::span<const Var> operands, std::size_t aux = 0);

  Var MatVec(Var matrix, Var vec) { return Rec(OpKind::kMatVec, {matrix, vec}); }
  Var Add(Var a, Var b) { return Rec(OpKind::kAdd, {a, b}); }
  Var Hadamard(Var a, Var b) { return Rec(OpKind::kHadamard, {a, b}); }
  Var Sigmoid(Var a) { return Rec(OpKind::kSigmoid, {a}); }
  Var Tanh(Var a) { return Rec(OpKind::kTanh, {a}); }
  // Sum of same-shaped operands. Each coordinate is summed in ascending order
  // of its values, so the result is bit-identical under operand permutation.
  Var SumList(std::span<const Var> terms) { return Record(OpKind::kSumList, terms); }
  Var Concat(std::span<const Var> parts) { return Record(OpKind::kConcat, parts); }
  Var LookupRow(Var table, std::size_t row) {
    return Rec(OpKind::kLookupRow, {table}, row);
  }
  Var Affine(Var weight, Var input, Var bias) {
    return Rec(OpKind::kAffine, {weight, input, bias});
  }
  // Element-wise product with a mask that is treated as a constant.
  Var DropoutMaskApply(Var input, Var mask) {
    return Rec(OpKind::kDropoutMaskApply, {input, mask});
  }
  // -log softmax(logits)[gold], a 1x1 tensor.
  Var SoftmaxCrossEntropy(Var logits, std::size_t gold) {
    return Rec(OpKind::kSoftmaxCrossEntropy, {logits}, gold);
  }

  const Tensor& Value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Adds d(loss)/d(param) into `grads` for every parameter reached from
  // `loss`. Entries are created on demand.
  void Backward(Var loss, Gradients& grads) const;
  // Gradient for every parameter in `params`; untouched ones are zero.
  Gradients Backward(Var loss, const ParameterSet& params) const;

 private:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::vector<Var> operands;
    std::size_t aux = 0;
    Tensor value;
    const Tensor* external = nullptr;  // parameter storage
    std::string name;                  // parameter name
  };

  Var Rec(OpKind kind, std::initializer_list<Var> operands, std::size_t aux = 0) {
    return Record(kind, std::span<const Var>(operands.begin(), operands.size()), aux);
  }
  const Node& NodeAt(Var v) const;
  Tensor Forward(OpKind kind, std::span<const Var> operands, std::size_t aux) const;

  std::vector<Node> nodes_;
  std::map<const Tensor*, Var> parameter_nodes_;
};

struct AdagradConfig {
  double learning_rate = 0.05;
  double weight_decay = 1e-4;
  double epsilon = 1e-8;
};

// Running sums of squared gradients, keyed like the parameters.
struct AdagradState {
  Gradients accumulators;
};

// p <- p - lr * g' / (sqrt(G) + eps), with g' = g + weight_decay * p and
// G += g'^2. Parameters without a gradient entry are left alone.
void AdagradStep(ParameterSet& params, const Gradients& grads, AdagradState& state,
                 const AdagradConfig& config);

namespace testing {

// Negative-control hook for gradient checking: when set, the backward rule of
// `kind` is deliberately scaled by a wrong factor. Not for production use.
void CorruptGradientRule(std::optional<OpKind> kind);

}  // namespace testing

}  // namespace affect::ad

#endif  // AFFECT_AUTODIFF_H_
