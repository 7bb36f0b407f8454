#ifndef AFFECT_GRADCHECK_H_
#define AFFECT_GRADCHECK_H_

// Finite-difference verification of the tape's analytic gradients.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "affect/autodiff.h"
#include "affect/corpus.h"
#include "affect/random.h"

namespace affect {

struct GradCheckCase {
  std::string name;
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_relative_error < tolerance; }
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;

  bool passed() const;
  double max_relative_error() const;
  std::size_t failures() const;
};

struct GradCheckOptions {
  std::uint64_t seed = 1;
  int graphs = 100;
  int trees = 20;
  double step = 1e-5;
  double tolerance = 1e-4;
};

// |a - n| / max(|a|, |n|, kGradCheckFloor). The floor keeps coordinates whose
// true gradient is ~0 from dividing round-off by round-off.
inline constexpr double kGradCheckFloor = 1e-6;
double RelativeError(double analytic, double numeric);

// Rebuilds the loss on a fresh tape for each evaluation.
using LossBuilder = std::function<ad::Var(ad::Tape&, const ad::ParameterSet&)>;

// Compares every coordinate of every tensor in `params` against central
// differences. `params` is perturbed in place and restored.
GradCheckCase CheckGradients(std::string name, ad::ParameterSet& params, const LossBuilder& build,
                             double step, double tolerance);

// A uniformly random rooted tree over `n` tokens with valid UPOS tags; forms
// are "w1".."wn".
DepTree RandomDepTree(Rng& rng, int n);

// `graphs` random compositions covering every op kind, then `trees` small
// whole-tree Tree-LSTM losses.
GradCheckReport RunGradientChecks(const GradCheckOptions& options);

}  // namespace affect

#endif  // AFFECT_GRADCHECK_H_
