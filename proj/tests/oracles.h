#ifndef AFFECT_TESTS_ORACLES_H_
#define AFFECT_TESTS_ORACLES_H_

// Independent reimplementations shared by the unit tests and the acceptance
// binary.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "affect/corpus.h"
#include "affect/random.h"
#include "affect/syntax.h"
#include "affect/treelstm.h"
#include "test_util.h"

namespace affect::test {

using Vec = std::vector<double>;

// Straight-line reference of the node transition, written against the raw
// parameter tensors.
struct RefState {
  Vec h, c, probs;
  Vec i, o, u;
  std::vector<Vec> f;
};

inline Vec Affine(const ad::Tensor& w, const Vec& x) {
  Vec out(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t k = 0; k < w.cols(); ++k) out[r] += w.at(r, k) * x[k];
  }
  return out;
}

inline double Logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline RefState ReferenceNode(const TreeLstmParams& params, const Vec& x,
                       const std::vector<RefState>& children) {
  const auto& P = params.set();
  const std::size_t hid = params.config().hidden_dim;
  const bool sigmoid_u = params.config().candidate == CandidateActivation::kSigmoid;
  Vec hsum(hid, 0.0);
  for (const RefState& ch : children) {
    for (std::size_t k = 0; k < hid; ++k) hsum[k] += ch.h[k];
  }
  auto pre = [&](const char* gate, const Vec& hidden) {
    const Vec wx = Affine(P.Get(std::string("W_") + gate), x);
    const Vec uh = Affine(P.Get(std::string("U_") + gate), hidden);
    const ad::Tensor& b = P.Get(std::string("b_") + gate);
    Vec z(hid);
    for (std::size_t k = 0; k < hid; ++k) z[k] = wx[k] + b[k] + uh[k];
    return z;
  };
  RefState s;
  s.i = pre("i", hsum);
  s.o = pre("o", hsum);
  s.u = pre("u", hsum);
  for (std::size_t k = 0; k < hid; ++k) {
    s.i[k] = Logistic(s.i[k]);
    s.o[k] = Logistic(s.o[k]);
    s.u[k] = sigmoid_u ? Logistic(s.u[k]) : std::tanh(s.u[k]);
  }
  s.c.assign(hid, 0.0);
  for (std::size_t k = 0; k < hid; ++k) s.c[k] = s.i[k] * s.u[k];
  for (const RefState& ch : children) {
    Vec f = pre("f", ch.h);
    for (std::size_t k = 0; k < hid; ++k) {
      f[k] = Logistic(f[k]);
      s.c[k] += f[k] * ch.c[k];
    }
    s.f.push_back(f);
  }
  s.h.resize(hid);
  for (std::size_t k = 0; k < hid; ++k) s.h[k] = s.o[k] * std::tanh(s.c[k]);
  Vec logits = Affine(P.Get("W_s"), s.h);
  double mx = -1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    logits[k] += P.Get("b_s")[k];
    mx = std::max(mx, logits[k]);
  }
  double z = 0.0;
  for (double& l : logits) z += (l = std::exp(l - mx));
  for (double& l : logits) l /= z;
  s.probs = logits;
  return s;
}

inline TreeLstmParams RandomParams(Rng& rng, const TreeLstmConfig& config, double scale) {
  TreeLstmParams p = TreeLstmParams::Zeros(config);
  for (auto& [name, t] : p.mutable_set().mutable_tensors()) {
    for (double& v : t.data()) v = UniformRange(rng, -scale, scale);
  }
  return p;
}

inline Vec RandomVec(Rng& rng, std::size_t n, double scale) {
  Vec v(n);
  for (double& x : v) x = UniformRange(rng, -scale, scale);
  return v;
}

inline EmbeddingTable RandomEmbeddings(Rng& rng, std::size_t dim, int words) {
  EmbeddingTable emb(dim);
  for (int w = 1; w <= words; ++w) emb.Insert("w" + std::to_string(w), RandomVec(rng, dim, 1.0));
  return emb;
}

// Brute-force target identification: every (chunk, verb) pair whose chunk words occur
// contiguously in the verb's sub-sentence and whose verb lies above the chunk
// head, then the closest verb per chunk.
inline std::vector<TargetPair> BruteForceTargets(const DepTree& dep, bool include_aux) {
  std::vector<int> verbs;
  for (const Token& t : dep.tokens) {
    if (t.upos == "VERB" || (include_aux && t.upos == "AUX")) verbs.push_back(t.index);
  }
  std::vector<TargetPair> out;
  for (const NounChunk& chunk : ExtractNounChunks(dep)) {
    std::vector<std::string> needle;
    for (int i : chunk.span) needle.push_back(dep.token(i).form);
    int best = 0;
    int best_distance = 1 << 30;
    for (int v : verbs) {
      std::vector<std::string> hay;
      for (int i : test::DescendantsByHeadWalk(dep, v)) hay.push_back(dep.token(i).form);
      bool found = false;
      for (std::size_t s = 0; s + needle.size() <= hay.size() && !found; ++s) {
        found = std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<long>(s));
      }
      if (!found) continue;
      int distance = 0;
      for (int cur = dep.token(chunk.head_index).head, d = 1; cur != 0;
           cur = dep.token(cur).head, ++d) {
        if (cur == v) {
          distance = d;
          break;
        }
      }
      if (distance == 0) continue;
      if (distance < best_distance) {
        best_distance = distance;
        best = v;
      }
    }
    if (best != 0) out.push_back(TargetPair{chunk, best});
  }
  return out;
}

inline std::vector<DepTree> FixtureTrees() {
  std::vector<DepTree> out;
  for (const char* file : {"tests/data/walkthrough.conllu", "data/synthetic/absa.conllu",
                           "data/synthetic/sst_dev.conllu", "data/synthetic/sst_test.conllu",
                           "data/synthetic/sst_train.conllu"}) {
    for (DepTree& t : ParseConlluFile(test::SourcePath(file))) {
      if (t.size() <= 12) out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace affect::test

#endif  // AFFECT_TESTS_ORACLES_H_
