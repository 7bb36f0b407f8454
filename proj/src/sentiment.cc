#include "affect/sentiment.h"

#include <stdexcept>
#include <string>

namespace affect {

std::string_view ToString(Sentiment s) {
  switch (s) {
    case Sentiment::kNegative:
      return "negative";
    case Sentiment::kNeutral:
      return "neutral";
    case Sentiment::kPositive:
      return "positive";
  }
  return "neutral";
}

std::optional<Sentiment> SentimentFromString(std::string_view name) {
  if (name == "negative") return Sentiment::kNegative;
  if (name == "neutral") return Sentiment::kNeutral;
  if (name == "positive") return Sentiment::kPositive;
  return std::nullopt;
}

Sentiment CoarsenLabel(int fine) {
  switch (fine) {
    case 0:
    case 1:
      return Sentiment::kNegative;
    case 2:
      return Sentiment::kNeutral;
    case 3:
    case 4:
      return Sentiment::kPositive;
    default:
      throw std::out_of_range("fine-grained sentiment label out of range 0..4: " +
                              std::to_string(fine));
  }
}

Sentiment ArgmaxSentiment(std::span<const double> scores) {
  if (scores.size() != kNumClasses) {
    throw std::invalid_argument("ArgmaxSentiment expects exactly 3 scores");
  }
  int best = 0;
  int count_at_best = 1;
  for (int k = 1; k < kNumClasses; ++k) {
    if (scores[k] > scores[best]) {
      best = k;
      count_at_best = 1;
    } else if (scores[k] == scores[best]) {
      ++count_at_best;
    }
  }
  if (count_at_best > 1) return Sentiment::kNeutral;
  return static_cast<Sentiment>(best);
}

}  // namespace affect
