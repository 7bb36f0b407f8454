#ifndef AFFECT_SENTIMENT_H_
#define AFFECT_SENTIMENT_H_

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace affect {

// Three-way polarity. The numeric values double as classifier output indices.
enum class Sentiment : int { kNegative = 0, kNeutral = 1, kPositive = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<Sentiment, kNumClasses> kAllSentiments = {
    Sentiment::kNegative, Sentiment::kNeutral, Sentiment::kPositive};

constexpr int ClassIndex(Sentiment s) { return static_cast<int>(s); }

std::string_view ToString(Sentiment s);
std::optional<Sentiment> SentimentFromString(std::string_view name);

// Maps a fine-grained 0..4 treebank label onto three classes:
// {0,1} -> negative, {2} -> neutral, {3,4} -> positive.
// Throws std::out_of_range for anything else.
Sentiment CoarsenLabel(int fine);

// Argmax over class scores. If the maximum is shared by more than one class
// the result is neutral.
Sentiment ArgmaxSentiment(std::span<const double> scores);

}  // namespace affect

#endif  // AFFECT_SENTIMENT_H_
