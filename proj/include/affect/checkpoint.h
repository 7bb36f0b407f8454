#ifndef AFFECT_CHECKPOINT_H_
#define AFFECT_CHECKPOINT_H_

// Plain-text model checkpoints:
//
//   affect-tree-checkpoint v1
//   model <kind>
//   meta <key> <value>          (zero or more, sorted by key)
//   vocab <n>                   (optional, followed by n lines, one token each)
//   tensor <name> <rows> <cols> (alphabetical by name, followed by one line
//   <row values...>              per row of space-separated decimals)
//
// Values are written in shortest round-trip form, so Load(Save(x)) == x.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "affect/autodiff.h"

namespace affect {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointHeader = "affect-tree-checkpoint v1";

struct Checkpoint {
  std::string model_kind;
  std::map<std::string, std::string> meta;
  std::vector<std::string> vocab;
  ad::ParameterSet tensors;

  const std::string& Meta(const std::string& key) const;
  bool operator==(const Checkpoint&) const = default;
};

void WriteCheckpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint ReadCheckpoint(std::istream& in);

// Writes to a sibling temporary file, then renames over `path`.
void SaveCheckpointAtomic(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

}  // namespace affect

#endif  // AFFECT_CHECKPOINT_H_
