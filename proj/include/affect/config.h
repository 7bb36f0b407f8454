#ifndef AFFECT_CONFIG_H_
#define AFFECT_CONFIG_H_

// Run configuration: `key = value` lines, `#` comments, optional double
// quotes around strings. Relative paths resolve against the file's directory.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "affect/associate.h"
#include "affect/treelstm.h"

namespace affect {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path embeddings;
  std::filesystem::path sst_train, sst_dev, sst_test;
  std::filesystem::path sst_train_parses, sst_dev_parses, sst_test_parses;
  std::filesystem::path conllu;
  std::filesystem::path absa, absa_parses;
  std::filesystem::path checkpoint_dir;

  double learning_rate = 0.05;
  double weight_decay = 1e-4;
  std::size_t batch = 25;
  int epochs = 10;
  std::size_t hidden = 168;
  std::uint64_t seed = 1;
  double logreg_l2 = 1.0;
  std::size_t blstm_hidden = 64;
  double blstm_dropout_keep = 0.5;
  int blstm_epochs = 10;
  int threads = 1;

  bool include_aux = true;
  MatchMode match_mode = MatchMode::kToken;
  CandidateActivation candidate_activation = CandidateActivation::kTanh;

  // Applies one `key`/`value` pair; throws ConfigError on an unknown key or
  // malformed value. Paths are taken as given.
  void Set(const std::string& key, const std::string& value);

  // Every non-empty input path exists; numeric fields are positive (weight
  // decay and l2 may be zero; dropout_keep lies in (0, 1]).
  void Validate() const;

  TrainConfig treelstm_train() const;
};

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace affect

#endif  // AFFECT_CONFIG_H_
