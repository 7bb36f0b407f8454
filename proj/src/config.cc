#include "affect/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>

namespace affect {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean for '" + key + "': '" + value + "'");
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  using Path = std::filesystem::path RunConfig::*;
  static const std::map<std::string, Path> kPaths = {
      {"embeddings", &RunConfig::embeddings},
      {"sst_train", &RunConfig::sst_train},
      {"sst_dev", &RunConfig::sst_dev},
      {"sst_test", &RunConfig::sst_test},
      {"sst_train_parses", &RunConfig::sst_train_parses},
      {"sst_dev_parses", &RunConfig::sst_dev_parses},
      {"sst_test_parses", &RunConfig::sst_test_parses},
      {"conllu", &RunConfig::conllu},
      {"absa", &RunConfig::absa},
      {"absa_parses", &RunConfig::absa_parses},
      {"checkpoint_dir", &RunConfig::checkpoint_dir},
  };
  if (auto it = kPaths.find(key); it != kPaths.end()) {
    this->*(it->second) = value;
    return;
  }
  if (key == "lr" || key == "learning_rate") {
    learning_rate = ParseNumber<double>(key, value);
  } else if (key == "weight_decay") {
    weight_decay = ParseNumber<double>(key, value);
  } else if (key == "batch") {
    batch = ParseNumber<std::size_t>(key, value);
  } else if (key == "epochs") {
    epochs = ParseNumber<int>(key, value);
  } else if (key == "hidden") {
    hidden = ParseNumber<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "logreg_l2") {
    logreg_l2 = ParseNumber<double>(key, value);
  } else if (key == "blstm_hidden") {
    blstm_hidden = ParseNumber<std::size_t>(key, value);
  } else if (key == "blstm_dropout_keep") {
    blstm_dropout_keep = ParseNumber<double>(key, value);
  } else if (key == "blstm_epochs") {
    blstm_epochs = ParseNumber<int>(key, value);
  } else if (key == "threads") {
    threads = ParseNumber<int>(key, value);
  } else if (key == "include_aux") {
    include_aux = ParseBool(key, value);
  } else if (key == "match_mode") {
    const auto m = MatchModeFromString(value);
    if (!m) throw ConfigError("match_mode must be token or char, got '" + value + "'");
    match_mode = *m;
  } else if (key == "candidate_activation") {
    const auto a = CandidateActivationFromString(value);
    if (!a) throw ConfigError("candidate_activation must be tanh or sigmoid, got '" + value + "'");
    candidate_activation = *a;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::Validate() const {
  const std::pair<const char*, const std::filesystem::path*> inputs[] = {
      {"embeddings", &embeddings},
      {"sst_train", &sst_train},
      {"sst_dev", &sst_dev},
      {"sst_test", &sst_test},
      {"sst_train_parses", &sst_train_parses},
      {"sst_dev_parses", &sst_dev_parses},
      {"sst_test_parses", &sst_test_parses},
      {"conllu", &conllu},
      {"absa", &absa},
      {"absa_parses", &absa_parses},
  };
  for (const auto& [name, path] : inputs) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw ConfigError(std::string(name) + " path does not exist: " + path->string());
    }
  }
  if (!(learning_rate > 0.0)) throw ConfigError("lr must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (!(logreg_l2 >= 0.0)) throw ConfigError("logreg_l2 must be non-negative");
  if (batch == 0) throw ConfigError("batch must be positive");
  if (epochs <= 0 || blstm_epochs <= 0) throw ConfigError("epochs must be positive");
  if (hidden == 0 || blstm_hidden == 0) throw ConfigError("hidden sizes must be positive");
  if (threads <= 0) throw ConfigError("threads must be positive");
  if (!(blstm_dropout_keep > 0.0 && blstm_dropout_keep <= 1.0)) {
    throw ConfigError("blstm_dropout_keep must lie in (0, 1]");
  }
}

TrainConfig RunConfig::treelstm_train() const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.weight_decay = weight_decay;
  t.batch_size = batch;
  t.epochs = epochs;
  t.seed = seed;
  return t;
}

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir) {
  static const std::set<std::string> kPathKeys = {
      "embeddings",       "sst_train",       "sst_dev", "sst_test", "sst_train_parses",
      "sst_dev_parses",   "sst_test_parses", "conllu",  "absa",     "absa_parses",
      "checkpoint_dir"};
  RunConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string body = line;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = Trim(body);
    if (body.empty() || body.front() == '[') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = Trim(body.substr(0, eq));
    std::string value = Trim(body.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (kPathKeys.contains(key) && !value.empty()) {
      std::filesystem::path p(value);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      value = p.lexically_normal().string();
    }
    try {
      cfg.Set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return ParseRunConfig(in, path.parent_path());
}

}  // namespace affect
