#include "affect/checkpoint.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace affect {
namespace {

std::vector<std::string> SplitSpaces(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

std::size_t ParseSize(const std::string& text, int line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw CheckpointError("line " + std::to_string(line_no) + ": expected integer, got '" +
                          text + "'");
  }
  return value;
}

}  // namespace

const std::string& Checkpoint::Meta(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw CheckpointError("checkpoint lacks meta key '" + key + "'");
  return it->second;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw CheckpointError("cannot format value");
  return std::string(buf, ptr);
}

void WriteCheckpoint(const Checkpoint& ckpt, std::ostream& out) {
  out << kCheckpointHeader << '\n';
  out << "model " << ckpt.model_kind << '\n';
  for (const auto& [key, value] : ckpt.meta) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos || value.empty() ||
        value.find('\n') != std::string::npos || value.front() == ' ' || value.back() == ' ') {
      throw CheckpointError("meta entry '" + key + "' cannot be stored");
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  if (!ckpt.vocab.empty()) {
    out << "vocab " << ckpt.vocab.size() << '\n';
    for (const auto& token : ckpt.vocab) out << token << '\n';
  }
  for (const auto& [name, t] : ckpt.tensors.tensors()) {
    out << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) {
        if (c > 0) out << ' ';
        out << FormatDouble(t.at(r, c));
      }
      out << '\n';
    }
  }
}

Checkpoint ReadCheckpoint(std::istream& in) {
  Checkpoint ckpt;
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };

  if (!next_line() || line != kCheckpointHeader) {
    throw CheckpointError("missing checkpoint header '" + std::string(kCheckpointHeader) + "'");
  }
  if (!next_line()) throw CheckpointError("truncated checkpoint: no model line");
  {
    auto fields = SplitSpaces(line);
    if (fields.size() != 2 || fields[0] != "model") {
      throw CheckpointError("line " + std::to_string(line_no) + ": expected 'model <kind>'");
    }
    ckpt.model_kind = fields[1];
  }

  while (next_line()) {
    if (line.empty()) continue;
    auto fields = SplitSpaces(line);
    if (fields[0] == "meta") {
      // meta <key> <value...>; the value runs to the end of the line.
      const std::string prefix = "meta " + (fields.size() > 1 ? fields[1] : std::string()) + " ";
      if (fields.size() < 3 || !line.starts_with(prefix)) {
        throw CheckpointError("line " + std::to_string(line_no) + ": malformed meta line");
      }
      ckpt.meta[fields[1]] = line.substr(prefix.size());
    } else if (fields[0] == "vocab") {
      if (fields.size() != 2) {
        throw CheckpointError("line " + std::to_string(line_no) + ": malformed vocab line");
      }
      const std::size_t n = ParseSize(fields[1], line_no);
      ckpt.vocab.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!next_line()) throw CheckpointError("truncated vocabulary block");
        ckpt.vocab.push_back(line);
      }
    } else if (fields[0] == "tensor") {
      if (fields.size() != 4) {
        throw CheckpointError("line " + std::to_string(line_no) + ": malformed tensor line");
      }
      const std::string name = fields[1];
      const std::size_t rows = ParseSize(fields[2], line_no);
      const std::size_t cols = ParseSize(fields[3], line_no);
      std::vector<double> data;
      data.reserve(rows * cols);
      for (std::size_t r = 0; r < rows; ++r) {
        if (!next_line()) throw CheckpointError("truncated tensor " + name);
        auto values = SplitSpaces(line);
        if (values.size() != cols) {
          throw CheckpointError("line " + std::to_string(line_no) + ": tensor " + name +
                                " expects " + std::to_string(cols) + " values per row");
        }
        for (const auto& v : values) {
          double x = 0.0;
          const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
          if (ec != std::errc() || ptr != v.data() + v.size()) {
            throw CheckpointError("line " + std::to_string(line_no) + ": bad number '" + v + "'");
          }
          data.push_back(x);
        }
      }
      try {
        ckpt.tensors.Add(name, ad::Tensor(rows, cols, std::move(data)));
      } catch (const std::exception& e) {
        throw CheckpointError("tensor " + name + ": " + e.what());
      }
    } else {
      throw CheckpointError("line " + std::to_string(line_no) + ": unexpected '" + fields[0] +
                            "'");
    }
  }
  return ckpt;
}

void SaveCheckpointAtomic(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    WriteCheckpoint(ckpt, out);
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw CheckpointError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace affect
