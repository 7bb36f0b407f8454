#include <cctype>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "affect/corpus.h"
#include "json.hpp"

namespace affect {
namespace {

using boost::property_tree::ptree;

Sentiment ParsePolarity(const std::string& text, const std::string& where) {
  auto s = SentimentFromString(text);
  if (!s) throw AbsaError(where + ": unknown polarity '" + text + "'");
  return *s;
}

bool BlankOrNull(const std::string& target) {
  const auto b = target.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return true;
  const auto e = target.find_last_not_of(" \t\r\n");
  return target.substr(b, e - b + 1) == "NULL";
}

std::string TrimCopy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<int> OptionalOffset(const ptree& attrs, const char* key) {
  auto v = attrs.get_optional<int>(key);
  if (!v) return std::nullopt;
  return *v;
}

void CollectXmlSentence(const ptree& sentence, std::vector<AbsaRecord>& out) {
  AbsaRecord record;
  record.sentence_id = sentence.get<std::string>("<xmlattr>.id", "");
  record.text = sentence.get<std::string>("text", "");
  const std::string where = "sentence '" + record.sentence_id + "'";

  auto read_opinions = [&](const ptree& container, const char* element,
                           const char* target_key) {
    for (const auto& [tag, opinion] : container) {
      if (tag != element) continue;
      const ptree& attrs = opinion.get_child("<xmlattr>", ptree());
      const std::string target = attrs.get<std::string>(target_key, "NULL");
      const std::string polarity = attrs.get<std::string>("polarity", "");
      const Sentiment s = ParsePolarity(polarity, where);
      if (BlankOrNull(target)) continue;
      GoldAspect aspect;
      aspect.target = TrimCopy(target);
      aspect.polarity = s;
      aspect.from = OptionalOffset(attrs, "from");
      aspect.to = OptionalOffset(attrs, "to");
      record.aspects.push_back(std::move(aspect));
    }
  };
  if (auto opinions = sentence.get_child_optional("Opinions")) {
    read_opinions(*opinions, "Opinion", "target");
  }
  if (auto terms = sentence.get_child_optional("aspectTerms")) {
    read_opinions(*terms, "aspectTerm", "term");
  }
  out.push_back(std::move(record));
}

void WalkXml(const ptree& node, std::vector<AbsaRecord>& out) {
  for (const auto& [tag, child] : node) {
    if (tag == "sentence") {
      CollectXmlSentence(child, out);
    } else if (tag != "<xmlattr>" && tag != "<xmlcomment>") {
      WalkXml(child, out);
    }
  }
}

std::vector<AbsaRecord> LoadXml(std::istream& in) {
  ptree root;
  try {
    boost::property_tree::read_xml(in, root);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw AbsaError(std::string("malformed ABSA XML: ") + e.what());
  }
  std::vector<AbsaRecord> out;
  WalkXml(root, out);
  return out;
}

std::vector<AbsaRecord> LoadJsonl(std::istream& in) {
  std::vector<AbsaRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "ABSA JSONL line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      AbsaRecord record;
      const auto& id = j.at("id");
      record.sentence_id = id.is_string() ? id.get<std::string>() : id.dump();
      record.text = j.value("text", "");
      for (const auto& a : j.value("aspects", nlohmann::json::array())) {
        const std::string target = a.at("target").get<std::string>();
        const Sentiment s = ParsePolarity(a.at("polarity").get<std::string>(), where);
        if (BlankOrNull(target)) continue;
        GoldAspect aspect;
        aspect.target = TrimCopy(target);
        aspect.polarity = s;
        if (a.contains("from")) aspect.from = a.at("from").get<int>();
        if (a.contains("to")) aspect.to = a.at("to").get<int>();
        record.aspects.push_back(std::move(aspect));
      }
      out.push_back(std::move(record));
    } catch (const nlohmann::json::exception& e) {
      throw AbsaError(where + ": malformed JSON: " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<AbsaRecord> LoadAbsa(std::istream& in) {
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  std::istringstream body(content);
  if (content[first] == '<') return LoadXml(body);
  if (content[first] == '{') return LoadJsonl(body);
  throw AbsaError("cannot detect ABSA format: expected '<' or '{' as first character");
}

std::vector<AbsaRecord> LoadAbsaFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  return LoadAbsa(in);
}

}  // namespace affect
