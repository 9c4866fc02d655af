#include "qppkit/judgments.hpp"

#include <istream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qppkit/errors.hpp"

namespace qppkit {

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::oracle: return "oracle";
    case SourceKind::threshold: return "threshold";
    case SourceKind::llm: return "llm";
    case SourceKind::file: return "file";
  }
  return "file";
}

SourceKind source_kind_of(const std::string& source) {
  std::string kind = source.substr(0, source.find(':'));
  if (kind == "oracle") return SourceKind::oracle;
  if (kind == "threshold") return SourceKind::threshold;
  if (kind == "llm") return SourceKind::llm;
  if (kind == "file") return SourceKind::file;
  throw DataError("unknown judgment source kind: " + source);
}

std::string to_jsonl(const JudgmentRecord& record) {
  nlohmann::ordered_json obj;
  obj["qid"] = record.query_id;
  obj["docid"] = record.doc_id;
  obj["label"] = record.label;
  obj["source"] = record.source;
  if (record.raw_output) obj["raw_output"] = *record.raw_output;
  if (record.fallback) obj["fallback"] = true;
  return obj.dump();
}

JudgmentRecord judgment_from_jsonl(const std::string& line) {
  nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw DataError("corrupt judgment record: not a JSON object");
  JudgmentRecord record;
  if (!obj.contains("qid") || !obj["qid"].is_string()) throw DataError("judgment record missing \"qid\"");
  if (!obj.contains("docid") || !obj["docid"].is_string()) throw DataError("judgment record missing \"docid\"");
  if (!obj.contains("label") || !obj["label"].is_number_integer())
    throw DataError("judgment record missing integer \"label\"");
  if (!obj.contains("source") || !obj["source"].is_string())
    throw DataError("judgment record missing \"source\"");
  record.query_id = obj["qid"].get<std::string>();
  record.doc_id = obj["docid"].get<std::string>();
  record.label = obj["label"].get<int>();
  record.source = obj["source"].get<std::string>();
  if (record.label != 0 && record.label != 1)
    throw DataError("judgment label must be 0 or 1, got " + std::to_string(record.label));
  source_kind_of(record.source); // validates the kind prefix
  if (obj.contains("raw_output")) {
    if (!obj["raw_output"].is_string()) throw DataError("judgment \"raw_output\" must be a string");
    record.raw_output = obj["raw_output"].get<std::string>();
  }
  if (obj.contains("fallback")) {
    if (!obj["fallback"].is_boolean()) throw DataError("judgment \"fallback\" must be a boolean");
    record.fallback = obj["fallback"].get<bool>();
  }
  return record;
}

std::vector<JudgmentRecord> read_judgments(std::istream& in) {
  std::vector<JudgmentRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(judgment_from_jsonl(line));
    } catch (const DataError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return records;
}

std::vector<JudgmentRecord> read_judgments_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open judgments file: " + path);
  return read_judgments(in);
}

std::size_t JudgmentStore::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::string>{}(k.query_id);
  h ^= std::hash<std::string>{}(k.doc_id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<std::string>{}(k.source) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

JudgmentStore::JudgmentStore(const std::string& path) {
  {
    std::ifstream in(path);
    if (in) {
      for (const auto& record : read_judgments(in)) insert_unlocked(record);
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw ConfigError("cannot open judgment store for append: " + path);
}

void JudgmentStore::insert_unlocked(const JudgmentRecord& record) {
  if (record.label != 0 && record.label != 1)
    throw DataError("judgment label must be 0 or 1, got " + std::to_string(record.label));
  source_kind_of(record.source);
  Key key{record.query_id, record.doc_id, record.source};
  if (index_.count(key))
    throw DataError("duplicate judgment for (" + record.query_id + ", " + record.doc_id + ", " +
                    record.source + ")");
  records_.push_back(record);
  index_.emplace(std::move(key), &records_.back());
}

void JudgmentStore::append(const JudgmentRecord& record) {
  std::unique_lock lock(mutex_);
  insert_unlocked(record);
  if (out_.is_open()) {
    out_ << to_jsonl(record) << '\n';
    out_.flush();
  }
}

const JudgmentRecord* JudgmentStore::find(const std::string& query_id, const std::string& doc_id,
                                          const std::string& source) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(Key{query_id, doc_id, source});
  return it == index_.end() ? nullptr : it->second;
}

std::size_t JudgmentStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<JudgmentRecord> JudgmentStore::records() const {
  std::shared_lock lock(mutex_);
  return std::vector<JudgmentRecord>(records_.begin(), records_.end());
}

} // namespace qppkit
