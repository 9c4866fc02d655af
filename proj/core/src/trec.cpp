#include "qppkit/trec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "qppkit/errors.hpp"

namespace qppkit {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.emplace_back(line, start, i - start);
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

} // namespace

bool run_entry_before(const RunEntry& a, const RunEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id > b.doc_id;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

int term_count(const std::string& text) {
  return static_cast<int>(split_ws(text).size());
}

void Qrels::add(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0)
    throw DataError("negative grade " + std::to_string(grade) + " for (" + query_id + ", " + doc_id + ")");
  auto [it, inserted] = grades_.emplace(PairKey{query_id, doc_id}, grade);
  if (!inserted) throw DataError("duplicate qrels pair (" + query_id + ", " + doc_id + ")");
}

std::optional<int> Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto it = grades_.find(PairKey{query_id, doc_id});
  if (it == grades_.end()) return std::nullopt;
  return it->second;
}

RunFile parse_run(std::istream& in, const RunParseOptions& opts) {
  RunFile result;
  std::unordered_map<PairKey, bool, PairKeyHash> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 6)
      throw ParseError("expected 6 fields (qid Q0 docid rank score tag), got " +
                           std::to_string(fields.size()),
                       lineno);
    const std::string& qid = fields[0];
    const std::string& docid = fields[2];
    long long rank = 0;
    if (!parse_int(fields[3], rank)) throw ParseError("rank field is not an integer: " + fields[3], lineno);
    double score = 0.0;
    if (!parse_double(fields[4], score)) throw ParseError("score field is not a number: " + fields[4], lineno);
    if (!std::isfinite(score)) throw ParseError("non-finite score: " + fields[4], lineno);
    if (!seen.emplace(PairKey{qid, docid}, true).second)
      throw ParseError("duplicate run entry (" + qid + ", " + docid + ")", lineno);

    RankedList& list = result.lists[qid];
    if (list.query_id.empty()) {
      list.query_id = qid;
      list.run_tag = fields[5];
    }
    list.entries.push_back(RunEntry{docid, score});
  }
  for (auto& [qid, list] : result.lists) {
    std::sort(list.entries.begin(), list.entries.end(), run_entry_before);
    if (list.entries.size() > opts.max_list_length) {
      result.warnings.push_back("query " + qid + ": list truncated from " +
                                std::to_string(list.entries.size()) + " to " +
                                std::to_string(opts.max_list_length) + " entries");
      list.entries.resize(opts.max_list_length);
    }
  }
  return result;
}

RunFile parse_run_file(const std::string& path, const RunParseOptions& opts) {
  auto in = open_or_throw(path);
  return parse_run(in, opts);
}

void write_run(std::ostream& out, const RunMap& lists) {
  for (const auto& [qid, list] : lists) {
    std::size_t rank = 1;
    for (const auto& entry : list.entries) {
      out << qid << " Q0 " << entry.doc_id << ' ' << rank++ << ' ' << format_double(entry.score)
          << ' ' << (list.run_tag.empty() ? "qppkit" : list.run_tag) << '\n';
    }
  }
}

Qrels parse_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw ParseError("expected 4 fields (qid iter docid grade), got " + std::to_string(fields.size()),
                       lineno);
    long long grade = 0;
    if (!parse_int(fields[3], grade)) throw ParseError("grade field is not an integer: " + fields[3], lineno);
    try {
      qrels.add(fields[0], fields[2], static_cast<int>(grade));
    } catch (const DataError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return qrels;
}

Qrels parse_qrels_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_qrels(in);
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
  // Canonical order for diff-stability.
  std::vector<std::pair<PairKey, int>> rows(qrels.all().begin(), qrels.all().end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.query_id, a.first.doc_id) < std::tie(b.first.query_id, b.first.doc_id);
  });
  for (const auto& [key, grade] : rows)
    out << key.query_id << " 0 " << key.doc_id << ' ' << grade << '\n';
}

void CollectionStore::insert(std::string id, std::string text) {
  auto [it, inserted] = texts_.emplace(std::move(id), std::move(text));
  if (!inserted) throw DataError("duplicate id in collection: " + it->first);
}

const std::string* CollectionStore::find(const std::string& id) const {
  auto it = texts_.find(id);
  return it == texts_.end() ? nullptr : &it->second;
}

CollectionStore parse_collection(std::istream& in, CollectionFormat format) {
  CollectionStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (format == CollectionFormat::tsv) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("missing TAB separator", lineno);
      std::string id = line.substr(0, tab);
      if (id.empty()) throw ParseError("empty id field", lineno);
      try {
        store.insert(std::move(id), line.substr(tab + 1));
      } catch (const DataError& e) {
        throw ParseError(e.what(), lineno);
      }
    } else {
      nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
      if (obj.is_discarded()) throw ParseError("invalid JSON object", lineno);
      if (!obj.contains("id") || !obj["id"].is_string())
        throw ParseError("missing string field \"id\"", lineno);
      if (!obj.contains("contents") || !obj["contents"].is_string())
        throw ParseError("missing string field \"contents\"", lineno);
      try {
        store.insert(obj["id"].get<std::string>(), obj["contents"].get<std::string>());
      } catch (const DataError& e) {
        throw ParseError(e.what(), lineno);
      }
    }
  }
  return store;
}

CollectionStore parse_collection_file(const std::string& path, CollectionFormat format) {
  auto in = open_or_throw(path);
  return parse_collection(in, format);
}

CollectionFormat collection_format_from_path(const std::string& path) {
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0)
    return CollectionFormat::jsonl;
  return CollectionFormat::tsv;
}

ScoreTable score_table_from_run(const RunMap& lists) {
  ScoreTable table;
  for (const auto& [qid, list] : lists)
    for (const auto& entry : list.entries) table[PairKey{qid, entry.doc_id}] = entry.score;
  return table;
}

std::map<std::string, double> parse_value_tsv(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 2)
      throw ParseError("expected 2 fields (qid value), got " + std::to_string(fields.size()), lineno);
    double value = 0.0;
    if (!parse_double(fields[1], value)) throw ParseError("value is not a number: " + fields[1], lineno);
    if (!values.emplace(fields[0], value).second)
      throw ParseError("duplicate query id: " + fields[0], lineno);
  }
  return values;
}

std::map<std::string, double> parse_value_tsv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_value_tsv(in);
}

void write_value_tsv(std::ostream& out, const std::map<std::string, double>& values) {
  for (const auto& [qid, value] : values) out << qid << '\t' << format_double(value) << '\n';
}

} // namespace qppkit
