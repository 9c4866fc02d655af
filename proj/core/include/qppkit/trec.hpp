#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qppkit {

struct Query {
  std::string id;
  std::string text;
};

struct Document {
  std::string id;
  std::string text;
};

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
};

/// One query's retrieval result. Entries are kept sorted by score descending,
/// ties broken by doc_id lexicographically descending, never by the file's
/// rank column.
struct RankedList {
  std::string query_id;
  std::vector<RunEntry> entries;
  std::string run_tag;
};

/// Total order used for ranked lists: higher score first, then higher doc_id.
bool run_entry_before(const RunEntry& a, const RunEntry& b);

struct PairKey {
  std::string query_id;
  std::string doc_id;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    std::size_t h = std::hash<std::string>{}(k.query_id);
    return h ^ (std::hash<std::string>{}(k.doc_id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

/// Graded human relevance judgments keyed by (query_id, doc_id).
class Qrels {
public:
  /// Throws DataError on duplicate pairs and negative grades.
  void add(const std::string& query_id, const std::string& doc_id, int grade);

  std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;
  std::size_t size() const { return grades_.size(); }
  bool empty() const { return grades_.empty(); }

  const std::unordered_map<PairKey, int, PairKeyHash>& all() const { return grades_; }

private:
  std::unordered_map<PairKey, int, PairKeyHash> grades_;
};

using RunMap = std::map<std::string, RankedList>;

struct RunParseOptions {
  std::size_t max_list_length = 1000; // entries beyond this are dropped after re-sorting
};

struct RunFile {
  RunMap lists;
  std::vector<std::string> warnings; // one note per truncated list
};

/// Parse a 6-column TREC run: qid Q0 docid rank score tag.
/// The rank column must be an integer but its value is ignored; entries are
/// re-sorted by (score desc, doc_id desc). Duplicate (qid, docid) pairs and
/// non-finite scores are errors.
RunFile parse_run(std::istream& in, const RunParseOptions& opts = {});
RunFile parse_run_file(const std::string& path, const RunParseOptions& opts = {});

/// Write in canonical order; the rank column is the 1-based position.
void write_run(std::ostream& out, const RunMap& lists);

/// Parse 4-column TREC qrels: qid iteration docid grade. Duplicates are errors.
Qrels parse_qrels(std::istream& in);
Qrels parse_qrels_file(const std::string& path);
void write_qrels(std::ostream& out, const Qrels& qrels);

enum class CollectionFormat { tsv, jsonl };

/// Random-access id -> text store used for both query sets and corpora.
class CollectionStore {
public:
  /// Throws DataError on duplicate ids.
  void insert(std::string id, std::string text);

  const std::string* find(const std::string& id) const;
  std::size_t size() const { return texts_.size(); }

private:
  std::unordered_map<std::string, std::string> texts_;
};

/// tsv: "id<TAB>text" (text may itself contain tabs); jsonl: {"id":..., "contents":...}.
CollectionStore parse_collection(std::istream& in, CollectionFormat format);
CollectionStore parse_collection_file(const std::string& path, CollectionFormat format);

/// Guess the collection format from a file extension (.tsv/.jsonl).
CollectionFormat collection_format_from_path(const std::string& path);

/// Re-ranker score lookup for the threshold judge; built from a run file so
/// the TREC score column can be reused as a score table.
using ScoreTable = std::unordered_map<PairKey, double, PairKeyHash>;
ScoreTable score_table_from_run(const RunMap& lists);

/// Per-query real values: predictions or actual metric values, "qid<TAB>value".
std::map<std::string, double> parse_value_tsv(std::istream& in);
std::map<std::string, double> parse_value_tsv_file(const std::string& path);
void write_value_tsv(std::ostream& out, const std::map<std::string, double>& values);

/// Locale-independent shortest round-trip formatting for doubles.
std::string format_double(double value);

/// Whitespace-separated token count, used for query-length normalizers.
int term_count(const std::string& text);

} // namespace qppkit
