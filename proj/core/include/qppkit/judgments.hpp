#pragma once

#include <cstddef>
#include <deque>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace qppkit {

enum class SourceKind { oracle, threshold, llm, file };

std::string to_string(SourceKind kind);

/// Parse the kind prefix of a source string ("llm:teacher-7b" -> llm).
SourceKind source_kind_of(const std::string& source);

/// One binary relevance judgment. `source` is the full judge identity,
/// "<kind>[:qualifier]", so judgments from different judges (other models,
/// other thresholds) never collide in a store.
struct JudgmentRecord {
  std::string query_id;
  std::string doc_id;
  int label = 0; // {0, 1}
  std::string source;
  std::optional<std::string> raw_output; // verbatim model completion, when there is one
  bool fallback = false;                 // label came from the unparseable-output fallback

  bool operator==(const JudgmentRecord&) const = default;
};

std::string to_jsonl(const JudgmentRecord& record);
JudgmentRecord judgment_from_jsonl(const std::string& line);

/// Line-delimited records; corrupt lines raise ParseError with the offset.
std::vector<JudgmentRecord> read_judgments(std::istream& in);
std::vector<JudgmentRecord> read_judgments_file(const std::string& path);

/// Append-only judgment cache keyed by (query_id, doc_id, source).
/// Concurrent readers are fine; writes are serialized internally. When backed
/// by a file every append is flushed, so caches are mergeable text.
class JudgmentStore {
public:
  JudgmentStore() = default; // memory-only

  /// Loads any existing records from `path`, then appends to it.
  explicit JudgmentStore(const std::string& path);

  /// Validates label in {0,1}; throws DataError on duplicate key.
  void append(const JudgmentRecord& record);

  /// Returns nullptr on miss. Pointers stay valid for the store's lifetime.
  const JudgmentRecord* find(const std::string& query_id, const std::string& doc_id,
                             const std::string& source) const;

  std::size_t size() const;
  std::vector<JudgmentRecord> records() const; // snapshot, insertion order

private:
  struct Key {
    std::string query_id, doc_id, source;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  void insert_unlocked(const JudgmentRecord& record);

  mutable std::shared_mutex mutex_;
  std::deque<JudgmentRecord> records_; // deque: stable references across appends
  std::unordered_map<Key, const JudgmentRecord*, KeyHash> index_;
  std::ofstream out_;
};

} // namespace qppkit
