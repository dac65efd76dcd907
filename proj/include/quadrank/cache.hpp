#pragma once

// Append-only JSONL persistence. One writer per file (guarded by a mutex);
// a torn final line from a crash is dropped on load, and every payload is
// revalidated before it is trusted.

#include "quadrank/arith.hpp"
#include "quadrank/classgroup.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace quadrank::cache {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCacheDirEnv = "QUADRANK_CACHE_DIR";

/// $QUADRANK_CACHE_DIR if set, else ".quadrank-cache".
std::filesystem::path default_cache_dir();

class Journal {
public:
    explicit Journal(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }
    /// Parsed lines; malformed lines are skipped and counted.
    std::vector<nlohmann::json> load();
    std::size_t malformed() const { return malformed_; }
    /// Appends one line and flushes it to disk.
    void append(const nlohmann::json& entry);
    /// Replaces the file with `entries` (write to a temporary, then rename).
    void rewrite(const std::vector<nlohmann::json>& entries);

private:
    std::filesystem::path path_;
    std::mutex mu_;
    std::size_t malformed_ = 0;
};

nlohmann::json to_json(const arith::Factorization& f);
arith::Factorization factorization_from_json(const nlohmann::json& j);
nlohmann::json to_json(const classgroup::AbelianGroupStructure& g);
classgroup::AbelianGroupStructure structure_from_json(const nlohmann::json& j);

/// Factorizations keyed by n.
class FactorCache {
public:
    explicit FactorCache(const std::filesystem::path& dir);
    std::optional<arith::Factorization> find(const mpz_class& n) const;
    void store(const mpz_class& n, const arith::Factorization& f);
    arith::Factorization factor(const mpz_class& n);
    std::size_t size() const;
    std::size_t rejected() const { return rejected_; }
    void compact();

private:
    Journal journal_;
    mutable std::mutex mu_;
    std::map<mpz_class, arith::Factorization> table_;
    std::size_t rejected_ = 0;
};

/// Class-group structures keyed by discriminant, backed by a StructureCache.
class ClassGroupCache {
public:
    explicit ClassGroupCache(const std::filesystem::path& dir);
    classgroup::StructureCache& memory() { return memory_; }
    /// Writes entries computed since load (sorted by d).
    void flush();
    std::size_t loaded() const { return loaded_; }
    std::size_t rejected() const { return rejected_; }
    void compact();

private:
    Journal journal_;
    classgroup::StructureCache memory_;
    std::map<i128, classgroup::AbelianGroupStructure> persisted_;
    std::size_t loaded_ = 0;
    std::size_t rejected_ = 0;
};

/// Checkpoint journal for resumable runs; entries carry the config hash.
class CheckpointJournal {
public:
    CheckpointJournal(const std::filesystem::path& dir, const std::string& config_hash);
    /// Completed checkpoint payloads by index.
    const std::map<std::size_t, nlohmann::json>& completed() const { return done_; }
    void record(std::size_t index, const nlohmann::json& payload);
    void clear();

private:
    Journal journal_;
    std::string hash_;
    std::map<std::size_t, nlohmann::json> done_;
};

}  // namespace quadrank::cache
