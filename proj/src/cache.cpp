#include "quadrank/cache.hpp"

#include "quadrank/errors.hpp"
#include "quadrank/numtheory.hpp"

#include <cstdlib>
#include <fstream>
#include <unistd.h>
#include <fcntl.h>

namespace quadrank::cache {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_cache_dir() {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    return ".quadrank-cache";
}

Journal::Journal(fs::path path) : path_(std::move(path)) {}

std::vector<json> Journal::load() {
    std::lock_guard lock(mu_);
    std::vector<json> out;
    malformed_ = 0;
    std::ifstream in(path_);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++malformed_;
            continue;
        }
        out.push_back(std::move(j));
    }
    return out;
}

void Journal::append(const json& entry) {
    std::lock_guard lock(mu_);
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    std::string line = entry.dump() + "\n";
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw std::runtime_error("cannot open journal " + path_.string());
    std::size_t off = 0;
    while (off < line.size()) {
        ssize_t n = ::write(fd, line.data() + off, line.size() - off);
        if (n <= 0) {
            ::close(fd);
            throw std::runtime_error("write failed on journal " + path_.string());
        }
        off += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

void Journal::rewrite(const std::vector<json>& entries) {
    std::lock_guard lock(mu_);
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    fs::path tmp = path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        for (const auto& e : entries) out << e.dump() << '\n';
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path_);
}

json to_json(const arith::Factorization& f) {
    json factors = json::array();
    for (const auto& pp : f.factors) factors.push_back({pp.prime.get_str(), pp.exponent});
    return {{"sign", f.sign}, {"factors", factors}};
}

arith::Factorization factorization_from_json(const json& j) {
    arith::Factorization f;
    f.sign = j.at("sign").get<int>();
    for (const auto& pp : j.at("factors")) {
        mpz_class p;
        if (p.set_str(pp.at(0).get<std::string>(), 10) != 0) throw std::invalid_argument("bad prime");
        f.factors.push_back({p, pp.at(1).get<unsigned long>()});
    }
    return f;
}

json to_json(const classgroup::AbelianGroupStructure& g) { return g.elementary_divisors; }

classgroup::AbelianGroupStructure structure_from_json(const json& j) {
    classgroup::AbelianGroupStructure g;
    g.elementary_divisors = j.get<std::vector<std::uint64_t>>();
    for (std::size_t i = 0; i < g.elementary_divisors.size(); ++i) {
        if (g.elementary_divisors[i] < 2) throw std::invalid_argument("elementary divisor below 2");
        if (i && g.elementary_divisors[i] % g.elementary_divisors[i - 1]) throw std::invalid_argument("divisor chain broken");
    }
    return g;
}

// --- factorizations ----------------------------------------------------------

FactorCache::FactorCache(const fs::path& dir) : journal_(dir / "factor.jsonl") {
    for (const auto& e : journal_.load()) {
        try {
            if (e.at("v").get<int>() != kSchemaVersion) throw std::invalid_argument("schema");
            mpz_class n;
            if (n.set_str(e.at("n").get<std::string>(), 10) != 0) throw std::invalid_argument("key");
            auto f = factorization_from_json(e.at("f"));
            if (!arith::validate(f, n)) throw std::invalid_argument("payload");
            table_.emplace(n, std::move(f));
        } catch (const std::exception&) {
            ++rejected_;
        }
    }
    rejected_ += journal_.malformed();
}

std::optional<arith::Factorization> FactorCache::find(const mpz_class& n) const {
    std::lock_guard lock(mu_);
    auto it = table_.find(n);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

void FactorCache::store(const mpz_class& n, const arith::Factorization& f) {
    {
        std::lock_guard lock(mu_);
        if (!table_.emplace(n, f).second) return;
    }
    journal_.append({{"v", kSchemaVersion}, {"n", n.get_str()}, {"f", to_json(f)}});
}

arith::Factorization FactorCache::factor(const mpz_class& n) {
    if (auto hit = find(n)) return *hit;
    auto f = arith::factor(n);
    store(n, f);
    return f;
}

std::size_t FactorCache::size() const {
    std::lock_guard lock(mu_);
    return table_.size();
}

void FactorCache::compact() {
    std::vector<json> entries;
    {
        std::lock_guard lock(mu_);
        for (const auto& [n, f] : table_) entries.push_back({{"v", kSchemaVersion}, {"n", n.get_str()}, {"f", to_json(f)}});
    }
    journal_.rewrite(entries);
}

// --- class groups ------------------------------------------------------------

namespace {

// Cheap consistency checks: the 2-rank fixed by genus theory, and for
// imaginary d the exponent kills the first few prime forms.
bool plausible(i128 d, const classgroup::AbelianGroupStructure& g) {
    if (classgroup::m_rank(g, 2) != static_cast<int>(arith::omega(nt::to_mpz(d))) - 1) return false;
    if (d > 0) return true;
    const std::uint64_t exponent = g.elementary_divisors.empty() ? 1 : g.elementary_divisors.back();
    const auto one = classgroup::principal_form(d);
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u}) {
        auto f = classgroup::prime_form(d, p);
        if (f && classgroup::power(classgroup::reduce(*f), exponent) != one) return false;
    }
    return true;
}

}  // namespace

ClassGroupCache::ClassGroupCache(const fs::path& dir) : journal_(dir / "classgroup.jsonl") {
    for (const auto& e : journal_.load()) {
        try {
            if (e.at("v").get<int>() != kSchemaVersion) throw std::invalid_argument("schema");
            const i128 d = nt::parse_i128(e.at("d").get<std::string>());
            if (!classgroup::is_fundamental(d)) throw std::invalid_argument("key");
            auto g = structure_from_json(e.at("divisors"));
            if (!plausible(d, g)) throw std::invalid_argument("structure");
            persisted_.emplace(d, g);
            memory_.insert(d, g);
            ++loaded_;
        } catch (const std::exception&) {
            ++rejected_;
        }
    }
    rejected_ += journal_.malformed();
}

void ClassGroupCache::flush() {
    // The memory cache only grows; append entries not yet on disk, ordered by d.
    for (i128 d : memory_.keys()) {
        if (persisted_.count(d)) continue;
        auto g = *memory_.find(d);
        journal_.append({{"v", kSchemaVersion}, {"d", nt::to_string(d)}, {"divisors", to_json(g)}});
        persisted_.emplace(d, g);
    }
}

void ClassGroupCache::compact() {
    flush();
    std::vector<json> entries;
    for (const auto& [d, g] : persisted_)
        entries.push_back({{"v", kSchemaVersion}, {"d", nt::to_string(d)}, {"divisors", to_json(g)}});
    journal_.rewrite(entries);
}

// --- checkpoints -------------------------------------------------------------

CheckpointJournal::CheckpointJournal(const fs::path& dir, const std::string& config_hash)
    : journal_(dir / ("run-" + config_hash + ".jsonl")), hash_(config_hash) {
    for (const auto& e : journal_.load()) {
        if (!e.contains("hash") || e["hash"] != hash_ || !e.contains("index") || !e.contains("payload")) continue;
        if (e.value("v", 0) != kSchemaVersion) continue;
        done_[e["index"].get<std::size_t>()] = e["payload"];
    }
}

void CheckpointJournal::record(std::size_t index, const json& payload) {
    journal_.append({{"v", kSchemaVersion}, {"hash", hash_}, {"index", index}, {"payload", payload}});
    done_[index] = payload;
}

void CheckpointJournal::clear() {
    journal_.rewrite({});
    done_.clear();
}

}  // namespace quadrank::cache
