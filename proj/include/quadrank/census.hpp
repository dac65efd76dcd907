#pragma once

// Counting harnesses: distinct k-free cores of binary-form values over a
// box, and counts of specialized fields with a verified class-group rank.

#include "quadrank/classgroup.hpp"
#include "quadrank/forms.hpp"
#include "quadrank/specialize.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace quadrank::census {

struct CensusPoint {
    std::uint64_t x = 0;
    std::uint64_t count = 0;
    bool operator==(const CensusPoint&) const = default;
};

struct CensusSeries {
    std::vector<CensusPoint> checkpoints;  // x increasing, counts nondecreasing
    double refuted_fraction = 0;
};

/// a = A (mod M), b = B (mod M); M = 1 means no restriction.
struct Congruence {
    std::uint64_t M = 1, A = 0, B = 0;
};

/// Distinct k-free cores t with |t| <= x of F(a, b), 1 <= a, b <= x^(1/deg F).
std::set<mpz_class> s_k_cores(const forms::BinaryForm& F, std::uint64_t x, unsigned k,
                              const Congruence& cong = {}, unsigned workers = 1);
std::uint64_t s_k_count(const forms::BinaryForm& F, std::uint64_t x, unsigned k,
                        const Congruence& cong = {}, unsigned workers = 1);

/// x = first, 10 first, ..., up to and including last.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t first, std::uint64_t last);

struct FieldCensusOptions {
    specialize::EnumerationOptions enumeration;
    std::uint64_t disc_bound = 0;          // X
    unsigned m = 2;
    int rank_target = 0;                   // r
    std::vector<std::uint64_t> checkpoints;  // empty: log_checkpoints(10, X)
};

struct FieldCensus {
    CensusSeries series;
    std::vector<specialize::SpecializationRecord> records;  // |d| <= X, verified
    std::size_t refuted = 0;
    std::size_t unverifiable = 0;
};

/// Checkpoint-at-a-time field census. Records are enumerated once and
/// sorted by |d|; checkpoint i verifies the records with |d| in
/// (x_(i-1), x_i].
class FieldCensusRun {
public:
    FieldCensusRun(const specialize::CurveSpec& c, FieldCensusOptions opt, classgroup::StructureCache* cache = nullptr);

    const std::vector<std::uint64_t>& checkpoints() const { return checkpoints_; }
    const specialize::EnumerationResult& enumeration() const { return enumeration_; }

    struct Step {
        std::uint64_t x = 0;
        std::uint64_t hits = 0;  // verified_rank >= r in this slice
        std::size_t refuted = 0;
        std::size_t judged = 0;  // verified or refuted
        std::size_t unverifiable = 0;
        std::vector<specialize::SpecializationRecord> records;
    };
    Step run_checkpoint(std::size_t i);

    /// Cumulative series from per-checkpoint steps.
    static CensusSeries assemble(const std::vector<Step>& steps);

private:
    FieldCensusOptions opt_;
    classgroup::StructureCache* cache_;
    std::vector<std::uint64_t> checkpoints_;
    specialize::EnumerationResult enumeration_;
    std::vector<specialize::SpecializationRecord> in_range_;  // |d| <= X, sorted by (|d|, height, x0)
};

FieldCensus field_census(const specialize::CurveSpec& c, const FieldCensusOptions& opt,
                         classgroup::StructureCache* cache = nullptr);

struct GrowthFit {
    bool ok = false;
    std::string message;
    double slope = 0;
    double constant = 0;
};

/// Least-squares slope of log(count) on log(x) over positive counts, and the
/// largest c with count >= c x^e / (log x)^p at every checkpoint.
GrowthFit growth_fit(const CensusSeries& s, double exponent, int log_power);

/// CSV with header checkpoint,count,fitted_slope,fitted_constant,refuted_fraction.
/// The fit on each row uses the checkpoints up to that row.
std::string to_csv(const CensusSeries& s, double exponent, int log_power);

}  // namespace quadrank::census
