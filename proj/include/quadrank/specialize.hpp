#pragma once

// Quadratic fields from specializations of y^2 = f(x), f monic of odd degree.
//
// With M the product of the bad primes and N/M a point where f has a fixed
// sign on a unit neighbourhood, the admissible points are
//
//     x0 = +-N/M + (r/s) * M,   |r| * M < s,  gcd(s, M) = gcd(r, s) = 1,
//
// so every p | M divides the denominator of x0 exactly once and
// ord_p f(x0) = -deg f is odd: p ramifies in Q(sqrt f(x0)).

#include "quadrank/classgroup.hpp"
#include "quadrank/forms.hpp"
#include "quadrank/poly.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace quadrank::specialize {

using forms::Polynomial;

enum class Sign { negative, positive };

Sign parse_sign(const std::string& text);
std::string to_string(Sign s);

struct CurveSpec {
    Polynomial f;  // monic, integral, squarefree, odd degree 2g + 1
    int genus = 0;
    unsigned m = 2;
    int claimed_torsion_rank = 0;
    std::string provenance;
    std::optional<Polynomial> pre_model;  // even-degree input when f is an odd model
};

/// "lsw-genus4", or "family" with parameters m > 1 and c not in {0, 1, -1}:
/// the odd model of x^(2m) - (1 + c^2) x^m + c^2 at the root x = 1.
CurveSpec catalog_curve(const std::string& name, int m = 0, const mpq_class& c = 0);

/// Catalog name ("lsw-genus4", "family:m:c") or a key=value file with
/// `coefficients`, optional `root` (for even degree), `m`, `claimed_rank`,
/// `label`.
CurveSpec load_curve(const std::string& name_or_path);

/// Validates the CurveSpec invariants; throws precondition_error.
void validate(const CurveSpec& c);

/// Primes dividing disc(f).
std::set<unsigned long> discriminant_primes(const Polynomial& f);

/// Least N >= 1 with gcd(N, M) = 1 such that every real root of f lies
/// below N/M - 1 (sign +) or above -N/M + 1 (sign -). Then f is positive
/// on (N/M - 1, N/M + 1), respectively negative on (-N/M - 1, -N/M + 1).
mpz_class choose_shift(const Polynomial& f, const mpz_class& M, Sign sign);

enum class Status { pending, verified, refuted, unverifiable };

std::string to_string(Status s);

struct SpecializationRecord {
    mpq_class x0;
    mpz_class height;     // max(|a|, |b|)
    mpz_class raw_value;  // b^(d+1) f(a/b)
    mpz_class t;          // squarefree core of raw_value
    mpz_class d_field;
    int predicted_rank = 0;
    std::optional<int> verified_rank;
    Status status = Status::pending;

    std::string to_json() const;
};

/// raw = b^(d+1) f(a/b) for x0 = a/b in lowest terms.
mpz_class raw_value(const Polynomial& f, const mpq_class& x0);

/// Record for x0 (t = 1 yields d_field = 1: no quadratic field).
SpecializationRecord specialize_at(const CurveSpec& c, const mpq_class& x0, int predicted_rank);

struct EnumerationOptions {
    Sign sign = Sign::negative;
    std::set<unsigned long> bad_primes;
    unsigned long height_bound = 1;  // bound on s, the height of (r/s)
    unsigned workers = 1;
};

struct EnumerationResult {
    std::vector<SpecializationRecord> records;  // sorted by (height, x0), distinct t
    std::size_t candidates = 0;                 // admissible x0 visited
    std::size_t duplicates = 0;                 // suppressed repeats of t
    std::size_t squares = 0;                    // raw value a perfect square
    mpz_class M = 1, N = 1;
    bool ramification_forced = false;           // S nonempty
    mpz_class height_constant;                  // H(x0) <= height_constant * B
    mpz_class discriminant_constant;            // |d_field| <= constant * B^(deg f + 1)
};

EnumerationResult enumerate_specializations(const CurveSpec& c, const EnumerationOptions& opt);

/// The first `count` distinct fields by height of x0, growing the bound
/// on s until the prefix is complete.
EnumerationResult first_by_height(const CurveSpec& c, EnumerationOptions opt, std::size_t count);

/// Class-group m-rank of the record's field. Imaginary fields use
/// group_structure; real fields use the narrow group (odd m, d <= 1e8).
/// Sets verified_rank and status; fields out of reach become unverifiable.
void verify_record(SpecializationRecord& r, unsigned m, classgroup::StructureCache* cache = nullptr);

}  // namespace quadrank::specialize
