#pragma once

// Class groups of quadratic fields through binary quadratic forms.
//
// Imaginary discriminants: exact composition and reduction in 128-bit
// arithmetic. The structure comes from prime forms fed into a Sylow-wise
// subgroup builder; the target order is the count of reduced forms for
// |d| <= 10^6 and an Euler-product window above that.
//
// Real discriminants: narrow class group from the cycles of reduced
// indefinite forms (small d only).

#include "quadrank/numtheory.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace quadrank::classgroup {

/// Largest |d| accepted by group_structure.
inline constexpr i128 kImaginaryCapacity = static_cast<i128>(10000000000) * 10000000000;
/// Below this |d| the class number is obtained by enumerating reduced forms.
inline constexpr i128 kEnumerationLimit = 1000000;
/// Largest d accepted by narrow_group_structure.
inline constexpr i128 kRealCapacity = 100000000;

struct QForm {
    i128 a = 0, b = 0, c = 0;

    i128 discriminant() const { return b * b - 4 * a * c; }
    bool operator==(const QForm&) const = default;
    auto operator<=>(const QForm&) const = default;
};

std::string to_string(const QForm& f);

struct QuadraticField {
    mpz_class t;
    mpz_class d;
    bool imaginary = false;
};

QuadraticField quadratic_field(const mpz_class& t);

i128 fundamental_discriminant(i128 t);
bool is_fundamental(i128 d);

struct AbelianGroupStructure {
    std::vector<std::uint64_t> elementary_divisors;  // d_1 | d_2 | ... , all >= 2

    std::uint64_t order() const;
    bool operator==(const AbelianGroupStructure&) const = default;
};

std::string to_string(const AbelianGroupStructure& g);

/// Number of cyclic factors of order m that embed into G.
int m_rank(const AbelianGroupStructure& g, std::uint64_t m);

// --- imaginary forms -------------------------------------------------------

/// All reduced forms of discriminant d < 0, sorted.
std::vector<QForm> reduced_forms(i128 d);

QForm reduce(QForm f);
bool is_reduced(const QForm& f);
QForm principal_form(i128 d);
QForm inverse(const QForm& f);
QForm compose(const QForm& f1, const QForm& f2);
QForm power(const QForm& f, std::uint64_t e);

/// Unreduced Dirichlet composition; needs a1, a2 > 0. Works for any
/// discriminant sign.
QForm compose_raw(const QForm& f1, const QForm& f2);

/// The form (p, b, c) with 0 <= b <= p, or nullopt when p is inert in d.
/// p must be prime.
std::optional<QForm> prime_form(i128 d, std::uint64_t p);

struct ClassNumberWindow {
    double estimate = 0;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

/// sqrt|d|/pi * L(1, chi_d) truncated to primes below 2^18, widened by 25%.
ClassNumberWindow class_number_window(i128 d);

enum class Certification { enumeration, analytic_window, bach_bound };

struct StructureReport {
    AbelianGroupStructure structure;
    Certification certified_by = Certification::enumeration;
    std::size_t generators_used = 0;
};

StructureReport group_structure_report(i128 d);
AbelianGroupStructure group_structure(i128 d);

// --- real (indefinite) forms -----------------------------------------------

bool is_reduced_indefinite(const QForm& f);
QForm rho(const QForm& f);
QForm rho_inverse(const QForm& f);
QForm reduce_indefinite(QForm f);

/// Reduced indefinite forms of discriminant d > 0, sorted.
std::vector<QForm> reduced_indefinite_forms(i128 d);

enum class CycleWalk { forward, backward };

/// Cycle index for each form of reduced_indefinite_forms(d).
std::vector<std::size_t> cycle_partition(i128 d, CycleWalk walk);

AbelianGroupStructure narrow_group_structure(i128 d, CycleWalk walk = CycleWalk::forward);

// --- memoization -------------------------------------------------------------

/// Thread-safe cache of structures keyed by discriminant.
class StructureCache {
public:
    std::optional<AbelianGroupStructure> find(i128 d) const;
    void insert(i128 d, const AbelianGroupStructure& g);
    AbelianGroupStructure get_or_compute(i128 d, const std::function<AbelianGroupStructure(i128)>& compute);
    std::size_t size() const;
    /// Keys in increasing order.
    std::vector<i128> keys() const;

private:
    mutable std::mutex mu_;
    std::map<i128, AbelianGroupStructure> table_;
};

}  // namespace quadrank::classgroup
