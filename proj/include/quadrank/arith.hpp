#pragma once

// Integer factorization and k-free decomposition.
//
// factor() runs trial division by the primes below 2^16, then splits
// composite cofactors with Brent's variant of Pollard rho. The rho
// polynomial and starting point are derived from the cofactor itself, so
// the output for a given n never depends on call order or thread.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace quadrank::arith {

struct PrimePower {
    mpz_class prime;
    unsigned long exponent = 0;

    bool operator==(const PrimePower&) const = default;
};

/// sign * prod(p^e), primes strictly increasing.
struct Factorization {
    int sign = 1;
    std::vector<PrimePower> factors;

    mpz_class value() const;
    bool operator==(const Factorization&) const = default;
};

/// n = t * z^k with t k-free, z > 0, sign(t) = sign(n).
struct KFreeDecomposition {
    mpz_class t;
    mpz_class z;
    unsigned k = 2;
};

Factorization factor(const mpz_class& n);

KFreeDecomposition kfree_part(const mpz_class& n, unsigned k);

/// k-free decomposition read off an existing factorization.
KFreeDecomposition kfree_from(const Factorization& f, unsigned k);

/// Deterministic Miller-Rabin below 3.3e24 (first thirteen prime bases);
/// above that bound, GMP's BPSW-based test.
bool is_prime(const mpz_class& n);

bool is_kfree(const mpz_class& n, unsigned k);

/// Number of distinct prime divisors of |n|.
std::size_t omega(const mpz_class& n);

/// Checks the Factorization invariants against n: exact product, strictly
/// increasing primes, positive exponents, every prime passes is_prime.
bool validate(const Factorization& f, const mpz_class& n);

std::string to_string(const Factorization& f);

/// Primes below `limit` (simple sieve, cached for the default bound).
const std::vector<std::uint32_t>& small_primes();
std::vector<std::uint32_t> primes_below(std::uint32_t limit);

}  // namespace quadrank::arith
