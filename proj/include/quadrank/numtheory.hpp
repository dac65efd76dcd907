#pragma once

// Fixed-width helpers shared by the class-group code: 128-bit integer
// conversions, gcds, square roots and residue symbols.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace quadrank {

using i128 = __int128;
using u128 = unsigned __int128;

namespace nt {

i128 to_i128(const mpz_class& v);  // throws capacity_error when |v| >= 2^126
mpz_class to_mpz(i128 v);
std::string to_string(i128 v);
i128 parse_i128(const std::string& s);

inline i128 abs(i128 v) { return v < 0 ? -v : v; }
i128 gcd(i128 a, i128 b);

/// Returns g = gcd(a, b) >= 0 and sets u, v with u*a + v*b = g.
i128 xgcd(i128 a, i128 b, i128& u, i128& v);

/// floor(sqrt(n)) for n >= 0.
u128 isqrt(u128 n);
bool is_square(u128 n);

/// Floor division and nonnegative remainder.
i128 floor_div(i128 a, i128 b);
i128 mod(i128 a, i128 b);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

/// Kronecker symbol (d / n) for n > 0.
int kronecker(i128 d, std::uint64_t n);

/// A square root of a modulo the odd prime p; a must be a residue.
std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p);

}  // namespace nt
}  // namespace quadrank
