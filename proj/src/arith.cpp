#include "quadrank/arith.hpp"

#include "quadrank/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace quadrank::arith {

namespace {

constexpr std::uint32_t kTrialBound = 1u << 16;

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 a, u64 e, u64 n) {
    u64 r = 1 % n;
    a %= n;
    while (e) {
        if (e & 1) r = mulmod(r, a, n);
        a = mulmod(a, a, n);
        e >>= 1;
    }
    return r;
}

bool miller_rabin_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool miller_rabin_mpz(const mpz_class& n, std::span<const unsigned> bases) {
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    mpz_class nm1 = n - 1, x;
    for (unsigned a : bases) {
        mpz_class base = a;
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool composite = true;
        for (unsigned long r = 1; r < s; ++r) {
            mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
            if (x == nm1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 absdiff(u64 a, u64 b) { return a > b ? a - b : b - a; }

// Brent's cycle detection with batched gcds. Returns a divisor of n,
// possibly n itself when the walk collapses.
u64 rho_u64(u64 n, u64 c, u64 x0) {
    auto step = [&](u64 x) { return static_cast<u64>((static_cast<u128>(x) * x + c) % n); };
    u64 y = x0, x = x0, ys = x0, q = 1, g = 1;
    constexpr u64 batch = 128;
    for (u64 r = 1; g == 1; r <<= 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = step(y);
        for (u64 k = 0; k < r && g == 1; k += batch) {
            ys = y;
            for (u64 i = 0; i < std::min(batch, r - k); ++i) {
                y = step(y);
                q = mulmod(q, absdiff(x, y), n);
            }
            g = std::gcd(q, n);
        }
    }
    if (g == n) {
        do {
            ys = step(ys);
            g = std::gcd(absdiff(x, ys), n);
        } while (g == 1);
    }
    return g;
}

mpz_class rho_mpz(const mpz_class& n, unsigned long c, unsigned long x0) {
    mpz_class y = x0, x = x0, ys = x0, q = 1, g = 1, diff;
    auto step = [&](mpz_class& v) {
        v = v * v + c;
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    constexpr unsigned long batch = 128;
    for (unsigned long r = 1; g == 1; r <<= 1) {
        x = y;
        for (unsigned long i = 0; i < r; ++i) step(y);
        for (unsigned long k = 0; k < r && g == 1; k += batch) {
            ys = y;
            for (unsigned long i = 0; i < std::min(batch, r - k); ++i) {
                step(y);
                diff = x - y;
                q *= diff;
                mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
    }
    if (g == n) {
        do {
            step(ys);
            diff = x - ys;
            mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    return g;
}

// Nontrivial divisor of a composite n that is not a perfect power.
mpz_class find_divisor(const mpz_class& n) {
    unsigned long seed = mpz_fdiv_ui(n.get_mpz_t(), 1000003UL);
    for (unsigned long attempt = 0;; ++attempt) {
        unsigned long c = 1 + (seed + attempt) % 1000003UL;
        unsigned long x0 = 2 + attempt;
        if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 63) {
            u64 nn = mpz_get_ui(n.get_mpz_t());
            u64 g = rho_u64(nn, c % nn, x0 % nn);
            if (g != 1 && g != nn) return mpz_class(static_cast<unsigned long>(g));
        } else {
            mpz_class g = rho_mpz(n, c, x0);
            if (g != 1 && g != n) return g;
        }
    }
}

void split(const mpz_class& m, unsigned long mult, std::map<mpz_class, unsigned long>& out) {
    if (m == 1) return;
    // No prime factor below kTrialBound survives trial division.
    if (m < mpz_class(static_cast<unsigned long>(kTrialBound)) * kTrialBound || is_prime(m)) {
        out[m] += mult;
        return;
    }
    mpz_class root;
    for (unsigned long k = 2; k < mpz_sizeinbase(m.get_mpz_t(), 2) / 16 + 1; ++k) {
        if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), k) != 0) {
            split(root, mult * k, out);
            return;
        }
    }
    mpz_class g = find_divisor(m);
    split(g, mult, out);
    split(m / g, mult, out);
}

std::vector<std::uint32_t> sieve(std::uint32_t limit) {
    std::vector<bool> composite(limit, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i < limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j < limit; j += i) composite[j] = true;
    }
    return primes;
}

}  // namespace

std::vector<std::uint32_t> primes_below(std::uint32_t limit) { return sieve(limit); }

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = sieve(kTrialBound);
    return primes;
}

mpz_class Factorization::value() const {
    mpz_class v = sign, pe;
    for (const auto& [p, e] : factors) {
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
        v *= pe;
    }
    return v;
}

bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 63) return miller_rabin_u64(mpz_get_ui(n.get_mpz_t()));
    for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u}) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    static const mpz_class kDeterministicBound("3317044064679887385961981");
    if (n < kDeterministicBound) {
        static constexpr unsigned bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
        return miller_rabin_mpz(n, bases);
    }
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

Factorization factor(const mpz_class& n) {
    if (n == 0) throw domain_error("factor: n must be nonzero");
    Factorization f;
    f.sign = sgn(n) < 0 ? -1 : 1;
    mpz_class m = abs(n);
    for (std::uint32_t p : small_primes()) {
        if (m == 1) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p) == 0) continue;
        unsigned long e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            ++e;
        }
        f.factors.push_back({mpz_class(static_cast<unsigned long>(p)), e});
    }
    std::map<mpz_class, unsigned long> large;
    split(m, 1, large);
    for (auto& [p, e] : large) f.factors.push_back({p, e});
    return f;
}

KFreeDecomposition kfree_from(const Factorization& f, unsigned k) {
    require(k >= 2, "kfree: k must be at least 2");
    KFreeDecomposition out{mpz_class(f.sign), mpz_class(1), k};
    mpz_class pe;
    for (const auto& [p, e] : f.factors) {
        if (e % k) {
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e % k);
            out.t *= pe;
        }
        if (e / k) {
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e / k);
            out.z *= pe;
        }
    }
    return out;
}

KFreeDecomposition kfree_part(const mpz_class& n, unsigned k) {
    if (n == 0) throw domain_error("kfree_part: n must be nonzero");
    require(k >= 2, "kfree_part: k must be at least 2");
    return kfree_from(factor(n), k);
}

bool is_kfree(const mpz_class& n, unsigned k) { return n != 0 && kfree_part(n, k).z == 1; }

std::size_t omega(const mpz_class& n) { return factor(n).factors.size(); }

bool validate(const Factorization& f, const mpz_class& n) {
    if (f.sign != 1 && f.sign != -1) return false;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        if (f.factors[i].exponent == 0 || !is_prime(f.factors[i].prime)) return false;
        if (i && f.factors[i - 1].prime >= f.factors[i].prime) return false;
    }
    return f.value() == n;
}

std::string to_string(const Factorization& f) {
    std::ostringstream os;
    os << (f.sign < 0 ? "-1" : "1");
    for (const auto& [p, e] : f.factors) {
        os << " * " << p;
        if (e > 1) os << '^' << e;
    }
    return os.str();
}

}  // namespace quadrank::arith
