#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"
#include "quadrank/numtheory.hpp"

#include <doctest.h>

#include <random>

using namespace quadrank;
using arith::Factorization;
using arith::PrimePower;

namespace {

// Plain trial division, independent of the library's factoring paths.
std::vector<std::pair<long long, unsigned>> trial_factor(long long n) {
    std::vector<std::pair<long long, unsigned>> out;
    if (n < 0) n = -n;
    for (long long p = 2; p * p <= n; ++p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

bool same(const Factorization& f, long long n) {
    auto oracle = trial_factor(n);
    if (f.sign != (n < 0 ? -1 : 1) || f.factors.size() != oracle.size()) return false;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        if (f.factors[i].prime != mpz_class(static_cast<long>(oracle[i].first)) ||
            f.factors[i].exponent != oracle[i].second)
            return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("arith") {

TEST_CASE("factor: documented values") {
    CHECK(arith::factor(1) == Factorization{1, {}});
    CHECK(arith::factor(-12) == Factorization{-1, {{2, 2}, {3, 1}}});
    CHECK(arith::factor(11398625) == Factorization{1, {{5, 3}, {7, 2}, {1861, 1}}});
    CHECK(same(arith::factor(11398625), 11398625));
    CHECK_THROWS_AS(arith::factor(0), domain_error);
}

TEST_CASE("kfree_part: documented values") {
    auto a = arith::kfree_part(12, 2);
    CHECK(a.t == 3);
    CHECK(a.z == 2);
    auto b = arith::kfree_part(360, 3);
    CHECK(b.t == 45);
    CHECK(b.z == 2);
    auto c = arith::kfree_part(-50, 2);
    CHECK(c.t == -2);
    CHECK(c.z == 5);
    CHECK_THROWS_AS(arith::kfree_part(0, 2), domain_error);
    CHECK_THROWS_AS(arith::kfree_part(5, 1), precondition_error);
}

TEST_CASE("factor matches trial division on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> dist(-1000000000000LL, 1000000000000LL);
    for (int i = 0; i < 300; ++i) {
        long long n = dist(rng);
        if (n == 0) continue;
        auto f = arith::factor(mpz_class(static_cast<long>(n)));
        CHECK_MESSAGE(same(f, n), n);
    }
}

TEST_CASE("factor reproduces n; primes certified independently") {
    std::mt19937_64 rng(11);
    std::vector<mpz_class> inputs;
    std::uniform_int_distribution<long long> dist(-1000000000000LL, 1000000000000LL);
    for (int i = 0; i < 2000; ++i) inputs.emplace_back(static_cast<long>(dist(rng)));
    // adversarial: perfect powers, primes, smooth numbers, semiprimes
    inputs.push_back(mpz_class("1000000000000"));
    inputs.push_back(mpz_class(2) * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2);
    inputs.push_back(mpz_class("999999999989"));
    inputs.push_back(mpz_class("999983") * mpz_class("999979"));
    inputs.push_back(mpz_class("4611686014132420609"));  // (2^31 - 1)^2
    inputs.push_back(mpz_class("304250263527210"));      // primorial 41#
    inputs.push_back(mpz_class("1000000007") * mpz_class("1000000009") * mpz_class("998244353"));
    mpz_class p61 = (mpz_class(1) << 61) - 1;
    inputs.push_back(p61 * p61 * p61);
    for (const auto& n : inputs) {
        if (n == 0) continue;
        auto f = arith::factor(n);
        CHECK(f.value() == n);
        for (std::size_t i = 0; i < f.factors.size(); ++i) {
            CHECK(mpz_probab_prime_p(f.factors[i].prime.get_mpz_t(), 40) > 0);
            CHECK(f.factors[i].exponent >= 1);
            if (i) CHECK(f.factors[i - 1].prime < f.factors[i].prime);
        }
        CHECK(arith::validate(f, n));
    }
}

TEST_CASE("factor is deterministic across calls") {
    mpz_class n("123456789012345678901234567");
    auto a = arith::factor(n);
    for (int i = 0; i < 5; ++i) CHECK(arith::factor(n) == a);
}

TEST_CASE("kfree_part invariants on 10^4 random inputs") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long long> dist(-1000000000000LL, 1000000000000LL);
    for (int i = 0; i < 10000; ++i) {
        long long n = dist(rng);
        if (n == 0) continue;
        unsigned k = 2 + (i & 1);
        mpz_class N(static_cast<long>(n));
        auto r = arith::kfree_part(N, k);
        mpz_class zk;
        mpz_pow_ui(zk.get_mpz_t(), r.z.get_mpz_t(), k);
        CHECK(r.t * zk == N);
        CHECK(r.z > 0);
        CHECK(sgn(r.t) == sgn(N));
        CHECK(arith::is_kfree(r.t, k));
    }
}

TEST_CASE("is_prime and small helpers") {
    CHECK(arith::is_prime(2));
    CHECK_FALSE(arith::is_prime(1));
    CHECK_FALSE(arith::is_prime(561));  // Carmichael
    CHECK(arith::is_prime(mpz_class("170141183460469231731687303715884105727")));  // 2^127 - 1
    CHECK_FALSE(arith::is_prime(mpz_class("3825123056546413051")));  // strong pseudoprime to bases 2..23
    CHECK(arith::omega(-84) == 3);
    CHECK(arith::primes_below(30) == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
}

TEST_CASE("128-bit helpers") {
    CHECK(nt::kronecker(-23, 2) == 1);
    CHECK(nt::kronecker(-23, 5) == -1);
    CHECK(nt::kronecker(-84, 3) == 0);
    for (std::uint64_t p : {3ull, 7ull, 1000003ull}) {
        for (std::uint64_t a = 1; a < 50; ++a) {
            if (nt::powmod(a, (p - 1) / 2, p) != 1) continue;
            auto r = nt::sqrt_mod_prime(a, p);
            CHECK(nt::mulmod(r, r, p) == a % p);
        }
    }
    i128 u, v;
    i128 g = nt::xgcd(240, 46, u, v);
    CHECK(g == 2);
    CHECK(u * 240 + v * 46 == 2);
    CHECK(nt::isqrt(static_cast<u128>(99)) == 9);
    CHECK(nt::to_string(nt::parse_i128("-99999999999999999999")) == "-99999999999999999999");
}

}  // TEST_SUITE
