#include "quadrank/numtheory.hpp"

#include "quadrank/errors.hpp"

#include <algorithm>
#include <cmath>

namespace quadrank::nt {

i128 to_i128(const mpz_class& v) {
    if (mpz_sizeinbase(v.get_mpz_t(), 2) > 125) throw capacity_error("integer exceeds 125 bits");
    mpz_class a = abs(v);
    mpz_class hi = a >> 64;
    mpz_class lo = a - (hi << 64);
    u128 r = (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) | mpz_get_ui(lo.get_mpz_t());
    return sgn(v) < 0 ? -static_cast<i128>(r) : static_cast<i128>(r);
}

mpz_class to_mpz(i128 v) {
    u128 a = v < 0 ? -static_cast<u128>(v) : static_cast<u128>(v);
    mpz_class r = static_cast<unsigned long>(a >> 64);
    r <<= 64;
    r += static_cast<unsigned long>(a & 0xffffffffffffffffULL);
    return v < 0 ? mpz_class(-r) : r;
}

std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    u128 a = neg ? -static_cast<u128>(v) : static_cast<u128>(v);
    std::string s;
    while (a) {
        s.push_back(static_cast<char>('0' + static_cast<int>(a % 10)));
        a /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

i128 parse_i128(const std::string& s) {
    mpz_class v;
    if (v.set_str(s, 10) != 0) throw usage_error("not an integer: " + s);
    return to_i128(v);
}

i128 gcd(i128 a, i128 b) {
    a = abs(a);
    b = abs(b);
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i128 xgcd(i128 a, i128 b, i128& u, i128& v) {
    i128 r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        i128 q = r0 / r1;
        i128 tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 < 0) {
        r0 = -r0;
        s0 = -s0;
        t0 = -t0;
    }
    u = s0;
    v = t0;
    return r0;
}

u128 isqrt(u128 n) {
    if (n == 0) return 0;
    u128 x = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
    while (x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

bool is_square(u128 n) {
    u128 r = isqrt(n);
    return r * r == n;
}

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i128 mod(i128 a, i128 b) {
    i128 r = a % b;
    if (r < 0) r += abs(b);
    return r;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

namespace {

// Jacobi symbol (a / n), n odd positive.
int jacobi(std::uint64_t a, std::uint64_t n) {
    int result = 1;
    a %= n;
    while (a) {
        while ((a & 1) == 0) {
            a >>= 1;
            std::uint64_t r = n & 7;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

}  // namespace

int kronecker(i128 d, std::uint64_t n) {
    require(n > 0, "kronecker: n must be positive");
    int result = 1;
    while ((n & 1) == 0) {
        if ((d & 1) == 0) return 0;
        int r = static_cast<int>(mod(d, 8));
        if (r == 3 || r == 5) result = -result;
        n >>= 1;
    }
    if (n == 1) return result;
    std::uint64_t a = static_cast<std::uint64_t>(mod(d, static_cast<i128>(n)));
    return result * jacobi(a, n);
}

std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0 || p == 2) return a;
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    std::uint64_t q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::uint64_t z = 2;
    while (jacobi(z, p) != -1) ++z;
    std::uint64_t m = static_cast<std::uint64_t>(s);
    std::uint64_t c = powmod(z, q, p);
    std::uint64_t t = powmod(a, q, p);
    std::uint64_t r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, t2 = t;
        while (t2 != 1) {
            t2 = mulmod(t2, t2, p);
            ++i;
        }
        std::uint64_t b = c;
        for (std::uint64_t j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

}  // namespace quadrank::nt
