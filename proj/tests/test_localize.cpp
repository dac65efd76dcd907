#include "quadrank/errors.hpp"
#include "quadrank/localize.hpp"

#include <doctest.h>

#include <random>

using namespace quadrank;
using namespace quadrank::localize;

namespace {

// |t|_p computed directly from the p-power in numerator and denominator.
mpq_class abs_p(const mpq_class& t, unsigned long p) {
    if (t == 0) return 0;
    mpz_class num = abs(t.get_num()), den = t.get_den();
    mpq_class v = 1;
    while (num % p == 0) {
        num /= p;
        v /= p;
    }
    while (den % p == 0) {
        den /= p;
        v *= p;
    }
    return v;
}

void sample_guarantee(const MobiusGadget& g, int samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    const mpz_class M = g.M;
    std::uniform_int_distribution<unsigned long> q(0, 1000000);
    int tested = 0;
    while (tested < samples) {
        mpz_class a = g.A + M * q(rng), b = g.B + M * q(rng);
        if (a <= 0 || b <= 0 || a > 1000000 * M + M || b > 1000000 * M + M) continue;
        mpq_class t;
        try {
            t = pullback(g, a, b);
        } catch (const domain_error&) {
            continue;
        }
        if (g.S.archimedean) CHECK(abs(t) < g.epsilon);
        for (auto p : g.S.finite_primes) CHECK(abs_p(t, p) < g.epsilon);
        auto back = g.psi.apply(t);
        REQUIRE(back);
        mpq_class ab(a, b);
        ab.canonicalize();
        CHECK(*back == ab);
        ++tested;
    }
}

}  // namespace

TEST_SUITE("localize") {

TEST_CASE("padic_abs: documented values") {
    CHECK(padic_abs(mpq_class(1, 22), 11) == 11);
    CHECK(padic_abs(9305, 5) == mpq_class(1, 5));
    CHECK(padic_abs(0, 7) == 0);
    CHECK_THROWS_AS(padic_abs(3, 6), precondition_error);
    CHECK(ord_p(mpq_class(8, 9), 2) == 3);
    CHECK(ord_p(mpq_class(8, 9), 3) == -2);
    CHECK_FALSE(ord_p(0, 3).has_value());
}

TEST_CASE("place sets") {
    auto S = parse_places("inf, 3, 2");
    CHECK(S.archimedean);
    CHECK(S.finite_primes == std::set<unsigned long>{2, 3});
    CHECK(to_string(S) == "inf,2,3");
    CHECK(parse_places("none").empty());
    CHECK_THROWS_AS(parse_places("4"), usage_error);
}

TEST_CASE("build_gadget: documented values") {
    auto g0 = build_gadget({}, mpq_class(1, 2));
    CHECK(g0.psi.is_identity());
    CHECK(g0.M == 1);

    auto g1 = build_gadget(parse_places("inf"), mpq_class(1, 10));
    CHECK(g1.N == 11);
    CHECK(g1.psi.same_map(forms::MobiusMap{-11, 1, 11, 1}));
    CHECK(g1.M == 1);
    CHECK(g1.A == 1);
    CHECK(g1.B == 1);

    auto g2 = build_gadget(parse_places("inf,2"), mpq_class(1, 10));
    CHECK(g2.N == 11);
    CHECK(g2.M == 32);
    CHECK(g2.A == 1);
    CHECK(g2.B == 1);
    CHECK(g2.exponents.at(2) == 5);
}

TEST_CASE("N is coprime to the finite places") {
    auto g = build_gadget(parse_places("inf,2,3"), mpq_class(1, 10));
    CHECK(g.N == 11);
    auto h = build_gadget(parse_places("inf,11"), mpq_class(1, 10));
    CHECK(h.N == 12);
    CHECK(gcd(h.N, mpz_class(11)) == 1);
}

TEST_CASE("pullback: documented values") {
    auto g = build_gadget(parse_places("inf"), mpq_class(1, 10));
    CHECK(pullback(g, 1, 1) == 0);
    CHECK(pullback(g, 3, 1) == mpq_class(-1, 22));
    CHECK(pullback(g, 1, 3) == mpq_class(1, 22));
    auto g2 = build_gadget(parse_places("inf,2"), mpq_class(1, 10));
    CHECK_THROWS_AS(pullback(g2, 2, 1), precondition_error);
    CHECK_THROWS_AS(pullback(g2, -31, 1), precondition_error);
}

TEST_CASE("gadget guarantee by sampling") {
    sample_guarantee(build_gadget({}, mpq_class(1, 2)), 2000, 1);
    sample_guarantee(build_gadget(parse_places("inf"), mpq_class(1, 10)), 2000, 2);
    sample_guarantee(build_gadget(parse_places("inf,2"), mpq_class(1, 10)), 2000, 3);
    sample_guarantee(build_gadget(parse_places("inf,2,3"), mpq_class(1, 100)), 2000, 4);
    sample_guarantee(build_gadget(parse_places("5,7"), mpq_class(1, 30)), 2000, 5);
    for (auto g : {build_gadget(parse_places("2,3"), mpq_class(1, 10)), build_gadget({}, mpq_class(1, 3))})
        CHECK(g.psi.is_identity());
}

TEST_CASE("gadget JSON summary") {
    auto j = build_gadget(parse_places("inf,2"), mpq_class(1, 10)).to_json();
    CHECK(j.find("\"M\"") != std::string::npos);
    CHECK(j.find("\"psi\"") != std::string::npos);
}

}  // TEST_SUITE
