#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"
#include "quadrank/specialize.hpp"

#include <doctest.h>

#include <json.hpp>

#include <set>

using namespace quadrank;
using namespace quadrank::specialize;
using forms::Polynomial;

namespace {

Polynomial P(std::vector<long> c) {
    std::vector<mpq_class> q(c.begin(), c.end());
    return Polynomial(q);
}

mpz_class pow_ui(const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

}  // namespace

TEST_SUITE("specialize") {

TEST_CASE("catalog curves") {
    auto lsw = catalog_curve("lsw-genus4");
    CHECK(lsw.f == P({11764900, 0, 0, -369249, 0, 0, 2973, 0, 0, 1}));
    CHECK(lsw.genus == 4);
    CHECK(lsw.m == 3);
    CHECK(lsw.claimed_torsion_rank == 3);
    CHECK(discriminant_primes(lsw.f) == std::set<unsigned long>{2, 3, 5, 7, 11});

    auto f2 = catalog_curve("family", 2, 2);
    CHECK(f2.pre_model);
    CHECK(*f2.pre_model == P({4, 0, -5, 0, 1}));
    CHECK(f2.f == P({36, -24, 1, 1}));
    CHECK(f2.genus == 1);
    CHECK(discriminant_primes(f2.f) == std::set<unsigned long>{2, 3});

    auto f3 = catalog_curve("family", 3, 2);
    CHECK(*f3.pre_model == P({4, 0, 0, -5, 0, 0, 1}));
    CHECK(f3.f == P({6561, -4374, 1215, -135, 0, 1}));
    CHECK(f3.genus == 2);

    CHECK(load_curve("family:3:2").f == f3.f);
    CHECK_THROWS_AS(catalog_curve("family", 2, 1), precondition_error);
    CHECK_THROWS_AS(catalog_curve("family", 2, -1), precondition_error);
    CHECK_THROWS_AS(catalog_curve("family", 2, 0), precondition_error);
    CHECK_THROWS_AS(catalog_curve("family", 1, 2), precondition_error);
    CHECK_THROWS_AS(catalog_curve("nope"), precondition_error);
    CHECK_THROWS_AS(load_curve("/nonexistent/curve.txt"), usage_error);
}

TEST_CASE("validate rejects bad curves") {
    CurveSpec c;
    c.f = P({0, 0, 0, 1});  // w^3, not squarefree
    c.genus = 1;
    CHECK_THROWS_AS(validate(c), precondition_error);
    c.f = P({1, 0, 0, 2});
    CHECK_THROWS_AS(validate(c), precondition_error);
    c.f = P({1, 0, 1});
    CHECK_THROWS_AS(validate(c), precondition_error);
}

TEST_CASE("choose_shift") {
    auto f2 = catalog_curve("family", 2, 2).f;  // real roots -6, 2, 3
    CHECK(choose_shift(f2, 6, Sign::positive) == 25);
    CHECK(choose_shift(f2, 6, Sign::negative) == 43);
    CHECK_THROWS_AS(choose_shift(P({0, 0, 0, 1}), 1, Sign::positive), precondition_error);
    CHECK(choose_shift(P({0, 1}), 1, Sign::positive) == 1);
    CHECK(choose_shift(P({0, 1}), 1, Sign::negative) == 1);

    // f keeps the requested sign on a grid over the unit neighbourhood
    auto lsw = catalog_curve("lsw-genus4");
    for (long M : {1L, 6L, 2310L}) {
        for (Sign sg : {Sign::positive, Sign::negative}) {
            mpz_class N = choose_shift(lsw.f, M, sg);
            CHECK(gcd(N, mpz_class(M)) == 1);
            mpq_class c(N, M);
            c.canonicalize();
            if (sg == Sign::negative) c = -c;
            for (long j = -99; j <= 99; ++j) {
                mpq_class step(j, 100);
                step.canonicalize();
                CHECK(sgn(lsw.f(c + step)) == (sg == Sign::positive ? 1 : -1));
            }
        }
    }
}

TEST_CASE("specialize_at") {
    auto lsw = catalog_curve("lsw-genus4");
    auto r = specialize_at(lsw, 1, 3);
    CHECK(r.raw_value == 11398625);
    CHECK(r.t == 9305);
    CHECK(r.d_field == 9305);
    CHECK(r.height == 1);
    CHECK(r.status == Status::pending);
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["t"] == 9305);
    CHECK(j["status"] == "pending");

    auto f2 = catalog_curve("family", 2, 2);
    auto s = specialize_at(f2, mpq_class(-43, 6), 2);
    CHECK(s.raw_value == -140910);
    CHECK(s.d_field == -563640);
    CHECK_THROWS_AS(specialize_at(f2, mpq_class(2), 2), domain_error);  // f(2) = 0
}

TEST_CASE("raw_value against direct evaluation") {
    auto lsw = catalog_curve("lsw-genus4");
    for (long a = -20; a <= 20; ++a) {
        for (long b = 1; b <= 9; ++b) {
            mpq_class x(a, b);
            x.canonicalize();
            mpq_class direct = lsw.f(x) * mpq_class(pow_ui(x.get_den(), 10));
            CHECK(direct.get_den() == 1);
            CHECK(raw_value(lsw.f, x) == direct.get_num());
        }
    }
}

TEST_CASE("enumeration: first record and invariants with forced ramification") {
    auto f2 = catalog_curve("family", 2, 2);
    EnumerationOptions opt;
    opt.sign = Sign::negative;
    opt.bad_primes = {2, 3};
    opt.height_bound = 300;
    auto res = enumerate_specializations(f2, opt);
    REQUIRE(!res.records.empty());
    CHECK(res.M == 6);
    CHECK(res.N == 43);
    CHECK(res.ramification_forced);
    CHECK(res.records.front().x0 == mpq_class(-43, 6));
    CHECK(res.records.front().d_field == -563640);

    std::set<mpz_class> ts;
    const auto B = mpz_class(static_cast<unsigned long>(opt.height_bound));
    for (const auto& r : res.records) {
        CHECK(ts.insert(r.t).second);
        CHECK(r.t < 0);
        CHECK(r.x0.get_den() % 6 == 0);
        CHECK(r.d_field % 2 == 0);
        CHECK(r.d_field % 3 == 0);
        CHECK(r.height <= res.height_constant * B);
        CHECK(abs(r.d_field) <= res.discriminant_constant * pow_ui(B, 4));
        CHECK(r.t == arith::kfree_part(r.raw_value, 2).t);
    }
    CHECK(res.candidates >= res.records.size() + res.duplicates);
    for (std::size_t i = 1; i < res.records.size(); ++i)
        CHECK(res.records[i - 1].height <= res.records[i].height);

    // worker count does not change the output
    opt.workers = 4;
    auto res4 = enumerate_specializations(f2, opt);
    REQUIRE(res4.records.size() == res.records.size());
    for (std::size_t i = 0; i < res.records.size(); ++i) CHECK(res4.records[i].x0 == res.records[i].x0);
    CHECK(res4.duplicates == res.duplicates);
}

TEST_CASE("enumeration: small bound produces duplicates that are suppressed") {
    auto f3 = catalog_curve("family", 3, 2);
    EnumerationOptions opt;
    opt.sign = Sign::positive;
    opt.height_bound = 60;
    auto res = enumerate_specializations(f3, opt);
    std::set<mpz_class> ts;
    for (const auto& r : res.records) CHECK(ts.insert(r.t).second);
    CHECK(res.records.size() + res.duplicates + res.squares == res.candidates);
    CHECK_FALSE(res.ramification_forced);
    for (const auto& r : res.records) CHECK(r.t > 0);
}

TEST_CASE("first_by_height is a prefix of a larger enumeration") {
    auto f2 = catalog_curve("family", 2, 2);
    EnumerationOptions opt;
    opt.sign = Sign::negative;
    opt.bad_primes = {2, 3};
    auto first = first_by_height(f2, opt, 15);
    REQUIRE(first.records.size() == 15);
    opt.height_bound = 2000;
    auto big = enumerate_specializations(f2, opt);
    REQUIRE(big.records.size() >= 15);
    for (std::size_t i = 0; i < 15; ++i) CHECK(first.records[i].t == big.records[i].t);
    CHECK_THROWS_AS(first_by_height(f2, opt, 0), precondition_error);
}

TEST_CASE("verify_record") {
    auto f2 = catalog_curve("family", 2, 2);
    auto r = specialize_at(f2, mpq_class(-43, 6), 2);
    verify_record(r, 2);
    CHECK(r.status == Status::verified);
    CHECK(r.verified_rank == 5);  // [2,2,2,4,8]
    auto lsw = catalog_curve("lsw-genus4");
    auto s = specialize_at(lsw, 1, 3);
    classgroup::StructureCache cache;
    verify_record(s, 3, &cache);
    CHECK(s.verified_rank.has_value());
    CHECK(cache.size() == 1);
}

TEST_CASE("parse_sign") {
    CHECK(parse_sign("neg") == Sign::negative);
    CHECK(parse_sign("-") == Sign::negative);
    CHECK(parse_sign("pos") == Sign::positive);
    CHECK_THROWS_AS(parse_sign("zero"), usage_error);
}

}  // TEST_SUITE
