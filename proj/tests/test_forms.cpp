#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"
#include "quadrank/forms.hpp"
#include "quadrank/poly.hpp"

#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

using namespace quadrank;
using namespace quadrank::forms;

namespace {

std::vector<mpz_class> Z(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

// Durand-Kerner iteration on the monic normalization; roots only need
// to be accurate to ~1e-9 for the comparisons below.
std::vector<std::complex<double>> numeric_roots(const Polynomial& f) {
    const int n = f.degree();
    std::vector<std::complex<double>> c(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = mpq_class(f.coeff(static_cast<std::size_t>(i)) / f.leading()).get_d();
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 0;
        for (int i = n; i >= 0; --i) acc = acc * z + c[static_cast<std::size_t>(i)];
        return acc;
    };
    double radius = 1;
    for (int i = 0; i < n; ++i) radius = std::max(radius, 1 + std::abs(c[static_cast<std::size_t>(i)]));
    std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::polar(radius * 0.9, 0.4 + 2 * M_PI * i / n);
    for (int it = 0; it < 5000; ++it) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> den = 1;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
            auto step = eval(z[static_cast<std::size_t>(i)]) / den;
            z[static_cast<std::size_t>(i)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15 * radius) break;
    }
    return z;
}

// Greedy matching of two root multisets; returns the worst relative error.
double match_error(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0;
    for (auto x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](auto p, auto q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
        b.erase(it);
    }
    return worst;
}

mpq_class R_value(const SquareCertificate& R, const mpq_class& x, const mpq_class& y) {
    mpq_class l = mpq_class(R.lx) * x + mpq_class(R.ly) * y;
    mpq_class v = R.scale;
    for (int i = 0; i < -R.exponent; ++i) v /= l;
    return v;
}

}  // namespace

TEST_SUITE("forms") {

TEST_CASE("polynomial arithmetic and parsing") {
    auto f = parse_polynomial("36, -24, 1, 1");
    CHECK(f.degree() == 3);
    CHECK(f(mpq_class(3)) == 0);
    CHECK(f(mpq_class(-6)) == 0);
    CHECK(f.derivative() == Polynomial{-24, 2, 3});
    CHECK(parse_polynomial("1/2, 0, 3") == Polynomial(std::vector<mpq_class>{mpq_class(1, 2), 0, 3}));
    CHECK_THROWS_AS(parse_polynomial("1,,2"), usage_error);
    CHECK_THROWS_AS(parse_polynomial("x"), usage_error);
    auto [q, r] = divmod(Polynomial{-1, 0, 1}, Polynomial{-1, 1});
    CHECK(q == Polynomial{1, 1});
    CHECK(r.is_zero());
    CHECK(gcd(Polynomial{-1, 0, 1}, Polynomial{1, 2, 1}) == Polynomial{1, 1});
    CHECK(f.taylor_shift(1)(0) == f(1));
}

TEST_CASE("squarefree test and discriminant") {
    CHECK(is_squarefree(Polynomial{-2, 0, 1}));
    CHECK_FALSE(is_squarefree(Polynomial{0, 0, 0, 1}));
    CHECK_FALSE(is_squarefree(Polynomial{1, 2, 1}));
    CHECK(discriminant(Polynomial{-2, 0, 1}) == 8);
    // (w-3)(w+6)(w-2): product of squared root differences 9^2 * 1^2 * 8^2
    CHECK(discriminant(Polynomial{36, -24, 1, 1}) == 5184);
    CHECK(discriminant(Polynomial{1, 2, 1}) == 0);
}

TEST_CASE("Sturm root counts agree with numeric roots") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> coef(-9, 9);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<mpq_class> c(6);
        for (auto& x : c) x = coef(rng);
        c[5] = 1;
        Polynomial f(c);
        if (!is_squarefree(f)) continue;
        int numeric = 0;
        for (auto z : numeric_roots(f))
            if (std::abs(z.imag()) < 1e-7 && z.real() > -3 && z.real() < 2) ++numeric;
        CHECK(SturmSequence(f).roots_in_open(-3, 2) == numeric);
    }
    CHECK(constant_sign_on(Polynomial{36, -24, 1, 1}, mpq_class(19, 6), mpq_class(31, 6)) == 1);
    CHECK(constant_sign_on(Polynomial{36, -24, 1, 1}, mpq_class(13, 6), mpq_class(25, 6)) == 0);
}

TEST_CASE("evaluate_form: documented values") {
    BinaryForm F(Z({1, 0, 0, 1, 0}));  // X^3 Y + Y^4
    CHECK(evaluate_form(F, 1, 1) == 2);
    CHECK(evaluate_form(F, 2, 1) == 9);
    CHECK(evaluate_form(F, 2, 2) == 32);
}

TEST_CASE("evaluate_form: Horner in X and in Y agree") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> c(-1000, 1000), v(-100000, 100000);
    for (int i = 0; i < 10000; ++i) {
        std::vector<mpz_class> co(static_cast<std::size_t>(1 + i % 7));
        for (auto& x : co) x = c(rng);
        BinaryForm F(co);
        mpz_class a = v(rng), b = v(rng);
        CHECK(F.evaluate(a, b) == F.evaluate_horner_y(a, b));
    }
}

TEST_CASE("homogenize_split: documented values") {
    auto s1 = homogenize_split(Polynomial{-2, 0, 1}, MobiusMap::identity());
    CHECK(s1.F == BinaryForm(Z({-2, 0, 1})));
    CHECK(s1.R.scale == 1);
    CHECK(s1.R.lx == 0);
    CHECK(s1.R.ly == 1);
    CHECK(s1.R.exponent == -1);

    auto s2 = homogenize_split(Polynomial{1, 0, 0, 1}, MobiusMap::identity());
    CHECK(s2.F == BinaryForm(Z({1, 0, 0, 1, 0})));
    CHECK(s2.R.exponent == -2);
    CHECK(s2.R.lx == 0);

    // tau(u) = (1 - u)/(1 + u): F = 2Y(3X^2 + Y^2)(X + Y), R = (X + Y)^-2
    auto s3 = homogenize_split(Polynomial{1, 0, 0, 1}, MobiusMap{-1, 1, 1, 1});
    CHECK(s3.F == BinaryForm(Z({2, 2, 6, 6, 0})));
    CHECK(s3.R.scale == 1);
    CHECK(s3.R.lx == 1);
    CHECK(s3.R.ly == 1);
    CHECK(s3.R.exponent == -2);
    CHECK(s3.F.content() == 2);
}

TEST_CASE("homogenize_split: errors") {
    CHECK_THROWS_AS(homogenize_split(Polynomial{5}, MobiusMap::identity()), precondition_error);
    CHECK_THROWS_AS(homogenize_split(Polynomial{0, 0, 1}, MobiusMap::identity()), precondition_error);
    CHECK_THROWS_AS(homogenize_split(Polynomial{-2, 0, 1}, MobiusMap{1, 2, 2, 4}), precondition_error);
}

TEST_CASE("homogenize_split: F R^2 = f o tau on random inputs") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<long> c(-20, 20), m(-6, 6), pt(-50, 50);
    int done = 0;
    while (done < 1000) {
        int deg = 1 + static_cast<int>(rng() % 8);
        std::vector<mpq_class> co(static_cast<std::size_t>(deg) + 1);
        for (auto& x : co) x = mpq_class(c(rng), 1 + rng() % 4);
        if (co.back() == 0) co.back() = 1;
        for (auto& x : co) x.canonicalize();
        Polynomial f(co);
        if (!is_squarefree(f)) continue;
        MobiusMap tau{m(rng), m(rng), m(rng), m(rng)};
        if (tau.determinant() == 0) continue;
        auto s = homogenize_split(f, tau);
        CHECK(s.F.degree() % 2 == 0);
        CHECK(s.F.degree() >= 2);
        CHECK(s.F.is_squarefree());
        CHECK(arith::is_kfree(s.F.content(), 2));
        int points = 0;
        for (int tries = 0; points < 20 && tries < 200; ++tries) {
            mpz_class x = pt(rng), y = pt(rng);
            if (y == 0) continue;
            mpq_class den = mpq_class(tau.c) * x + mpq_class(tau.d) * y;
            if (den == 0) continue;
            mpq_class t = (mpq_class(tau.a) * x + mpq_class(tau.b) * y) / den;
            mpq_class R = R_value(s.R, x, y);
            CHECK(mpq_class(s.F.evaluate(x, y)) * R * R == f(t));
            ++points;
        }
        ++done;
    }
}

TEST_CASE("Mobius maps") {
    MobiusMap psi{-11, 1, 11, 1};
    auto tau = psi.inverse();
    CHECK(psi.compose(tau).same_map(MobiusMap::identity()));
    CHECK(tau.compose(psi).same_map(MobiusMap::identity()));
    auto v = psi.apply(mpq_class(1, 22));
    REQUIRE(v);
    CHECK(*tau.apply(*v) == mpq_class(1, 22));
    CHECK_FALSE(psi.apply(mpq_class(-1, 11)).has_value());
}

TEST_CASE("odd_model: documented values") {
    auto m = odd_model(Polynomial{4, 0, -5, 0, 1}, 1);
    CHECK(m.h == Polynomial{36, -24, 1, 1});
    CHECK(m.genus == 1);
    CHECK(m.verify());
    // Degree-2 input: lead = f'(1) = 2, the other root -1 maps to 2/(-1 - 1) = -1.
    auto lin = odd_model(Polynomial{-1, 0, 1}, 1);
    CHECK(lin.h == Polynomial{1, 1});
    CHECK_THROWS_AS(odd_model(Polynomial{4, 0, -5, 0, 1}, 5), precondition_error);
    CHECK_THROWS_AS(odd_model(Polynomial{1, -2, 1}, 1), precondition_error);
}

TEST_CASE("odd_model: roots of h are lambda^2 lead / (s - r)") {
    struct Case {
        Polynomial f;
        mpq_class r;
    };
    std::vector<Case> cases{
        {Polynomial{4, 0, -5, 0, 1}, 1},
        {Polynomial{4, 0, 0, -5, 0, 0, 1}, 1},
        {Polynomial(std::vector<mpq_class>{mpq_class(1, 4), 0, mpq_class(-5, 4), 0, 1}), 1},
        {Polynomial(std::vector<mpq_class>{mpq_class(9, 4), 0, 0, mpq_class(-13, 4), 0, 0, 1}), 1},
        {Polynomial{-6, 11, -6, 1} * Polynomial{1, 3}, 1},
        {Polynomial{2, -3, 1} * Polynomial{1, 1, 1}, 2},
    };
    for (auto& cs : cases) {
        if (cs.f.degree() % 2) continue;
        auto m = odd_model(cs.f, cs.r);
        CHECK(m.verify());
        CHECK(m.h.leading() == 1);
        CHECK(m.h.has_integer_coefficients());
        std::vector<std::complex<double>> expected;
        const double k = mpq_class(mpq_class(m.lambda * m.lambda) * m.lead).get_d();
        for (auto s : numeric_roots(cs.f)) {
            if (std::abs(s - std::complex<double>(cs.r.get_d(), 0)) < 1e-7) continue;
            expected.push_back(k / (s - cs.r.get_d()));
        }
        CHECK(match_error(numeric_roots(m.h), expected) < 1e-9);
        for (long j = 2; j < 12; ++j) {
            mpq_class x = cs.r + mpq_class(1, j);
            if (cs.f(x) == 0) continue;
            CHECK(m.h(m.to_model(x)) == m.square_factor(x) * cs.f(x));
            CHECK(m.from_model(m.to_model(x)) == x);
        }
    }
}

}  // TEST_SUITE
