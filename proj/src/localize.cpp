#include "quadrank/localize.hpp"

#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"

#include <json.hpp>

#include <sstream>

namespace quadrank::localize {

PlaceSet parse_places(const std::string& text) {
    PlaceSet S;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
        if (item == "none") continue;
        if (item == "inf" || item == "infinity" || item == "oo") {
            S.archimedean = true;
            continue;
        }
        mpz_class p;
        if (p.set_str(item, 10) != 0 || !arith::is_prime(p) || !p.fits_ulong_p()) throw usage_error("not a prime place: " + item);
        S.finite_primes.insert(p.get_ui());
    }
    return S;
}

std::string to_string(const PlaceSet& S) {
    std::string out = S.archimedean ? "inf" : "";
    for (auto p : S.finite_primes) out += (out.empty() ? "" : ",") + std::to_string(p);
    return out;
}

std::optional<long> ord_p(const mpq_class& q, const mpz_class& p) {
    require(arith::is_prime(p), "ord_p: p must be prime");
    if (q == 0) return std::nullopt;
    mpz_class tmp;
    long num = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.get_num_mpz_t(), p.get_mpz_t()));
    long den = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.get_den_mpz_t(), p.get_mpz_t()));
    return num - den;
}

mpq_class padic_abs(const mpq_class& q, const mpz_class& p) {
    auto v = ord_p(q, p);
    if (!v) return 0;
    mpz_class pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(std::labs(*v)));
    mpq_class r = *v >= 0 ? mpq_class(1, pe) : mpq_class(pe);
    r.canonicalize();
    return r;
}

namespace {

// Least e >= floor_e with p^-(e - shift) < eps.
unsigned long least_exponent(unsigned long p, unsigned long shift, unsigned long floor_e, const mpq_class& eps) {
    unsigned long e = floor_e;
    while (true) {
        mpq_class bound = 1;
        if (e >= shift) {
            mpz_class pe;
            mpz_ui_pow_ui(pe.get_mpz_t(), p, e - shift);
            bound = mpq_class(1, pe);
        } else {
            mpz_class pe;
            mpz_ui_pow_ui(pe.get_mpz_t(), p, shift - e);
            bound = pe;
        }
        bound.canonicalize();
        if (bound < eps) return e;
        ++e;
    }
}

}  // namespace

MobiusGadget build_gadget(const PlaceSet& S, const mpq_class& epsilon) {
    require(epsilon > 0, "build_gadget: epsilon must be positive");
    MobiusGadget g;
    g.S = S;
    g.epsilon = epsilon;

    if (!S.archimedean) {
        // psi = identity, t = a/b. Small at p means p^e_p | a while b is a
        // p-adic unit, so A = 0 here (B = 1).
        if (!S.finite_primes.empty()) g.A = 0;
        for (auto p : S.finite_primes) {
            auto e = least_exponent(p, 0, 1, epsilon);
            g.exponents[p] = e;
            mpz_class pe;
            mpz_ui_pow_ui(pe.get_mpz_t(), p, e);
            g.M *= pe;
        }
        return g;
    }

    // psi(t) = (1 - N t) / (1 + N t), tau(u) = (1 - u) / (N (1 + u)),
    // so t = (b - a) / (N (a + b)) and |t| < 1/N < epsilon.
    mpz_class primes = 1;
    for (auto p : S.finite_primes) primes *= p;
    mpz_class inv = epsilon.get_den() / epsilon.get_num();  // floor(1/eps)
    g.N = inv + 1;
    while (gcd(g.N, primes) != 1) ++g.N;
    g.psi = forms::MobiusMap{-g.N, 1, g.N, 1};
    g.tau = forms::MobiusMap{-1, 1, g.N, g.N};
    for (auto p : S.finite_primes) {
        // a = b = 1 (mod p^e): ord_p(b - a) >= e, ord_p(a + b) = ord_p(2)
        // once e > ord_p(2).
        unsigned long shift = p == 2 ? 1 : 0;
        auto e = least_exponent(p, shift, shift + 1, epsilon);
        g.exponents[p] = e;
        mpz_class pe;
        mpz_ui_pow_ui(pe.get_mpz_t(), p, e);
        g.M *= pe;
    }
    return g;
}

bool MobiusGadget::satisfied_by(const mpq_class& t) const {
    if (S.archimedean && !(abs(t) < epsilon)) return false;
    for (auto p : S.finite_primes) {
        if (!(padic_abs(t, mpz_class(p)) < epsilon)) return false;
    }
    return true;
}

std::string MobiusGadget::to_json() const {
    nlohmann::ordered_json j;
    j["places"] = to_string(S);
    j["epsilon"] = epsilon.get_str();
    j["psi"] = {{psi.a.get_str(), psi.b.get_str()}, {psi.c.get_str(), psi.d.get_str()}};
    j["tau"] = {{tau.a.get_str(), tau.b.get_str()}, {tau.c.get_str(), tau.d.get_str()}};
    j["N"] = N.get_str();
    j["M"] = M.get_str();
    j["A"] = A.get_str();
    j["B"] = B.get_str();
    nlohmann::ordered_json ex = nlohmann::ordered_json::object();
    for (auto [p, e] : exponents) ex[std::to_string(p)] = e;
    j["exponents"] = ex;
    return j.dump();
}

mpq_class pullback(const MobiusGadget& g, const mpz_class& a, const mpz_class& b) {
    require(a > 0 && b > 0, "pullback: a and b must be positive");
    mpz_class ra, rb;
    mpz_fdiv_r(ra.get_mpz_t(), mpz_class(a - g.A).get_mpz_t(), g.M.get_mpz_t());
    mpz_fdiv_r(rb.get_mpz_t(), mpz_class(b - g.B).get_mpz_t(), g.M.get_mpz_t());
    require(ra == 0 && rb == 0, "pullback: (a, b) outside the residue classes (A, B) mod M");
    mpq_class ab(a, b);
    ab.canonicalize();
    auto t = g.tau.apply(ab);
    if (!t) throw domain_error("pullback: a/b is a pole of tau");
    if (!g.satisfied_by(*t)) throw std::logic_error("pullback: local guarantee violated");
    return *t;
}

}  // namespace quadrank::localize
