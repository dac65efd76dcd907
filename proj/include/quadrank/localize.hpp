#pragma once

// Places of Q and the local-condition gadget: a Mobius map psi together
// with congruence classes a = A, b = B (mod M) such that every t with
// psi(t) = a/b, a, b > 0, is epsilon-small at each place of a finite set S.

#include "quadrank/forms.hpp"

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>

namespace quadrank::localize {

struct PlaceSet {
    std::set<unsigned long> finite_primes;
    bool archimedean = false;

    bool empty() const { return finite_primes.empty() && !archimedean; }
};

/// "inf,2,3" or "" -> PlaceSet; rejects non-primes.
PlaceSet parse_places(const std::string& text);
std::string to_string(const PlaceSet& S);

/// p-adic valuation; nullopt for q = 0.
std::optional<long> ord_p(const mpq_class& q, const mpz_class& p);

/// |q|_p = p^(-ord_p q), and 0 for q = 0.
mpq_class padic_abs(const mpq_class& q, const mpz_class& p);

struct MobiusGadget {
    forms::MobiusMap psi;
    forms::MobiusMap tau;  // inverse of psi
    mpz_class M = 1, A = 1, B = 1;
    mpz_class N = 0;  // 0 when psi is the identity
    PlaceSet S;
    mpq_class epsilon = 1;
    std::map<unsigned long, unsigned long> exponents;  // p -> e_p, M = prod p^e_p

    /// |t|_v < epsilon for every v in S.
    bool satisfied_by(const mpq_class& t) const;
    /// One-line JSON audit record.
    std::string to_json() const;
};

MobiusGadget build_gadget(const PlaceSet& S, const mpq_class& epsilon);

/// t = tau(a/b); checks the congruences and the guarantee.
mpq_class pullback(const MobiusGadget& g, const mpz_class& a, const mpz_class& b);

}  // namespace quadrank::localize
