#pragma once

// Univariate polynomials with exact rational coefficients.

#include <gmpxx.h>

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace quadrank::forms {

class Polynomial {
public:
    Polynomial() = default;
    /// Coefficients constant term first; trailing zeros are dropped.
    explicit Polynomial(std::vector<mpq_class> coefficients);
    Polynomial(std::initializer_list<long> coefficients);

    static Polynomial monomial(const mpq_class& c, std::size_t degree);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }

    const std::vector<mpq_class>& coefficients() const { return coeffs_; }
    mpq_class coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : mpq_class(0); }
    const mpq_class& leading() const;

    mpq_class operator()(const mpq_class& x) const;

    Polynomial derivative() const;
    Polynomial monic() const;
    bool has_integer_coefficients() const;
    /// f(x + shift)
    Polynomial taylor_shift(const mpq_class& shift) const;
    /// f(scale * x)
    Polynomial scale_variable(const mpq_class& scale) const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const mpq_class& s, const Polynomial& a);
    bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

    std::string to_string(const std::string& var = "x") const;

private:
    void trim();
    std::vector<mpq_class> coeffs_;
};

/// Quotient and remainder; divisor must be nonzero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);

/// Monic gcd (zero if both inputs are zero).
Polynomial gcd(Polynomial a, Polynomial b);

/// Exact test: gcd(f, f') is constant. Constants count as squarefree.
bool is_squarefree(const Polynomial& f);

mpq_class resultant(const Polynomial& a, const Polynomial& b);
mpq_class discriminant(const Polynomial& f);

/// Parses "c0, c1, ..., cn" (constant first, entries integers or "p/q").
Polynomial parse_polynomial(const std::string& text);
std::string format_coefficients(const Polynomial& f);

/// Sturm chain of a squarefree polynomial.
class SturmSequence {
public:
    explicit SturmSequence(const Polynomial& f);
    int sign_changes(const mpq_class& x) const;
    /// Distinct real roots in the open interval (lo, hi).
    int roots_in_open(const mpq_class& lo, const mpq_class& hi) const;

private:
    std::vector<Polynomial> chain_;
};

/// Sign of f on (lo, hi) when f has no root there; 0 otherwise.
int constant_sign_on(const Polynomial& f, const mpq_class& lo, const mpq_class& hi);

}  // namespace quadrank::forms
