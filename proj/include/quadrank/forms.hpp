#pragma once

// Binary forms, Mobius maps, and the two polynomial transformations the
// field factory relies on:
//
//  * homogenize_split writes f(tau(X/Y)) = F(X,Y) * R(X,Y)^2 with F a
//    squarefree integral binary form of even degree, so that for integers
//    a, b the field Q(sqrt(f(tau(a/b)))) equals Q(sqrt(F(a,b))).
//  * odd_model moves a rational root of an even-degree f to infinity and
//    rescales, giving a monic integral model y^2 = h(w) of odd degree.

#include "quadrank/poly.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace quadrank::forms {

/// F(X, Y) = sum_i coeffs[i] X^i Y^(r-i).
class BinaryForm {
public:
    BinaryForm() = default;
    explicit BinaryForm(std::vector<mpz_class> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<mpz_class>& coefficients() const { return coeffs_; }

    /// Horner in X.
    mpz_class evaluate(const mpz_class& a, const mpz_class& b) const;
    /// Same value, Horner in Y.
    mpz_class evaluate_horner_y(const mpz_class& a, const mpz_class& b) const;

    /// F(X, 1); degree may drop when Y | F.
    Polynomial dehomogenize() const;
    /// Multiplicity of Y as a factor of F.
    int y_multiplicity() const;

    /// No repeated non-constant factor over Q.
    bool is_squarefree() const;
    /// Divisible over Q by G^k for some non-constant form G.
    bool has_kth_power_factor(unsigned k) const;
    /// F = c * L^r for a linear form L (degree 1 forms count).
    bool is_power_of_linear() const;

    /// gcd of the coefficients (nonnegative).
    mpz_class content() const;

    bool operator==(const BinaryForm&) const = default;
    std::string to_string() const;

private:
    std::vector<mpz_class> coeffs_;
};

mpz_class evaluate_form(const BinaryForm& F, const mpz_class& a, const mpz_class& b);

/// t -> (a t + b) / (c t + d).
struct MobiusMap {
    mpz_class a = 1, b = 0, c = 0, d = 1;

    static MobiusMap identity() { return {}; }
    mpz_class determinant() const { return a * d - b * c; }
    bool is_identity() const;
    /// Adjugate; equals the inverse up to the scalar det.
    MobiusMap inverse() const;
    /// (this o other)(t) = this(other(t)).
    MobiusMap compose(const MobiusMap& other) const;
    /// Equality as Mobius transformations (matrices up to a nonzero scalar).
    bool same_map(const MobiusMap& other) const;
    /// Image of a rational; nullopt at a pole.
    std::optional<mpq_class> apply(const mpq_class& t) const;
};

/// R(X, Y) = scale * (lx X + ly Y)^exponent, exponent <= 0.
struct SquareCertificate {
    mpq_class scale = 1;
    mpz_class lx = 0, ly = 1;
    int exponent = 0;

    /// nullopt when the linear form vanishes at (x, y).
    std::optional<mpq_class> evaluate(const mpq_class& x, const mpq_class& y) const;
    std::string to_string() const;
};

struct HomogenizedSplit {
    BinaryForm F;
    SquareCertificate R;
};

/// Requires f squarefree and nonconstant and tau invertible. The identity
/// F * R^2 = f o tau is checked at deg F + 1 sample points before return.
HomogenizedSplit homogenize_split(const Polynomial& f, const MobiusMap& tau);

/// Certificate for y^2 = f(x)  ~  Y^2 = h(w):
///   u = 1/(x - root),  w = lambda^2 * lead * u,
///   Y = lambda^d * lead^((d-1)/2) * scale * y * u^(g+1),
/// where f has first been multiplied by scale^2 to clear denominators and
/// lead = f'(root) after that scaling. lambda clears denominators left by a
/// non-integral root (lambda = 1 for integral roots of integral f).
struct OddModel {
    Polynomial h;         // monic, integral, odd degree d = 2g + 1
    Polynomial source;    // the even-degree input f
    mpq_class root;       // rational root moved to infinity
    mpz_class scale = 1;  // f_int = scale^2 * f
    mpq_class lead;       // f_int'(root)
    mpz_class lambda = 1;
    int genus = 0;

    /// w-coordinate of the point with x-coordinate x (x != root).
    mpq_class to_model(const mpq_class& x) const;
    /// x-coordinate of the point with w-coordinate w (w != 0).
    mpq_class from_model(const mpq_class& w) const;
    /// h(to_model(x)) / f(x), always a nonzero rational square.
    mpq_class square_factor(const mpq_class& x) const;
    /// Re-derives h from the recorded substitution chain and compares.
    bool verify() const;
};

OddModel odd_model(const Polynomial& f, const mpq_class& root);

}  // namespace quadrank::forms
