#include "quadrank/lattice.hpp"

#include "quadrank/errors.hpp"

#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>

namespace quadrank::lattice {

std::int64_t Vec2::max_norm() const { return std::max(std::llabs(r), std::llabs(s)); }

std::int64_t det(Vec2 a, Vec2 b) { return a.r * b.s - a.s * b.r; }

std::int64_t Lattice2::determinant() const { return std::llabs(det(g0, g1)); }

bool Lattice2::contains(Vec2 v) const {
    // Cramer: v = x g0 + y g1 with x, y integral.
    std::int64_t D = det(g0, g1);
    if (D == 0) return false;
    return det(v, g1) % D == 0 && det(g0, v) % D == 0;
}

std::int64_t Basis2::bound() const { return std::max(v0.max_norm(), v1.max_norm()); }

namespace {

std::int64_t norm2(Vec2 v) { return v.r * v.r + v.s * v.s; }

// Preference order among vectors of equal max-norm.
auto rank_key(Vec2 v) { return std::make_tuple(v.max_norm(), norm2(v), -v.r, -v.s); }

// Lagrange-Gauss reduction in the Euclidean norm.
void gauss_reduce(Vec2& a, Vec2& b) {
    if (norm2(a) > norm2(b)) std::swap(a, b);
    while (true) {
        // b -= round(<a,b>/<a,a>) a
        std::int64_t dot = a.r * b.r + a.s * b.s;
        std::int64_t n = norm2(a);
        std::int64_t q = (2 * dot + n) / (2 * n);
        if (2 * dot + n < 0 && (2 * dot + n) % (2 * n) != 0) --q;
        b = b - q * a;
        if (norm2(b) >= norm2(a)) break;
        std::swap(a, b);
    }
}

// Visits every lattice vector of max-norm <= R (coefficient box from Cramer).
template <class Fn>
void for_each_vector(Vec2 a, Vec2 b, std::int64_t R, Fn&& fn) {
    std::int64_t D = std::llabs(det(a, b));
    std::int64_t I = R * (std::llabs(b.r) + std::llabs(b.s)) / D;
    std::int64_t J = R * (std::llabs(a.r) + std::llabs(a.s)) / D;
    for (std::int64_t i = -I; i <= I; ++i) {
        for (std::int64_t j = -J; j <= J; ++j) {
            Vec2 v = i * a + j * b;
            if ((v.r != 0 || v.s != 0) && v.max_norm() <= R) fn(v);
        }
    }
}

}  // namespace

Basis2 minimal_basis(const Lattice2& L) {
    const std::int64_t D = L.determinant();
    require(D != 0, "minimal_basis: generators must be linearly independent");
    Vec2 a = L.g0, b = L.g1;
    gauss_reduce(a, b);

    std::optional<Vec2> best;
    for_each_vector(a, b, a.max_norm(), [&](Vec2 v) {
        if (!best || rank_key(v) < rank_key(*best)) best = v;
    });
    const Vec2 v0 = *best;

    // Coefficients of v0 in (a, b); a shortest vector is primitive, so
    // x y' - y x' = 1 has a solution giving one explicit completion.
    const std::int64_t Dab = det(a, b);
    const std::int64_t x = det(v0, b) / Dab, y = det(a, v0) / Dab;
    std::int64_t u = 1, w = 0, g = x, g1 = y, u1 = 0, w1 = 1;
    while (g1 != 0) {
        std::int64_t q = g / g1;
        std::tie(g, g1) = std::make_tuple(g1, g - q * g1);
        std::tie(u, u1) = std::make_tuple(u1, u - q * u1);
        std::tie(w, w1) = std::make_tuple(w1, w - q * w1);
    }
    if (std::llabs(g) != 1) throw std::logic_error("minimal_basis: shortest vector is not primitive");
    const Vec2 w0 = (-w * g) * a + (u * g) * b;
    std::int64_t radius = w0.max_norm();
    const std::int64_t k0 = -(w0.r * v0.r + w0.s * v0.s) / norm2(v0);
    for (std::int64_t k = k0 - 3; k <= k0 + 3; ++k) radius = std::min(radius, (w0 + k * v0).max_norm());

    std::optional<Vec2> best1;
    for_each_vector(a, b, radius, [&](Vec2 v) {
        if (std::llabs(det(v0, v)) != D) return;
        if (!best1 || rank_key(v) < rank_key(*best1)) best1 = v;
    });
    if (!best1) throw std::logic_error("minimal_basis: no completion found");
    return Basis2{v0, *best1};
}

namespace {

bool same_sign_or_axis(Vec2 v) { return v.r == 0 || v.s == 0 || (v.r > 0) == (v.s > 0); }

Vec2 swapped(Vec2 v) { return {v.s, v.r}; }

// Case where `fixed` has coordinates of one sign (or a zero coordinate).
// Returns the replacement for `other`; `fixed` comes back sign-normalized.
Vec2 positivize_against(Vec2& fixed, Vec2 other) {
    if (fixed.r < 0 || fixed.s < 0) fixed = -fixed;
    bool swap = fixed.s > fixed.r;
    if (swap) {
        fixed = swapped(fixed);
        other = swapped(other);
    }
    // now r0 >= s0 >= 0, r0 > 0
    if (other.r < 0 || (other.r == 0 && other.s < 0)) other = -other;
    if (other.s < 0) {
        std::int64_t n = (other.r + fixed.r - 1) / fixed.r;  // ceil(r1 / r0), r1 >= 0
        other = n * fixed - other;
    }
    if (swap) {
        fixed = swapped(fixed);
        other = swapped(other);
    }
    return other;
}

}  // namespace

Basis2 positivize(const Basis2& B) {
    require(B.determinant() != 0, "positivize: input is not a basis");
    Basis2 out = B;
    if (same_sign_or_axis(out.v0)) {
        out.v1 = positivize_against(out.v0, out.v1);
    } else if (same_sign_or_axis(out.v1)) {
        out.v0 = positivize_against(out.v1, out.v0);
    } else {
        throw precondition_error("positivize: both basis vectors have mixed signs; basis is not minimal");
    }
    if (std::llabs(out.determinant()) != std::llabs(B.determinant())) throw std::logic_error("positivize lost the lattice");
    return out;
}

std::string to_string(const Basis2& B) {
    std::ostringstream os;
    os << "((" << B.v0.r << "," << B.v0.s << "),(" << B.v1.r << "," << B.v1.s << "))";
    return os.str();
}

}  // namespace quadrank::lattice
