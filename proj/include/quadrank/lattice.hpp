#pragma once

// Rank-2 integer lattices under the max-norm, and the positivization step
// that turns a max-norm-minimal basis into one with nonnegative entries at
// the cost of at most a factor three in the max-norm.

#include <cstdint>
#include <string>

namespace quadrank::lattice {

struct Vec2 {
    std::int64_t r = 0;
    std::int64_t s = 0;

    std::int64_t max_norm() const;
    Vec2 operator-() const { return {-r, -s}; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.r + b.r, a.s + b.s}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.r - b.r, a.s - b.s}; }
    friend Vec2 operator*(std::int64_t k, Vec2 a) { return {k * a.r, k * a.s}; }
    bool operator==(const Vec2&) const = default;
};

std::int64_t det(Vec2 a, Vec2 b);

struct Lattice2 {
    Vec2 g0, g1;

    std::int64_t determinant() const;  // |det|
    bool contains(Vec2 v) const;
};

struct Basis2 {
    Vec2 v0, v1;

    /// max(|r0|, |s0|, |r1|, |s1|)
    std::int64_t bound() const;
    std::int64_t determinant() const { return det(v0, v1); }
};

/// v0 has minimal max-norm among nonzero lattice vectors; v1 has minimal
/// max-norm among vectors completing v0 to a basis. Ties: smaller squared
/// Euclidean length first, then larger r, then larger s.
Basis2 minimal_basis(const Lattice2& L);

/// Nonnegative basis of the same lattice with every entry <= 3 * B.bound().
/// Throws precondition_error when B is degenerate, or when both vectors
/// have strictly mixed signs (a configuration a minimal basis never has).
Basis2 positivize(const Basis2& B);

std::string to_string(const Basis2& B);

}  // namespace quadrank::lattice
