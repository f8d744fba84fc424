#pragma once

// Simplex geometry: the canonical orthogonal-corner domain, membership
// predicates, exact volume formulas, and the triangular-view adapters shared
// by the maps and the simulator.
//
// Conventions. The canonical domain of simplex_spec{m, n} is
//   { x in Z^m : x_i >= 0, sum x_i <= n }.
// The simulated data domains are triangular views of it:
//   2D  T(M)  = { 0 <= x <= y <= M-1 },        cells = simplex_volume(M, 2)
//   3D  T3(M) = { 0 <= x <= y <= M-1-z },      cells = simplex_volume(M, 3)
// related by the affine adapter (x, y[, z]) -> (x, y-x[, z]) onto
// simplex_spec{m, M-1}. Maps that target the strictly-lower-triangular region
// { x < y <= n-1 } reach T(n-1) via y -> y-1.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "bits.hpp"
#include "rational.hpp"

namespace simplexmap {

enum class orientation { origin_orthogonal_corner };

struct simplex_spec {
    int m = 2;
    i64 n = 1; // membership bound: sum of components <= n
    orientation orient = orientation::origin_orthogonal_corner;

    simplex_spec() = default;
    simplex_spec(int m_, i64 n_) : m(m_), n(n_) {
        if (m < 1) throw std::invalid_argument("simplex_spec: m must be >= 1");
        if (n < 0) throw std::invalid_argument("simplex_spec: n must be >= 0");
    }
};

struct data_coord {
    i64 x = 0, y = 0, z = 0;
    bool operator==(const data_coord&) const = default;
};

using block_coord = data_coord;

inline bool simplex_contains(const simplex_spec& spec, std::span<const i64> x) {
    if (int(x.size()) != spec.m)
        throw std::invalid_argument("simplex_contains: dimension mismatch");
    i64 sum = 0;
    for (i64 c : x) {
        if (c < 0) return false;
        sum += c;
    }
    return sum <= spec.n;
}

inline bool simplex_contains(const simplex_spec& spec, std::initializer_list<i64> x) {
    return simplex_contains(spec, std::span<const i64>(x.begin(), x.size()));
}

// Triangular-view membership, T(M) and T3(M) as defined above.
inline bool tri_contains(i64 side, i64 x, i64 y) {
    return 0 <= x && x <= y && y <= side - 1;
}

inline bool tet_contains(i64 side, i64 x, i64 y, i64 z) {
    return 0 <= x && x <= y && z >= 0 && y <= side - 1 - z;
}

// Adapter from the triangular views onto the canonical orthogonal corner.
inline std::array<i64, 2> tri_to_orthant(i64 x, i64 y) { return {x, y - x}; }
inline std::array<i64, 3> tet_to_orthant(i64 x, i64 y, i64 z) { return {x, y - x, z}; }

namespace detail {

// (acc * b) / c with a 192-bit intermediate; the division must be exact and
// the quotient must fit 128 bits, else overflow_error. Needed because the
// product of an in-range volume and its next factor can exceed 128 bits
// before the divide restores it.
inline u128 mul_div_exact(u128 acc, u64 b, u64 c) {
    u64 a0 = u64(acc), a1 = u64(acc >> 64);
    u128 p0 = u128(a0) * b;
    u128 p1 = u128(a1) * b + u64(p0 >> 64);
    u64 r0 = u64(p0);
    u64 r1 = u64(p1), r2 = u64(p1 >> 64);
    u64 q2 = r2 / c, rem = r2 % c;
    u128 t1 = (u128(rem) << 64) | r1;
    u128 q1 = t1 / c;
    rem = u64(t1 % c);
    u128 t0 = (u128(rem) << 64) | r0;
    u128 q0 = t0 / c;
    if (t0 % c != 0) throw std::logic_error("mul_div_exact: inexact division");
    if (q2 != 0 || (q1 >> 64) != 0)
        throw std::overflow_error("simplex_volume: result exceeds 128 bits");
    return (q1 << 64) | q0;
}

} // namespace detail

// C(n+m-1, m): cells of the m-dimensional simplex with side n (the
// simplicial polytopic number). Multiply-then-divide keeps every
// intermediate integral; overflow throws instead of wrapping.
// Supported envelope: n <= 2^20, m <= 8 (extreme corners of which throw).
inline u128 simplex_volume(i64 n, int m) {
    if (n < 1) throw std::invalid_argument("simplex_volume: n must be >= 1");
    if (m < 1) throw std::invalid_argument("simplex_volume: m must be >= 1");
    u128 acc = 1;
    for (int i = 1; i <= m; ++i) {
        // product of i consecutive integers is divisible by i!
        acc = detail::mul_div_exact(acc, u64(n - 1 + i), u64(i));
    }
    return acc;
}

inline u128 factorial_u128(int m) {
    if (m < 0) throw std::invalid_argument("factorial: m must be >= 0");
    u128 acc = 1;
    for (int i = 2; i <= m; ++i) acc = checked_mul(acc, u128(i));
    return acc;
}

// m! - 1: the asymptotic fraction of a bounding box lying outside the
// m-simplex it encloses.
inline rational bb_waste_fraction(int m) {
    if (m < 1) throw std::invalid_argument("bb_waste_fraction: m must be >= 1");
    return rational::from_u128(factorial_u128(m)) - rational(1);
}

// Cell counts of the triangular views.
inline u128 tri_cells(i64 side) { return simplex_volume(side, 2); }
inline u128 tet_cells(i64 side) { return simplex_volume(side, 3); }

// Dense O(1) linearization of the triangular views: row-prefix offsets in
// 2D, tetrahedral layer prefixes in 3D. Indices cover exactly the members.
inline u64 tri_linear_index(i64 x, i64 y) {
    return u64(y) * u64(y + 1) / 2 + u64(x);
}

inline u64 tet_layer_prefix(i64 side, i64 z) {
    if (z == 0) return 0;
    u128 full = tet_cells(side);
    u128 rest = z >= side ? 0 : tet_cells(side - z);
    return u64(full - rest);
}

inline u64 tet_linear_index(i64 side, i64 x, i64 y, i64 z) {
    return tet_layer_prefix(side, z) + tri_linear_index(x, y);
}

inline data_coord tri_coord_at(u64 index) {
    i64 y = i64((std::sqrt(8.0 * double(index) + 1.0) - 1.0) / 2.0);
    while (y > 0 && tri_linear_index(0, y) > index) --y;
    while (tri_linear_index(0, y + 1) <= index) ++y;
    return {i64(index - tri_linear_index(0, y)), y, 0};
}

inline data_coord tet_coord_at(i64 side, u64 index) {
    i64 z = 0;
    while (z + 1 < side && tet_layer_prefix(side, z + 1) <= index) ++z;
    data_coord c = tri_coord_at(index - tet_layer_prefix(side, z));
    c.z = z;
    return c;
}

} // namespace simplexmap
