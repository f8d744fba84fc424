#pragma once

// Block-space maps from orthotope grids onto triangular/tetrahedral domains.
//
// Target views at map parameter n:
//   bb, rb, lambda2d          with-diagonal T(n)  / T3(n)   (side n)
//   h2d, h2d_padded,
//   h2d_trapezoid, h3d        strict { x < y <= n-1 } views of T(n-1)
// The simulator converts strict outputs via y -> y-1 (see core.hpp).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace simplexmap {

enum class map_kind { bb, rb, lambda2d, h2d, h2d_trapezoid, h2d_padded, h3d };

inline const char* map_kind_name(map_kind k) {
    switch (k) {
        case map_kind::bb: return "bb";
        case map_kind::rb: return "rb";
        case map_kind::lambda2d: return "lambda";
        case map_kind::h2d: return "h2d";
        case map_kind::h2d_trapezoid: return "trapezoid";
        case map_kind::h2d_padded: return "h2d-padded";
        case map_kind::h3d: return "h3d";
    }
    return "?";
}

// True when the map's outputs live in the strict { x < y } view.
inline bool strict_view(map_kind k) {
    return k == map_kind::h2d || k == map_kind::h2d_padded ||
           k == map_kind::h2d_trapezoid || k == map_kind::h3d;
}

struct map_outcome {
    bool is_void = false;
    data_coord target{};
    i64 level_b = 1;  // stack height level b (power of two)
    i64 index_q = 0;  // orthotope index q at level b

    static map_outcome void_block() { return {true, {}, 1, 0}; }
};

// Per-trapezoid constants of the general-n scheme. The band covers the
// strict triangle of side `band` at offset delta plus the band-wide box of
// h2 further rows, split into halves B1/B2; h1 is the last row index handled
// without the fold (so h1 + h2 = grid y extent - 1).
struct trapezoid_params {
    i64 delta_x = 0, delta_y = 0;
    i64 band = 0;        // power-of-two triangle side of this band
    i64 h1 = 0, h2 = 0;
    i64 grid_width = 0;  // G_x = band / 2
    i64 valid_side = 0;  // rows beyond this are Void (final padded band only)
    i64 ext_x = 0, ext_y = 0;

    u64 blocks() const { return u64(ext_x) * u64(ext_y); }
};

struct grid_spec {
    map_kind kind = map_kind::bb;
    int dims = 2;
    i64 n = 1;    // map parameter (see header comment for the view it selects)
    i64 rho = 1;  // block edge: rho^dims threads per block
    std::array<i64, 3> extents{1, 1, 1};
    i64 threshold = 1;  // trapezoid scheme threshold T
    std::vector<trapezoid_params> traps;

    u64 blocks() const {
        if (kind == map_kind::h2d_trapezoid) {
            u64 total = 0;
            for (const auto& t : traps) total += t.blocks();
            return total;
        }
        u64 total = 1;
        for (int a = 0; a < dims; ++a) total *= u64(extents[std::size_t(a)]);
        return total;
    }

    u64 threads() const {
        u64 per = 1;
        for (int a = 0; a < dims; ++a) per *= u64(rho);
        return blocks() * per;
    }

    // Side of the with-diagonal block domain the grid covers.
    i64 domain_side() const { return strict_view(kind) ? n - 1 : n; }
};

// ---- bounding box ----

inline grid_spec grid_bb(i64 n, int m) {
    if (m != 2 && m != 3) throw std::invalid_argument("grid_bb: m must be 2 or 3");
    if (n < 1) throw std::invalid_argument("grid_bb: n must be >= 1");
    grid_spec g;
    g.kind = map_kind::bb;
    g.dims = m;
    g.n = n;
    g.extents = {n, n, m == 3 ? n : 1};
    return g;
}

inline map_outcome map_bb(block_coord omega, i64 n, int m) {
    if (m != 2 && m != 3) throw std::invalid_argument("map_bb: m must be 2 or 3");
    bool in = omega.x >= 0 && omega.x < n && omega.y >= 0 && omega.y < n &&
              (m == 2 ? omega.z == 0 : omega.z >= 0 && omega.z < n);
    if (!in) throw std::invalid_argument("map_bb: omega outside the n^m grid");
    bool member = m == 2 ? tri_contains(n, omega.x, omega.y)
                         : tet_contains(n, omega.x, omega.y, omega.z);
    if (!member) return map_outcome::void_block();
    return {false, omega, 1, 0};
}

// ---- rectangular box ----

inline grid_spec grid_rb(i64 n) {
    if (n < 1) throw std::invalid_argument("grid_rb: n must be >= 1");
    grid_spec g;
    g.kind = map_kind::rb;
    g.n = n;
    g.extents = n % 2 == 0 ? std::array<i64, 3>{n / 2, n + 1, 1}
                           : std::array<i64, 3>{(n + 1) / 2, n, 1};
    return g;
}

// Fold of the rectangle onto T(n) = { 0 <= x <= y <= n-1 }. Even n folds the
// point-reflected upper part and sends the extra w_y = n column onto the
// main diagonal's tail; odd n needs no extra column.
inline data_coord map_rb_2d(block_coord omega, i64 n) {
    auto ext = grid_rb(n).extents;
    if (omega.x < 0 || omega.x >= ext[0] || omega.y < 0 || omega.y >= ext[1])
        throw std::invalid_argument("map_rb_2d: omega outside the rectangle");
    if (n % 2 == 0 && omega.y == n) return {n / 2, n / 2 + omega.x, 0};
    if (omega.x <= omega.y) return {omega.x, omega.y, 0};
    return {n - omega.x, n - 1 - omega.y, 0};
}

// ---- lambda (linear enumeration) ----

inline grid_spec grid_lambda(i64 n) {
    if (n < 1) throw std::invalid_argument("grid_lambda: n must be >= 1");
    grid_spec g;
    g.kind = map_kind::lambda2d;
    g.n = n;
    g.extents = {i64(tri_cells(n)), 1, 1};
    return g;
}

// Row from the quadratic root, then an integer fix-up so the result is exact
// for every index below 2^53 regardless of the FP rounding direction
// (tri_coord_at carries the formula).
inline data_coord map_lambda_2d(u64 index, i64 n) {
    if (index >= u64(tri_cells(n)))
        throw std::invalid_argument("map_lambda_2d: index out of range");
    return tri_coord_at(index);
}

// Faithful single-precision variant: no fix-up, so the FP32 rounding cliff
// is observable. Diagnostic only.
inline data_coord map_lambda_2d_fp32(u64 index) {
    float f = (std::sqrt(8.0f * float(index) + 1.0f) - 1.0f) / 2.0f;
    i64 y = i64(f);
    return {i64(i128(index) - i128(y) * (y + 1) / 2), y, 0};
}

struct lambda_fp32_onset {
    bool found = false;
    u64 index = 0;  // first linear index with a wrong coordinate
    i64 side = 0;   // smallest domain side containing that index
};

inline lambda_fp32_onset lambda_fp32_failure_onset(u64 max_index) {
    for (u64 i = 0; i < max_index; ++i) {
        data_coord exact = map_lambda_2d(i, i64{1} << 30);
        data_coord fp32 = map_lambda_2d_fp32(i);
        if (exact.x != fp32.x || exact.y != fp32.y)
            return {true, i, exact.y + 1};
    }
    return {};
}

// ---- H, 2-simplex, n a power of two ----

inline grid_spec grid_h2d(i64 n) {
    if (n < 2 || !is_pow2(u64(n)))
        throw std::invalid_argument(
            "grid_h2d: n must be a power of two >= 2; use decompose_trapezoids "
            "or grid_h2d_padded for general n");
    grid_spec g;
    g.kind = map_kind::h2d;
    g.n = n;
    g.extents = {n / 2, n - 1, 1};
    return g;
}

inline map_outcome map_h2d(block_coord omega) {
    if (omega.x < 0 || omega.y < 0)
        throw std::invalid_argument("map_h2d: omega components must be >= 0");
    const int lg = floor_log2(u64(omega.y) + 1);
    const i64 b = i64{1} << lg;
    const i64 q = omega.x >> lg;
    return {false, {omega.x + (q << lg), omega.y + (q << (lg + 1)) + 1, 0}, b, q};
}

// ---- H, 2-simplex, general n padded from above ----

inline grid_spec grid_h2d_padded(i64 n) {
    if (n < 2) throw std::invalid_argument("grid_h2d_padded: n must be >= 2");
    grid_spec g = grid_h2d(i64(pow2_ceil_log2(u64(n))));
    g.kind = map_kind::h2d_padded;
    g.n = n;
    return g;
}

inline map_outcome map_h2d_padded(block_coord omega, i64 n) {
    map_outcome out = map_h2d(omega);
    if (out.target.y > n - 1) return map_outcome::void_block();
    return out;
}

// ---- H, 2-simplex, general n via concurrent trapezoids ----

// Greedy peel of power-of-two bands from the left: each band covers its own
// strict triangle plus the box spanning every remaining row; the leftover is
// the same problem at side r - band. The last remainder is padded from above
// once the padding drops below T.
inline std::vector<trapezoid_params> decompose_trapezoids(i64 n, i64 T) {
    if (n < 2) throw std::invalid_argument("decompose_trapezoids: n must be >= 2");
    if (T < 1) throw std::invalid_argument("decompose_trapezoids: T must be >= 1");
    std::vector<trapezoid_params> traps;
    i64 c = 0, r = n;
    while (r >= 2) {
        i64 pad = i64(pow2_ceil_log2(u64(r))) - r;
        trapezoid_params t;
        t.delta_x = t.delta_y = c;
        if (pad < T) {
            t.band = i64(pow2_ceil_log2(u64(r)));
            t.h2 = 0;
            t.valid_side = r;
        } else {
            t.band = i64(pow2_floor_log2(u64(r)));
            t.h2 = r - t.band;
            t.valid_side = t.band;
        }
        t.h1 = t.band + t.h2 - 2;
        t.grid_width = t.band / 2;
        t.ext_x = t.grid_width;
        t.ext_y = t.band - 1 + 2 * t.h2;
        traps.push_back(t);
        if (pad < T) break;
        c += t.band;
        r -= t.band;
    }
    return traps;
}

inline grid_spec grid_trapezoids(i64 n, i64 T) {
    grid_spec g;
    g.kind = map_kind::h2d_trapezoid;
    g.n = n;
    g.threshold = T;
    g.traps = decompose_trapezoids(n, T);
    return g;
}

inline map_outcome map_h2d_trapezoid(block_coord omega, const trapezoid_params& p) {
    if (omega.x < 0 || omega.x >= p.ext_x || omega.y < 0 || omega.y >= p.ext_y)
        throw std::invalid_argument("map_h2d_trapezoid: omega outside the trapezoid grid");
    const int lg = floor_log2(u64(omega.y) + 1);
    i64 b = i64{1} << lg;
    i64 q = omega.x >> lg;
    i64 k = omega.y > p.h1 ? 1 : 0;  // sign bit of (h1 - w_y)
    i64 x = p.delta_x + omega.x + (q << lg) + k * p.grid_width;
    i64 y = p.delta_y + omega.y - k * p.h2 + (q << (lg + 1)) + 1;
    if (p.h2 == 0 && y - p.delta_y > p.valid_side - 1) return map_outcome::void_block();
    return {false, {x, y, 0}, b, q};
}

// ---- H, 3-simplex, n a power of two ----

inline grid_spec grid_h3d(i64 n) {
    if (n < 4 || !is_pow2(u64(n)))
        throw std::invalid_argument("grid_h3d: n must be a power of two >= 4 "
                                    "(general-n 3D decomposition is unsupported)");
    grid_spec g;
    g.kind = map_kind::h3d;
    g.dims = 3;
    g.n = n;
    g.extents = {n / 2, n / 2, (3 * (n - 1) + 3) / 4};  // ceil(3(n-1)/4)
    return g;
}

// Strict view { 0 <= x < y <= n-1-z }. The lower half of the grid's z range
// is the major half-side cube displaced below the target's waist; upper z
// hosts the stacked power-of-two slab levels. Images whose depth passes the
// anchored cube fold back: the cube's facet layer lands on the wall plane,
// deeper images transpose into the region left of the wall.
inline map_outcome map_h3d(block_coord omega, i64 n) {
    if (n < 4 || !is_pow2(u64(n)))
        throw std::invalid_argument("map_h3d: n must be a power of two >= 4");
    if (omega.x < 0 || omega.x >= n / 2 || omega.y < 0 || omega.y >= n / 2 ||
        omega.z < 0 || omega.z >= (3 * (n - 1) + 3) / 4)
        throw std::invalid_argument("map_h3d: omega outside the grid");
    const i64 nh = n / 2;
    i64 s, a, q, lx, ly, lz, anchor;
    if (omega.z < nh) {  // displaced major cube
        s = nh;
        a = 0;
        q = 0;
        lx = omega.x;
        ly = omega.y;
        lz = omega.z;
        anchor = 1;
    } else {
        const int lg = floor_log2(u64(omega.y) + 1);
        s = i64{1} << lg;
        if (s > n / 4) return map_outcome::void_block();       // no slab at top level
        if (omega.z - nh >= s) return map_outcome::void_block();  // above this slab
        q = omega.x >> lg;
        a = (q << (lg + 1));
        lx = omega.x - (q << lg);
        ly = omega.y - (s - 1);
        lz = omega.z - nh;
        anchor = 0;
    }
    i64 x = a + lx;
    i64 y = a + s + anchor + ly;
    i64 z = lz;
    i64 depth = (y - a) + z;
    if (depth <= 2 * s - 1) return {false, {x, y, z}, s, q};
    if (anchor == 1 && depth == 2 * s) return {false, {x, a + s, z}, s, q};  // wall plane
    return {false, {a + ly + lz - s, a + lz, s - lz + lx}, s, q};
}

} // namespace simplexmap
