#pragma once

// Virtual-grid execution engine: walks every block of a grid_spec, applies
// its map, Void-filters, expands rho^d threads per block, filters threads by
// cell membership, and runs the kernel body per useful thread with exact
// work accounting.
//
// The cell domain of a launch is the with-diagonal view of side
// S = grid.domain_side() * rho; a thread of block d at local offset l handles
// cell d * rho + l. Threads whose cell falls outside the domain are slack:
// launched, never executed.

#include <array>
#include <cmath>
#include <vector>

#include "maps.hpp"

namespace simplexmap {

enum class kernel_kind { map, accum, edm, ca_life };
enum class ca_boundary { periodic2d, dead3d };

inline const char* kernel_kind_name(kernel_kind k) {
    switch (k) {
        case kernel_kind::map: return "map";
        case kernel_kind::accum: return "accum";
        case kernel_kind::edm: return "edm";
        case kernel_kind::ca_life: return "ca";
    }
    return "?";
}

// Dense per-cell storage over a triangular/tetrahedral domain. The checked
// accessors reject non-member coordinates; kernels address cells through
// the linearizers after membership filtering.
template <class T>
struct simplex_grid_state {
    int m = 2;
    i64 side = 1;
    std::vector<T> cells;

    simplex_grid_state(int m_, i64 side_)
        : m(m_), side(side_),
          cells(std::size_t(m_ == 2 ? tri_cells(side_) : tet_cells(side_)), T{}) {
        if (m != 2 && m != 3)
            throw std::invalid_argument("simplex_grid_state: m must be 2 or 3");
        if (side < 1) throw std::invalid_argument("simplex_grid_state: side must be >= 1");
    }

    u64 index(i64 x, i64 y) const {
        if (m != 2 || !tri_contains(side, x, y))
            throw std::invalid_argument("simplex_grid_state: coordinate outside domain");
        return tri_linear_index(x, y);
    }

    u64 index(i64 x, i64 y, i64 z) const {
        if (m != 3 || !tet_contains(side, x, y, z))
            throw std::invalid_argument("simplex_grid_state: coordinate outside domain");
        return tet_linear_index(side, x, y, z);
    }

    T& at(i64 x, i64 y) { return cells[index(x, y)]; }
    const T& at(i64 x, i64 y) const { return cells[index(x, y)]; }
    T& at(i64 x, i64 y, i64 z) { return cells[index(x, y, z)]; }
    const T& at(i64 x, i64 y, i64 z) const { return cells[index(x, y, z)]; }

    u64 hash() const {
        u64 h = fnv1a_seed;
        h = fnv1a_append_u64(h, u64(m));
        h = fnv1a_append_u64(h, u64(side));
        return fnv1a_append(h, cells.data(), cells.size() * sizeof(T));
    }
};

struct sim_report {
    int m = 2;
    i64 cell_side = 0;
    u64 blocks_launched = 0;
    u64 blocks_void = 0;
    u64 threads_launched = 0;
    u64 threads_useful = 0;
    rational space_overhead;          // threads_launched / threads_useful - 1
    std::vector<u32> coverage;        // per-cell visit counts, linear indexing
    bool coverage_recorded = true;
    u64 state_hash = 0;               // hash of the kernel state, 0 for map runs
    u64 seed = 0;
};

struct launch_opts {
    u64 seed = 0;
    i64 steps = 50;                    // CA sweeps
    ca_boundary boundary = ca_boundary::periodic2d;
    bool record_coverage = true;       // off: keep counts only (large rho runs)
    u64 block_order_salt = 0;          // nonzero: walk blocks in shuffled order
};

struct cover_verdict {
    bool exact = true;
    data_coord witness{};
    u64 multiplicity = 0;
};

namespace detail {

// Invokes fn(omega, trapezoid ordinal, outcome) for every block of the grid,
// in natural order or, with a nonzero salt, in a deterministic shuffle
// (order-independence test hook). The ordinal is -1 for non-trapezoid grids.
template <class Fn>
void for_each_block_outcome(const grid_spec& g, u64 salt, Fn&& fn) {
    auto emit_grid = [&](i64 ex, i64 ey, i64 ez, int trap, auto&& map_at) {
        if (salt == 0) {
            for (i64 z = 0; z < ez; ++z)
                for (i64 y = 0; y < ey; ++y)
                    for (i64 x = 0; x < ex; ++x) {
                        block_coord w{x, y, z};
                        fn(w, trap, map_at(w));
                    }
            return;
        }
        std::vector<u64> order(std::size_t(ex) * std::size_t(ey) * std::size_t(ez));
        for (u64 i = 0; i < order.size(); ++i) order[i] = i;
        u64 rng = salt;
        for (u64 i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[splitmix64(rng) % i]);
        for (u64 lin : order) {
            block_coord w{i64(lin % u64(ex)), i64(lin / u64(ex) % u64(ey)),
                          i64(lin / (u64(ex) * u64(ey)))};
            fn(w, trap, map_at(w));
        }
    };

    switch (g.kind) {
        case map_kind::bb:
            emit_grid(g.extents[0], g.extents[1], g.extents[2], -1,
                      [&](block_coord w) { return map_bb(w, g.n, g.dims); });
            break;
        case map_kind::rb:
            emit_grid(g.extents[0], g.extents[1], 1, -1, [&](block_coord w) {
                return map_outcome{false, map_rb_2d(w, g.n), 1, 0};
            });
            break;
        case map_kind::lambda2d:
            emit_grid(g.extents[0], 1, 1, -1, [&](block_coord w) {
                return map_outcome{false, map_lambda_2d(u64(w.x), g.n), 1, 0};
            });
            break;
        case map_kind::h2d:
            emit_grid(g.extents[0], g.extents[1], 1, -1,
                      [&](block_coord w) { return map_h2d(w); });
            break;
        case map_kind::h2d_padded:
            emit_grid(g.extents[0], g.extents[1], 1, -1,
                      [&](block_coord w) { return map_h2d_padded(w, g.n); });
            break;
        case map_kind::h2d_trapezoid:
            for (std::size_t t = 0; t < g.traps.size(); ++t)
                emit_grid(g.traps[t].ext_x, g.traps[t].ext_y, 1, int(t),
                          [&](block_coord w) { return map_h2d_trapezoid(w, g.traps[t]); });
            break;
        case map_kind::h3d:
            emit_grid(g.extents[0], g.extents[1], g.extents[2], -1,
                      [&](block_coord w) { return map_h3d(w, g.n); });
            break;
    }
}

struct launch_counters {
    u64 blocks_launched = 0;
    u64 blocks_void = 0;
    u64 threads_launched = 0;
    u64 threads_useful = 0;
};

// One full grid walk. thread_fn(cx, cy, cz, idx) runs per useful thread;
// acct (when non-null) accumulates launch accounting.
template <class ThreadFn>
void sweep(const grid_spec& g, i64 cell_side, launch_counters* acct, u64 salt,
           ThreadFn&& thread_fn) {
    const i64 rho = g.rho;
    const bool strict = strict_view(g.kind);
    const bool is3d = g.dims == 3;
    const u64 threads_per_block = is3d ? u64(rho) * u64(rho) * u64(rho)
                                       : u64(rho) * u64(rho);
    std::vector<u64> layer_prefix;
    if (is3d) {
        layer_prefix.resize(std::size_t(cell_side) + 1);
        for (i64 z = 0; z <= cell_side; ++z)
            layer_prefix[std::size_t(z)] = tet_layer_prefix(cell_side, z);
    }

    for_each_block_outcome(g, salt, [&](block_coord, int, const map_outcome& o) {
        if (acct) {
            ++acct->blocks_launched;
            acct->threads_launched += threads_per_block;
        }
        if (o.is_void) {
            if (acct) ++acct->blocks_void;
            return;
        }
        data_coord d = o.target;
        if (strict) d.y -= 1;
        const i64 bx = d.x * rho, by = d.y * rho, bz = d.z * rho;
        for (i64 lz = 0; lz < (is3d ? rho : 1); ++lz)
            for (i64 ly = 0; ly < rho; ++ly)
                for (i64 lx = 0; lx < rho; ++lx) {
                    const i64 cx = bx + lx, cy = by + ly, cz = bz + lz;
                    const bool member = is3d ? tet_contains(cell_side, cx, cy, cz)
                                             : tri_contains(cell_side, cx, cy);
                    if (!member) continue;
                    const u64 idx = is3d ? layer_prefix[std::size_t(cz)] +
                                               tri_linear_index(cx, cy)
                                         : tri_linear_index(cx, cy);
                    if (acct) ++acct->threads_useful;
                    thread_fn(cx, cy, cz, idx);
                }
    });
}

inline u8 life_next(u8 alive, int alive_neighbors) {
    if (alive) return alive_neighbors == 2 || alive_neighbors == 3 ? u8{1} : u8{0};
    return alive_neighbors == 3 ? u8{1} : u8{0};
}

// Moore neighborhood with coordinates wrapped modulo the side; wrapped
// coordinates landing outside the simplex read as dead.
inline int alive_neighbors_2d_periodic(const simplex_grid_state<u8>& s, i64 x, i64 y) {
    const i64 S = s.side;
    int count = 0;
    for (i64 dy = -1; dy <= 1; ++dy)
        for (i64 dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            i64 nx = x + dx, ny = y + dy;
            if (nx < 0) nx += S; else if (nx >= S) nx -= S;
            if (ny < 0) ny += S; else if (ny >= S) ny -= S;
            if (nx <= ny) count += s.cells[tri_linear_index(nx, ny)];
        }
    return count;
}

// Moore neighborhood with fixed dead cells beyond the boundary.
inline int alive_neighbors_3d_dead(const simplex_grid_state<u8>& s, i64 x, i64 y, i64 z) {
    int count = 0;
    for (i64 dz = -1; dz <= 1; ++dz)
        for (i64 dy = -1; dy <= 1; ++dy)
            for (i64 dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                i64 nx = x + dx, ny = y + dy, nz = z + dz;
                if (tet_contains(s.side, nx, ny, nz))
                    count += s.cells[tet_linear_index(s.side, nx, ny, nz)];
            }
    return count;
}

} // namespace detail

inline void validate_launch(const grid_spec& g, const simplex_spec& domain) {
    if (domain.m != g.dims)
        throw std::invalid_argument("launch: grid and domain dimensions differ");
    i64 cell_side = g.domain_side() * g.rho;
    if (domain.n != cell_side - 1)
        throw std::invalid_argument("launch: domain side does not match grid * rho");
    if (g.rho < 1) throw std::invalid_argument("launch: rho must be >= 1");
}

inline sim_report make_report(const grid_spec& g, const launch_opts& o) {
    sim_report rep;
    rep.m = g.dims;
    rep.cell_side = g.domain_side() * g.rho;
    rep.coverage_recorded = o.record_coverage;
    if (o.record_coverage)
        rep.coverage.assign(std::size_t(g.dims == 2 ? tri_cells(rep.cell_side)
                                                    : tet_cells(rep.cell_side)),
                            0);
    rep.seed = o.seed;
    return rep;
}

inline void finish_report(sim_report& rep) {
    if (rep.threads_useful > 0)
        rep.space_overhead = rational(i128(rep.threads_launched), i128(rep.threads_useful)) -
                             rational(1);
}

// One accounted sweep: fills rep's launch counters and, when enabled, its
// coverage multiset, then runs fn per useful thread.
template <class ThreadFn>
void accounted_sweep(const grid_spec& g, sim_report& rep, u64 salt, ThreadFn&& fn) {
    detail::launch_counters acct;
    u32* cover = rep.coverage_recorded ? rep.coverage.data() : nullptr;
    detail::sweep(g, rep.cell_side, &acct, salt,
                  [&](i64 cx, i64 cy, i64 cz, u64 idx) {
                      if (cover) ++cover[idx];
                      fn(cx, cy, cz, idx);
                  });
    rep.blocks_launched = acct.blocks_launched;
    rep.blocks_void = acct.blocks_void;
    rep.threads_launched = acct.threads_launched;
    rep.threads_useful = acct.threads_useful;
}

// MAP kernel: the coverage multiset is the observable sink.
inline sim_report launch_map(const grid_spec& g, const simplex_spec& domain,
                             const launch_opts& opts = {}) {
    validate_launch(g, domain);
    sim_report rep = make_report(g, opts);
    accounted_sweep(g, rep, opts.block_order_salt, [](i64, i64, i64, u64) {});
    finish_report(rep);
    return rep;
}

// ACCUM kernel: each useful thread increments its cell once.
inline sim_report launch_accum(const grid_spec& g, const simplex_spec& domain,
                               simplex_grid_state<u32>& state,
                               const launch_opts& opts = {}) {
    validate_launch(g, domain);
    if (state.m != g.dims || state.side != g.domain_side() * g.rho)
        throw std::invalid_argument("launch: state does not match the domain");
    sim_report rep = make_report(g, opts);
    u32* cells = state.cells.data();
    accounted_sweep(g, rep, opts.block_order_salt,
                    [cells](i64, i64, i64, u64 idx) { ++cells[idx]; });
    finish_report(rep);
    rep.state_hash = state.hash();
    return rep;
}

// Sequential reference for the accumulator kernel: one visit per cell.
inline void kernel_accum(simplex_grid_state<u32>& state) {
    for (auto& c : state.cells) c += 1;
}

// Deterministic EDM inputs: one point per domain side unit, coordinates in
// [0, 1) drawn from a seed-keyed splitmix64 stream.
inline std::vector<std::array<double, 2>> make_edm_points(i64 count, u64 seed) {
    std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(count));
    u64 rng = seed;
    for (auto& p : pts) {
        p[0] = splitmix64_unit(rng);
        p[1] = splitmix64_unit(rng);
    }
    return pts;
}

inline double edm_distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    // One fixed expression order keeps results bit-identical across maps.
    double dx = a[0] - b[0];
    double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

// EDM kernel: cell (x, y) holds the distance between points x and y.
inline sim_report launch_edm(const grid_spec& g, const simplex_spec& domain,
                             const std::vector<std::array<double, 2>>& points,
                             simplex_grid_state<double>& state,
                             const launch_opts& opts = {}) {
    validate_launch(g, domain);
    if (g.dims != 2)
        throw std::invalid_argument("launch_edm: 2-simplex domains only");
    if (state.m != 2 || state.side != g.domain_side() * g.rho)
        throw std::invalid_argument("launch: state does not match the domain");
    if (i64(points.size()) != state.side)
        throw std::invalid_argument("launch_edm: need one point per domain side unit");
    sim_report rep = make_report(g, opts);
    double* cells = state.cells.data();
    const auto* pts = points.data();
    accounted_sweep(g, rep, opts.block_order_salt,
                    [cells, pts](i64 cx, i64 cy, i64, u64 idx) {
                        cells[idx] = edm_distance(pts[cx], pts[cy]);
                    });
    finish_report(rep);
    rep.state_hash = state.hash();
    return rep;
}

// Sequential reference fill of the full EDM state.
inline void kernel_edm(const std::vector<std::array<double, 2>>& points,
                       simplex_grid_state<double>& state) {
    if (state.m != 2) throw std::invalid_argument("kernel_edm: 2-simplex domains only");
    if (i64(points.size()) != state.side)
        throw std::invalid_argument("kernel_edm: need one point per domain side unit");
    for (i64 y = 0; y < state.side; ++y)
        for (i64 x = 0; x <= y; ++x)
            state.cells[tri_linear_index(x, y)] = edm_distance(points[std::size_t(x)],
                                                               points[std::size_t(y)]);
}

// Seed-keyed random Life population at 1/4 density, keyed by cell index so
// the initial state is independent of construction order.
inline simplex_grid_state<u8> make_life_state(int m, i64 side, u64 seed) {
    simplex_grid_state<u8> s(m, side);
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        u64 key = seed;
        key = fnv1a_append_u64(key, i);
        s.cells[i] = (splitmix64(key) >> 62) == 0 ? u8{1} : u8{0};
    }
    return s;
}

// Sequential reference CA engine: double-buffered B3/S23 sweeps in linear
// cell order.
inline void kernel_ca_run(simplex_grid_state<u8>& state, i64 steps, ca_boundary boundary) {
    if (steps < 0) throw std::invalid_argument("kernel_ca_run: steps must be >= 0");
    if ((boundary == ca_boundary::periodic2d) != (state.m == 2))
        throw std::invalid_argument("kernel_ca_run: boundary rule does not fit the domain");
    simplex_grid_state<u8> next(state.m, state.side);
    for (i64 step = 0; step < steps; ++step) {
        if (state.m == 2) {
            for (i64 y = 0; y < state.side; ++y)
                for (i64 x = 0; x <= y; ++x)
                    next.cells[tri_linear_index(x, y)] = detail::life_next(
                        state.cells[tri_linear_index(x, y)],
                        detail::alive_neighbors_2d_periodic(state, x, y));
        } else {
            for (i64 z = 0; z < state.side; ++z)
                for (i64 y = 0; y + z < state.side; ++y)
                    for (i64 x = 0; x <= y; ++x)
                        next.cells[tet_linear_index(state.side, x, y, z)] =
                            detail::life_next(
                                state.cells[tet_linear_index(state.side, x, y, z)],
                                detail::alive_neighbors_3d_dead(state, x, y, z));
        }
        state.cells.swap(next.cells);
    }
}

// CA kernel through the grid: every sweep reassigns cells to threads through
// the map; an exact map writes each cell exactly once per sweep, so the
// result is identical to the sequential engine. Coverage counts the first
// sweep only.
inline sim_report launch_ca(const grid_spec& g, const simplex_spec& domain,
                            simplex_grid_state<u8>& state, const launch_opts& opts = {}) {
    validate_launch(g, domain);
    if (state.m != g.dims || state.side != g.domain_side() * g.rho)
        throw std::invalid_argument("launch: state does not match the domain");
    if ((opts.boundary == ca_boundary::periodic2d) != (g.dims == 2))
        throw std::invalid_argument("launch_ca: boundary rule does not fit the domain");
    sim_report rep = make_report(g, opts);
    simplex_grid_state<u8> next(state.m, state.side);
    for (i64 step = 0; step < opts.steps; ++step) {
        const simplex_grid_state<u8>& cur = state;
        u8* out = next.cells.data();
        auto cell2 = [&cur, out](i64 cx, i64 cy, i64, u64 idx) {
            out[idx] = detail::life_next(cur.cells[idx],
                                         detail::alive_neighbors_2d_periodic(cur, cx, cy));
        };
        auto cell3 = [&cur, out](i64 cx, i64 cy, i64 cz, u64 idx) {
            out[idx] = detail::life_next(cur.cells[idx],
                                         detail::alive_neighbors_3d_dead(cur, cx, cy, cz));
        };
        if (step == 0) {
            if (g.dims == 2) accounted_sweep(g, rep, opts.block_order_salt, cell2);
            else accounted_sweep(g, rep, opts.block_order_salt, cell3);
        } else {
            if (g.dims == 2) detail::sweep(g, rep.cell_side, nullptr, opts.block_order_salt, cell2);
            else detail::sweep(g, rep.cell_side, nullptr, opts.block_order_salt, cell3);
        }
        state.cells.swap(next.cells);
    }
    finish_report(rep);
    rep.state_hash = state.hash();
    return rep;
}

// Exact iff every member cell was covered exactly once; the witness is the
// first offending coordinate in linear order.
inline cover_verdict verify_exact_cover(const sim_report& rep, const simplex_spec& domain) {
    if (domain.m != rep.m || domain.n != rep.cell_side - 1)
        throw std::invalid_argument("verify_exact_cover: report/domain mismatch");
    if (!rep.coverage_recorded)
        throw std::invalid_argument("verify_exact_cover: report has no coverage");
    for (u64 i = 0; i < rep.coverage.size(); ++i) {
        if (rep.coverage[i] == 1) continue;
        data_coord w = rep.m == 2 ? tri_coord_at(i) : tet_coord_at(rep.cell_side, i);
        return {false, w, rep.coverage[i]};
    }
    return {};
}

} // namespace simplexmap
