#pragma once

// Verification sweeps and CSV report emission.
//
// Every tabular output starts with a header naming every column and carries
// a schema tag per row; identical inputs produce byte-identical text. Sweeps
// shard across threads (capped by SIMPLEXMAP_THREADS) and merge in input
// order, so parallelism never changes a report.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "simulator.hpp"

namespace simplexmap {

constexpr const char* csv_schema_measure = "slx-1";
constexpr const char* csv_schema_simulate = "slx-sim-1";
constexpr const char* csv_schema_analyze = "slx-an-1";
constexpr const char* csv_schema_optimize = "slx-opt-1";

inline bool map_supports_m(map_kind k, int m) {
    switch (k) {
        case map_kind::bb: return m == 2 || m == 3;
        case map_kind::h3d: return m == 3;
        default: return m == 2;
    }
}

inline std::string valid_pairs_text() {
    std::string out;
    for (map_kind k : {map_kind::bb, map_kind::rb, map_kind::lambda2d, map_kind::h2d,
                       map_kind::h2d_trapezoid, map_kind::h2d_padded, map_kind::h3d}) {
        out += map_kind_name(k);
        out += k == map_kind::bb ? " (m=2,3)" : map_supports_m(k, 3) ? " (m=3)" : " (m=2)";
        if (k != map_kind::h3d) out += ", ";
    }
    return out;
}

// Grid for one (map, m, n) point; threshold applies to trapezoids only.
inline grid_spec make_grid(map_kind k, int m, i64 n, i64 rho = 1, i64 threshold = 1) {
    if (!map_supports_m(k, m))
        throw std::invalid_argument(std::string("map ") + map_kind_name(k) +
                                    " does not support m=" + std::to_string(m) +
                                    "; valid: " + valid_pairs_text());
    if (rho < 1) throw std::invalid_argument("rho must be >= 1");
    grid_spec g;
    switch (k) {
        case map_kind::bb: g = grid_bb(n, m); break;
        case map_kind::rb: g = grid_rb(n); break;
        case map_kind::lambda2d: g = grid_lambda(n); break;
        case map_kind::h2d: g = grid_h2d(n); break;
        case map_kind::h2d_padded: g = grid_h2d_padded(n); break;
        case map_kind::h2d_trapezoid: g = grid_trapezoids(n, threshold); break;
        case map_kind::h3d: g = grid_h3d(n); break;
    }
    g.rho = rho;
    return g;
}

struct n_range {
    i64 lo = 1, hi = 1;
    bool pow2_only = false;
};

// Accepts "N", "LO..HI", "LO..HI(pow2)".
inline n_range parse_n_range(const std::string& text) {
    auto parse_int = [](const std::string& s) -> i64 {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad n-range literal: " + s);
        return std::stoll(s);
    };
    n_range r;
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        r.lo = r.hi = parse_int(text);
        return r;
    }
    r.lo = parse_int(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    if (rest.size() > 6 && rest.substr(rest.size() - 6) == "(pow2)") {
        r.pow2_only = true;
        rest = rest.substr(0, rest.size() - 6);
    }
    r.hi = parse_int(rest);
    if (r.lo < 1 || r.hi < r.lo)
        throw std::invalid_argument("bad n-range: " + text);
    return r;
}

inline std::vector<i64> expand_n_range(const n_range& r) {
    std::vector<i64> ns;
    if (r.pow2_only) {
        for (i64 n = 1; n <= r.hi; n *= 2) {
            if (n >= r.lo) ns.push_back(n);
            if (n > r.hi / 2) break;
        }
    } else {
        for (i64 n = r.lo; n <= r.hi; ++n) ns.push_back(n);
    }
    return ns;
}

// Worker count: hardware concurrency, capped by SIMPLEXMAP_THREADS when set.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SIMPLEXMAP_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v < long(hw)) hw = unsigned(v);
    }
    return hw;
}

// fn(i) for i in [0, count), sharded over the thread budget. Results land in
// input order; the first worker exception is rethrown.
template <class Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    unsigned workers = thread_budget();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (std::size_t(workers) > count) workers = unsigned(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct measure_row {
    map_kind kind = map_kind::bb;
    int m = 2;
    i64 n = 1;
    i64 rho = 1;
    u64 blocks_launched = 0;
    u64 blocks_void = 0;
    u64 threads_launched = 0;
    u64 threads_useful = 0;
    rational overhead;
    bool exact = false;
    data_coord witness{};
    u64 multiplicity = 0;
};

inline measure_row row_from_report(const grid_spec& g, const sim_report& rep) {
    measure_row row;
    row.kind = g.kind;
    row.m = g.dims;
    row.n = g.n;
    row.rho = g.rho;
    row.blocks_launched = rep.blocks_launched;
    row.blocks_void = rep.blocks_void;
    row.threads_launched = rep.threads_launched;
    row.threads_useful = rep.threads_useful;
    row.overhead = rep.space_overhead;
    return row;
}

// One launch of the map kernel; cover checking needs coverage recording and
// is the memory-heavy part, so callers doing count-only sweeps switch it off.
inline measure_row measure_grid(const grid_spec& g, bool check_cover = true) {
    simplex_spec dom{g.dims, g.domain_side() * g.rho - 1};
    launch_opts o;
    o.record_coverage = check_cover;
    sim_report rep = launch_map(g, dom, o);
    measure_row row = row_from_report(g, rep);
    if (check_cover) {
        auto v = verify_exact_cover(rep, dom);
        row.exact = v.exact;
        row.witness = v.witness;
        row.multiplicity = v.multiplicity;
    }
    return row;
}

namespace detail {

// Tight multiset-marking walk over one 2D block grid; keeps everything but
// the map call in registers, which the layered simulator path cannot. dupes
// counts marking events that hit an already-marked cell, so the caller can
// settle exactness from the counters alone (usefuls == cells and dupes == 0
// forces all-ones by pigeonhole) and scan only to locate a witness.
template <class MapAt>
void mark_blocks_2d(i64 ext_x, i64 ext_y, i64 side, bool strict, MapAt&& map_at,
                    launch_counters& acct, u8* mk, u64& dupes) {
    for (i64 y = 0; y < ext_y; ++y)
        for (i64 x = 0; x < ext_x; ++x) {
            const map_outcome o = map_at(x, y);
            ++acct.blocks_launched;
            if (o.is_void) {
                ++acct.blocks_void;
                continue;
            }
            const i64 cx = o.target.x;
            const i64 cy = o.target.y - (strict ? 1 : 0);
            if (!tri_contains(side, cx, cy)) continue;
            ++acct.threads_useful;
            u8& c = mk[tri_linear_index(cx, cy)];
            dupes += c != 0;
            if (c != 255) ++c;
        }
}

// Block dispatch mirroring the simulator's enumerator for the 2D rho = 1
// case, where sweep volume makes the generic path too slow.
inline void mark_grid_2d(const grid_spec& g, i64 side, launch_counters& acct, u8* mk,
                         u64& dupes) {
    const bool strict = strict_view(g.kind);
    switch (g.kind) {
        case map_kind::bb:
            mark_blocks_2d(g.extents[0], g.extents[1], side, strict,
                           [&](i64 x, i64 y) { return map_bb({x, y, 0}, g.n, 2); }, acct, mk, dupes);
            break;
        case map_kind::rb:
            mark_blocks_2d(g.extents[0], g.extents[1], side, strict,
                           [&](i64 x, i64 y) {
                               return map_outcome{false, map_rb_2d({x, y, 0}, g.n), 1, 0};
                           },
                           acct, mk, dupes);
            break;
        case map_kind::lambda2d:
            mark_blocks_2d(g.extents[0], 1, side, strict,
                           [&](i64 x, i64) {
                               return map_outcome{false, map_lambda_2d(u64(x), g.n), 1, 0};
                           },
                           acct, mk, dupes);
            break;
        case map_kind::h2d:
            mark_blocks_2d(g.extents[0], g.extents[1], side, strict,
                           [](i64 x, i64 y) { return map_h2d({x, y, 0}); }, acct, mk, dupes);
            break;
        case map_kind::h2d_padded:
            mark_blocks_2d(g.extents[0], g.extents[1], side, strict,
                           [&](i64 x, i64 y) { return map_h2d_padded({x, y, 0}, g.n); }, acct,
                           mk, dupes);
            break;
        case map_kind::h2d_trapezoid:
            for (const auto& t : g.traps)
                mark_blocks_2d(t.ext_x, t.ext_y, side, strict,
                               [&](i64 x, i64 y) { return map_h2d_trapezoid({x, y, 0}, t); },
                               acct, mk, dupes);
            break;
        case map_kind::h3d:
            throw std::invalid_argument("mark_grid_2d: 2-simplex maps only");
    }
    acct.threads_launched = acct.blocks_launched;
}

} // namespace detail

// Cover-checking measurement against a caller-reused byte multiset, the
// sweep workhorse: allocation-free once the scratch buffer is warm, at the
// cost of capping reported multiplicities at 255.
inline measure_row measure_grid_compact(const grid_spec& g, std::vector<u8>& marks) {
    const i64 side = g.domain_side() * g.rho;
    const u64 cells = g.dims == 3 ? tet_cells(side) : tri_cells(side);
    marks.assign(std::size_t(cells), 0);
    detail::launch_counters acct;
    u8* mk = marks.data();
    u64 dupes = 0;
    bool counters_settle = false;
    if (g.dims == 2 && g.rho == 1) {
        detail::mark_grid_2d(g, side, acct, mk, dupes);
        counters_settle = true;
    } else {
        detail::sweep(g, side, &acct, 0, [mk](i64, i64, i64, u64 idx) {
            if (mk[idx] != 255) ++mk[idx];
        });
    }
    measure_row row;
    row.kind = g.kind;
    row.m = g.dims;
    row.n = g.n;
    row.rho = g.rho;
    row.blocks_launched = acct.blocks_launched;
    row.blocks_void = acct.blocks_void;
    row.threads_launched = acct.threads_launched;
    row.threads_useful = acct.threads_useful;
    if (acct.threads_useful > 0)
        row.overhead = rational(i128(acct.threads_launched), i128(acct.threads_useful)) -
                       rational(1);
    row.exact = true;
    if (!counters_settle || acct.threads_useful != cells || dupes != 0) {
        for (u64 i = 0; i < cells; ++i) {
            if (mk[i] == 1) continue;
            row.exact = false;
            row.witness = g.dims == 2 ? tri_coord_at(i) : tet_coord_at(side, i);
            row.multiplicity = mk[i];
            break;
        }
    }
    return row;
}

// Cover-checking sweep over the n values, parallel, rows in input order.
inline std::vector<measure_row> verify_sweep(map_kind k, int m, const std::vector<i64>& ns,
                                             i64 rho = 1, i64 threshold = 1) {
    std::vector<measure_row> rows(ns.size());
    parallel_for_index(ns.size(), [&](std::size_t i) {
        thread_local std::vector<u8> marks;
        rows[i] = measure_grid_compact(make_grid(k, m, ns[i], rho, threshold), marks);
    });
    return rows;
}

// Count-only sweep (no coverage allocation).
inline std::vector<measure_row> analyze_sweep(map_kind k, int m, const std::vector<i64>& ns,
                                              i64 rho = 1, i64 threshold = 1) {
    std::vector<measure_row> rows(ns.size());
    parallel_for_index(ns.size(), [&](std::size_t i) {
        rows[i] = measure_grid(make_grid(k, m, ns[i], rho, threshold), false);
    });
    return rows;
}

// Asymptotic worst-case block overhead of each scheme.
inline rational scheme_overhead_limit(map_kind k, int m) {
    switch (k) {
        case map_kind::bb: return bb_waste_fraction(m);
        case map_kind::h2d_padded: return rational(3);
        case map_kind::h3d: return rational(1, 8);
        default: return rational(0);
    }
}

namespace detail {

inline void csv_u64(std::string& out, u64 v) { out += std::to_string(v); }

inline void csv_rational(std::string& out, const rational& r, int digits = 9) {
    out += i128_to_string(r.num);
    out += ',';
    out += i128_to_string(r.den);
    out += ',';
    out += r.to_decimal_string(digits);
}

inline void csv_measure_fields(std::string& out, const measure_row& r) {
    out += map_kind_name(r.kind);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.rho);
    out += ',';
    csv_u64(out, r.blocks_launched);
    out += ',';
    csv_u64(out, r.blocks_void);
    out += ',';
    csv_u64(out, r.threads_launched);
    out += ',';
    csv_u64(out, r.threads_useful);
    out += ',';
    csv_rational(out, r.overhead);
}

} // namespace detail

constexpr const char* csv_measure_columns =
    "map,m,n,rho,blocks_launched,blocks_void,threads_launched,threads_useful,"
    "overhead_num,overhead_den,overhead_decimal";

inline std::string csv_measure(const std::vector<measure_row>& rows) {
    std::string out = "schema,";
    out += csv_measure_columns;
    out += '\n';
    for (const auto& r : rows) {
        out += csv_schema_measure;
        out += ',';
        detail::csv_measure_fields(out, r);
        out += '\n';
    }
    return out;
}

inline std::string csv_analyze(const std::vector<measure_row>& rows) {
    std::string out = "schema,";
    out += csv_measure_columns;
    out += ",limit_num,limit_den,limit_decimal\n";
    for (const auto& r : rows) {
        out += csv_schema_analyze;
        out += ',';
        detail::csv_measure_fields(out, r);
        out += ',';
        detail::csv_rational(out, scheme_overhead_limit(r.kind, r.m));
        out += '\n';
    }
    return out;
}

struct simulate_row {
    measure_row base;
    kernel_kind kernel = kernel_kind::map;
    i64 steps = 0;
    u64 seed = 0;
    u64 state_hash = 0;
};

inline std::string csv_simulate(const std::vector<simulate_row>& rows) {
    std::string out = "schema,";
    out += csv_measure_columns;
    out += ",kernel,steps,seed,state_hash\n";
    for (const auto& r : rows) {
        out += csv_schema_simulate;
        out += ',';
        detail::csv_measure_fields(out, r.base);
        out += ',';
        out += kernel_kind_name(r.kernel);
        out += ',';
        out += std::to_string(r.steps);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += std::to_string(r.state_hash);
        out += '\n';
    }
    return out;
}

inline std::string csv_optimize(
    const std::vector<std::pair<self_similar_params, efficiency_report>>& ranked,
    i64 n_eval) {
    std::string out =
        "schema,m,inv_r,beta,n_eval,alpha_num,alpha_den,alpha_decimal,n0_found,n0\n";
    for (const auto& [p, rep] : ranked) {
        out += csv_schema_optimize;
        out += ',';
        out += std::to_string(p.m);
        out += ',';
        out += std::to_string(p.inv_r);
        out += ',';
        out += std::to_string(p.beta);
        out += ',';
        out += std::to_string(n_eval);
        out += ',';
        detail::csv_rational(out, rep.alpha);
        out += ',';
        out += rep.found ? '1' : '0';
        out += ',';
        out += std::to_string(rep.found ? rep.n0 : 0);
        out += '\n';
    }
    return out;
}

inline std::string witness_text(const measure_row& r) {
    std::string out = "(" + std::to_string(r.witness.x) + "," + std::to_string(r.witness.y);
    if (r.m == 3) out += "," + std::to_string(r.witness.z);
    out += ")";
    return out;
}

// Human-readable sweep report; one line per row, verdicts included.
inline std::string text_report(const std::vector<measure_row>& rows, bool verified) {
    std::string out;
    for (const auto& r : rows) {
        out += "map=";
        out += map_kind_name(r.kind);
        out += " m=" + std::to_string(r.m);
        out += " n=" + std::to_string(r.n);
        out += " rho=" + std::to_string(r.rho);
        out += " blocks=" + std::to_string(r.blocks_launched);
        out += " void=" + std::to_string(r.blocks_void);
        out += " threads=" + std::to_string(r.threads_launched);
        out += " useful=" + std::to_string(r.threads_useful);
        out += " overhead=" + r.overhead.to_string();
        out += " (" + r.overhead.to_decimal_string(6) + ")";
        if (verified) {
            if (r.exact) {
                out += " Exact";
            } else {
                out += " NotExact witness=" + witness_text(r) +
                       " mult=" + std::to_string(r.multiplicity);
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace simplexmap
