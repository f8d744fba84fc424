#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simplexmap/render.hpp"
#include "simplexmap/report.hpp"

using namespace simplexmap;

namespace {

struct cli_state {
    std::string map = "bb";
    int m = 0;                 // 0: default for the map
    std::string n_range;
    i64 n = 0;
    i64 rho = 0;               // 0: command default
    i64 threshold = 1;
    std::string kernel = "map";
    i64 steps = 50;
    u64 seed = 0;
    i64 inv_r_max = 8;
    i64 beta_max = 8;
    i64 n_eval = 4096;
    std::string out;
    std::string format;
};

map_kind parse_map(const std::string& s) {
    for (map_kind k : {map_kind::bb, map_kind::rb, map_kind::lambda2d, map_kind::h2d,
                       map_kind::h2d_trapezoid, map_kind::h2d_padded, map_kind::h3d})
        if (s == map_kind_name(k)) return k;
    throw std::invalid_argument("unknown map '" + s + "'; valid: " + valid_pairs_text());
}

kernel_kind parse_kernel(const std::string& s) {
    for (kernel_kind k :
         {kernel_kind::map, kernel_kind::accum, kernel_kind::edm, kernel_kind::ca_life})
        if (s == kernel_kind_name(k)) return k;
    throw std::invalid_argument("unknown kernel '" + s + "'; valid: map, accum, edm, ca");
}

int resolve_m(map_kind k, int flag) {
    int m = flag != 0 ? flag : (k == map_kind::h3d ? 3 : 2);
    if (!map_supports_m(k, m))
        throw std::invalid_argument(std::string("map ") + map_kind_name(k) +
                                    " does not support m=" + std::to_string(m) +
                                    "; valid: " + valid_pairs_text());
    return m;
}

i64 resolve_rho(int dims, i64 flag, bool simulate) {
    if (flag != 0) {
        if (flag < 1) throw std::invalid_argument("rho must be >= 1");
        return flag;
    }
    if (!simulate) return 1;
    return dims == 3 ? 8 : 16;
}

std::vector<i64> resolve_ns(const cli_state& c) {
    if (!c.n_range.empty()) return expand_n_range(parse_n_range(c.n_range));
    if (c.n > 0) return {c.n};
    throw std::invalid_argument("pass --n or --n-range");
}

void write_output(const cli_state& c, const std::string& content) {
    if (c.out.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + c.out);
    f << content;
    if (!f) throw std::invalid_argument("failed writing output file " + c.out);
}

std::string pick_format(const cli_state& c, const char* fallback) {
    return c.format.empty() ? fallback : c.format;
}

int cmd_verify(const cli_state& c) {
    map_kind k = parse_map(c.map);
    int m = resolve_m(k, c.m);
    i64 rho = resolve_rho(m, c.rho, false);
    auto rows = verify_sweep(k, m, resolve_ns(c), rho, c.threshold);

    std::string format = pick_format(c, "csv");
    if (format == "csv")
        write_output(c, csv_measure(rows));
    else if (format == "text")
        write_output(c, text_report(rows, true));
    else
        throw std::invalid_argument("verify formats: csv, text");

    for (const auto& r : rows)
        if (!r.exact) {
            std::cerr << "verification failed: map=" << map_kind_name(r.kind)
                      << " m=" << r.m << " n=" << r.n << " witness=" << witness_text(r)
                      << " multiplicity=" << r.multiplicity << "\n";
            return 1;
        }
    return 0;
}

int cmd_analyze(const cli_state& c) {
    map_kind k = parse_map(c.map);
    int m = resolve_m(k, c.m);
    i64 rho = resolve_rho(m, c.rho, false);
    auto rows = analyze_sweep(k, m, resolve_ns(c), rho, c.threshold);
    std::string format = pick_format(c, "csv");
    if (format == "csv")
        write_output(c, csv_analyze(rows));
    else if (format == "text")
        write_output(c, text_report(rows, false));
    else
        throw std::invalid_argument("analyze formats: csv, text");
    return 0;
}

int cmd_simulate(const cli_state& c) {
    map_kind k = parse_map(c.map);
    int m = resolve_m(k, c.m);
    i64 rho = resolve_rho(m, c.rho, true);
    kernel_kind kernel = parse_kernel(c.kernel);
    if (c.steps < 0) throw std::invalid_argument("steps must be >= 0");

    std::vector<simulate_row> rows;
    for (i64 n : resolve_ns(c)) {
        grid_spec g = make_grid(k, m, n, rho, c.threshold);
        simplex_spec dom{g.dims, g.domain_side() * g.rho - 1};
        launch_opts o;
        o.seed = c.seed;
        o.steps = c.steps;
        o.boundary = m == 3 ? ca_boundary::dead3d : ca_boundary::periodic2d;

        simulate_row row;
        row.kernel = kernel;
        row.seed = c.seed;
        row.steps = 1;
        sim_report rep;
        switch (kernel) {
            case kernel_kind::map: {
                rep = launch_map(g, dom, o);
                break;
            }
            case kernel_kind::accum: {
                simplex_grid_state<u32> state(m, dom.n + 1);
                rep = launch_accum(g, dom, state, o);
                break;
            }
            case kernel_kind::edm: {
                auto points = make_edm_points(dom.n + 1, c.seed);
                simplex_grid_state<double> state(m, dom.n + 1);
                rep = launch_edm(g, dom, points, state, o);
                break;
            }
            case kernel_kind::ca_life: {
                auto state = make_life_state(m, dom.n + 1, c.seed);
                rep = launch_ca(g, dom, state, o);
                row.steps = c.steps;
                break;
            }
        }
        row.base = row_from_report(g, rep);
        row.state_hash = rep.state_hash;
        rows.push_back(row);
    }

    std::string format = pick_format(c, "csv");
    if (format == "csv") {
        write_output(c, csv_simulate(rows));
    } else if (format == "text") {
        std::vector<measure_row> bases;
        for (const auto& r : rows) bases.push_back(r.base);
        write_output(c, text_report(bases, false));
    } else {
        throw std::invalid_argument("simulate formats: csv, text");
    }
    return 0;
}

int cmd_optimize(const cli_state& c) {
    int m = c.m != 0 ? c.m : 2;
    auto ranked = optimize_params(m, c.inv_r_max, c.beta_max, c.n_eval);
    if (pick_format(c, "csv") != "csv")
        throw std::invalid_argument("optimize formats: csv");
    write_output(c, csv_optimize(ranked, c.n_eval));
    return 0;
}

int cmd_render(const cli_state& c) {
    map_kind k = parse_map(c.map);
    int m = resolve_m(k, c.m);
    i64 rho = resolve_rho(m, c.rho, false);
    if (c.n <= 0) throw std::invalid_argument("render needs a single --n");
    if (pick_format(c, "svg") != "svg")
        throw std::invalid_argument("render formats: svg");
    write_output(c, render_svg(make_grid(k, m, c.n, rho, c.threshold)));
    return 0;
}

void add_common(CLI::App* cmd, cli_state& c, bool with_map, bool with_range) {
    if (with_map) {
        cmd->add_option("--map", c.map, "map name: " + valid_pairs_text());
        cmd->add_option("--m", c.m, "simplex dimension (default: map's natural m)");
        cmd->add_option("--rho", c.rho, "block edge in cells per axis");
        cmd->add_option("--T,--threshold", c.threshold, "trapezoid splitting threshold");
    }
    if (with_range) {
        cmd->add_option("--n", c.n, "single domain parameter n");
        cmd->add_option("--n-range", c.n_range, "range LO..HI or LO..HI(pow2)");
    }
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "output format");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exhaustive verifier and analyzer for constant-time block maps "
                 "from orthotope grids onto triangular/tetrahedral domains"};
    app.require_subcommand(1);
    cli_state c;

    auto* verify = app.add_subcommand("verify", "check exact cell coverage over an n sweep");
    add_common(verify, c, true, true);

    auto* simulate = app.add_subcommand("simulate", "run a kernel through a map");
    add_common(simulate, c, true, true);
    simulate->add_option("--kernel", c.kernel, "map, accum, edm, or ca");
    simulate->add_option("--steps", c.steps, "CA sweep count");
    simulate->add_option("--seed", c.seed, "seed for CA/EDM inputs");

    auto* analyze = app.add_subcommand("analyze", "emit launch accounting and overhead tables");
    add_common(analyze, c, true, true);

    auto* optimize = app.add_subcommand("optimize", "rank self-similar scaling parameters");
    optimize->add_option("--m", c.m, "simplex dimension");
    optimize->add_option("--inv-r-max", c.inv_r_max, "largest 1/r to try");
    optimize->add_option("--beta-max", c.beta_max, "largest beta to try");
    optimize->add_option("--n-eval", c.n_eval, "evaluation bound for alpha and n0");
    optimize->add_option("--out", c.out, "output file (default: stdout)");
    optimize->add_option("--format", c.format, "output format");

    auto* render = app.add_subcommand("render", "draw grid and data space as SVG");
    add_common(render, c, true, false);
    render->add_option("--n", c.n, "domain parameter n (<= 256)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(c);
        if (simulate->parsed()) return cmd_simulate(c);
        if (analyze->parsed()) return cmd_analyze(c);
        if (optimize->parsed()) return cmd_optimize(c);
        if (render->parsed()) return cmd_render(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
