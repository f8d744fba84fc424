#include <cstdlib>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "simplexmap/render.hpp"
#include "simplexmap/report.hpp"

using namespace simplexmap;
using Catch::Matchers::ContainsSubstring;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++count;
    return count;
}

struct env_guard {
    std::string name;
    std::string saved;
    bool had = false;
    env_guard(const char* n, const char* value) : name(n) {
        if (const char* old = std::getenv(n)) {
            saved = old;
            had = true;
        }
        setenv(n, value, 1);
    }
    ~env_guard() {
        if (had)
            setenv(name.c_str(), saved.c_str(), 1);
        else
            unsetenv(name.c_str());
    }
};

} // namespace

TEST_CASE("n-range parsing") {
    auto single = parse_n_range("16");
    CHECK(single.lo == 16);
    CHECK(single.hi == 16);
    CHECK_FALSE(single.pow2_only);

    auto range = parse_n_range("3..7");
    CHECK(range.lo == 3);
    CHECK(range.hi == 7);
    CHECK(expand_n_range(range) == std::vector<i64>{3, 4, 5, 6, 7});

    auto pow2 = parse_n_range("2..4096(pow2)");
    CHECK(pow2.pow2_only);
    auto ns = expand_n_range(pow2);
    CHECK(ns.size() == 12);
    CHECK(ns.front() == 2);
    CHECK(ns.back() == 4096);

    CHECK(expand_n_range(parse_n_range("3..16(pow2)")) == std::vector<i64>{4, 8, 16});

    CHECK_THROWS_AS(parse_n_range("0..4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_n_range("5..2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_n_range("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_n_range("2..4(pow3)"), std::invalid_argument);
}

TEST_CASE("map and simplex dimension support") {
    CHECK(map_supports_m(map_kind::bb, 2));
    CHECK(map_supports_m(map_kind::bb, 3));
    CHECK(map_supports_m(map_kind::h3d, 3));
    CHECK_FALSE(map_supports_m(map_kind::h3d, 2));
    CHECK_FALSE(map_supports_m(map_kind::lambda2d, 3));
    CHECK_FALSE(map_supports_m(map_kind::h2d, 3));

    CHECK_THROWS_MATCHES(make_grid(map_kind::lambda2d, 3, 8), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("valid:")));
    CHECK(make_grid(map_kind::h2d_trapezoid, 2, 27, 1, 4).traps.size() == 3);
    CHECK(make_grid(map_kind::bb, 3, 8, 2).rho == 2);
}

TEST_CASE("thread budget honors the environment cap") {
    {
        env_guard cap("SIMPLEXMAP_THREADS", "1");
        CHECK(thread_budget() == 1);
    }
    {
        env_guard cap("SIMPLEXMAP_THREADS", "garbage");
        CHECK(thread_budget() >= 1);
    }
    {
        env_guard cap("SIMPLEXMAP_THREADS", "100000");
        CHECK(thread_budget() >= 1);
        CHECK(thread_budget() <= 100000);
    }
}

TEST_CASE("verification sweep keeps input order and verdicts") {
    auto rows = verify_sweep(map_kind::h2d, 2, {2, 4, 8, 16});
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == i64(2) << i);
        CHECK(rows[i].exact);
        CHECK(rows[i].blocks_void == 0);
        CHECK(rows[i].blocks_launched == u64(rows[i].n) * u64(rows[i].n - 1) / 2);
    }
}

TEST_CASE("reports are byte-identical regardless of worker count") {
    std::string serial, parallel;
    {
        env_guard cap("SIMPLEXMAP_THREADS", "1");
        serial = csv_measure(verify_sweep(map_kind::h2d_trapezoid, 2, {2, 3, 5, 9, 27, 64}, 1, 1));
    }
    {
        env_guard cap("SIMPLEXMAP_THREADS", "4");
        parallel = csv_measure(verify_sweep(map_kind::h2d_trapezoid, 2, {2, 3, 5, 9, 27, 64}, 1, 1));
    }
    CHECK(serial == parallel);
}

TEST_CASE("sweep propagates worker failures") {
    env_guard cap("SIMPLEXMAP_THREADS", "4");
    CHECK_THROWS_AS(verify_sweep(map_kind::h2d, 2, {2, 4, 6, 8}), std::invalid_argument);
}

TEST_CASE("measurement CSV emits the frozen schema") {
    auto rows = analyze_sweep(map_kind::bb, 2, {2, 4});
    CHECK(csv_measure(rows) ==
          "schema,map,m,n,rho,blocks_launched,blocks_void,threads_launched,"
          "threads_useful,overhead_num,overhead_den,overhead_decimal\n"
          "slx-1,bb,2,2,1,4,1,4,3,1,3,0.333333333\n"
          "slx-1,bb,2,4,1,16,6,16,10,3,5,0.600000000\n");
}

TEST_CASE("analyze CSV pairs measurements with scheme limits") {
    auto out = csv_analyze(analyze_sweep(map_kind::bb, 3, {4}));
    CHECK_THAT(out, ContainsSubstring(",limit_num,limit_den,limit_decimal\n"));
    CHECK_THAT(out, ContainsSubstring("slx-an-1,bb,3,4,1,64,44,64,20,11,5,2.200000000,5,1,5.000000000\n"));

    auto h3d = csv_analyze(analyze_sweep(map_kind::h3d, 3, {16}));
    CHECK_THAT(h3d, ContainsSubstring(",1,8,0.125000000\n"));

    auto h2d = csv_analyze(analyze_sweep(map_kind::h2d, 2, {16}));
    CHECK_THAT(h2d, ContainsSubstring(",0,1,0.000000000,0,1,0.000000000\n"));
}

TEST_CASE("scheme limits") {
    CHECK(scheme_overhead_limit(map_kind::bb, 2) == rational(1));
    CHECK(scheme_overhead_limit(map_kind::bb, 3) == rational(5));
    CHECK(scheme_overhead_limit(map_kind::h3d, 3) == rational(1, 8));
    CHECK(scheme_overhead_limit(map_kind::h2d_padded, 2) == rational(3));
    CHECK(scheme_overhead_limit(map_kind::rb, 2) == rational(0));
    CHECK(scheme_overhead_limit(map_kind::h2d_trapezoid, 2) == rational(0));
}

TEST_CASE("simulation CSV records kernel, seed, and state hash") {
    auto g = make_grid(map_kind::h2d_trapezoid, 2, 16, 1, 4);
    simplex_spec dom{2, g.domain_side() - 1};
    auto run = [&] {
        auto state = make_life_state(2, g.domain_side(), 3);
        launch_opts o;
        o.steps = 5;
        o.seed = 3;
        auto rep = launch_ca(g, dom, state, o);
        simulate_row row;
        row.base = measure_grid(g, true);
        row.kernel = kernel_kind::ca_life;
        row.steps = 5;
        row.seed = 3;
        row.state_hash = rep.state_hash;
        return csv_simulate({row});
    };
    std::string a = run(), b = run();
    CHECK(a == b);
    CHECK_THAT(a, ContainsSubstring(",kernel,steps,seed,state_hash\n"));
    CHECK_THAT(a, ContainsSubstring("slx-sim-1,trapezoid,2,16,1,"));
    CHECK_THAT(a, ContainsSubstring(",ca,5,3,"));
}

TEST_CASE("optimizer CSV freezes the ranked rows") {
    auto out = csv_optimize(optimize_params(2, 2, 2, 4096), 4096);
    CHECK(out ==
          "schema,m,inv_r,beta,n_eval,alpha_num,alpha_den,alpha_decimal,n0_found,n0\n"
          "slx-opt-1,2,2,2,4096,0,1,0.000000000,1,2\n");
}

TEST_CASE("text report carries verdicts and witnesses") {
    auto rows = verify_sweep(map_kind::h2d, 2, {16});
    auto text = text_report(rows, true);
    CHECK_THAT(text, ContainsSubstring("map=h2d m=2 n=16 rho=1 blocks=120 void=0"));
    CHECK_THAT(text, ContainsSubstring(" Exact\n"));

    measure_row bad = rows[0];
    bad.exact = false;
    bad.witness = {2, 5, 0};
    bad.multiplicity = 0;
    CHECK_THAT(text_report({bad}, true),
               ContainsSubstring("NotExact witness=(2,5) mult=0"));
}

TEST_CASE("stacked-level layout renders both spaces with level colors") {
    auto svg = render_svg(make_grid(map_kind::h2d, 2, 16));
    CHECK_THAT(svg, ContainsSubstring("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
    CHECK_THAT(svg, ContainsSubstring("<!-- map=h2d m=2 n=16 rho=1 -->"));
    CHECK(count_occurrences(svg, "<rect") == 360);
    CHECK(count_occurrences(svg, detail::render_domain_fill) == 120);
    for (int level = 0; level < 4; ++level)
        CHECK(count_occurrences(svg, detail::render_palette[level]) > 0);
    CHECK(count_occurrences(svg, detail::render_palette[4]) == 0);
    CHECK(count_occurrences(svg, detail::render_void_fill) == 0);
    CHECK(render_svg(make_grid(map_kind::h2d, 2, 16)) == svg);
}

TEST_CASE("trapezoid layout uses one color per band") {
    auto svg = render_svg(make_grid(map_kind::h2d_trapezoid, 2, 27, 1, 1));
    CHECK(count_occurrences(svg, "<rect") == 3 * 351);
    for (int band = 0; band < 3; ++band)
        CHECK(count_occurrences(svg, detail::render_palette[band]) > 0);
    CHECK(count_occurrences(svg, detail::render_palette[3]) == 0);
}

TEST_CASE("3D layout renders per-layer slices with void blocks greyed") {
    auto svg = render_svg(make_grid(map_kind::h3d, 3, 8));
    CHECK_THAT(svg, ContainsSubstring("one panel per z"));
    CHECK(count_occurrences(svg, detail::render_void_fill) == 12);
    CHECK(count_occurrences(svg, "<rect") == 84 + 96 + 84);
}

TEST_CASE("render rejects oversized boards") {
    CHECK_THROWS_AS(render_svg(make_grid(map_kind::bb, 2, 257)), std::invalid_argument);
    CHECK(render_svg(make_grid(map_kind::bb, 2, 256)).size() > 0);
}
