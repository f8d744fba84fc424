#include <catch2/catch_amalgamated.hpp>

#include <simplexmap/maps.hpp>

#include <vector>

using namespace simplexmap;

namespace {

// Marks every non-Void image of a 2D strict-view map over its grid and
// checks exact cover of { 0 <= x < y <= n-1 }.
struct strict_cover2 {
    i64 n;
    std::vector<u32> marks;
    u64 voids = 0, out_of_domain = 0, total = 0;

    explicit strict_cover2(i64 n_) : n(n_), marks(std::size_t(tri_cells(n_ - 1)), 0) {}

    void add(const map_outcome& o) {
        ++total;
        if (o.is_void) {
            ++voids;
            return;
        }
        if (!(0 <= o.target.x && o.target.x < o.target.y && o.target.y <= n - 1)) {
            ++out_of_domain;
            return;
        }
        ++marks[tri_linear_index(o.target.x, o.target.y - 1)];
    }

    bool exact() const {
        if (out_of_domain != 0) return false;
        for (u32 m : marks)
            if (m != 1) return false;
        return true;
    }
};

} // namespace

TEST_CASE("bounding box map") {
    CHECK(map_bb({1, 3, 0}, 8, 2).target == data_coord{1, 3, 0});
    CHECK_FALSE(map_bb({1, 3, 0}, 8, 2).is_void);
    CHECK(map_bb({7, 2, 0}, 8, 2).is_void);
    CHECK_THROWS_AS(map_bb({8, 0, 0}, 8, 2), std::invalid_argument);
    CHECK_THROWS_AS(map_bb({0, 0, 0}, 8, 4), std::invalid_argument);

    u64 useful = 0;
    for (i64 z = 0; z < 8; ++z)
        for (i64 y = 0; y < 8; ++y)
            for (i64 x = 0; x < 8; ++x)
                if (!map_bb({x, y, z}, 8, 3).is_void) ++useful;
    CHECK(useful == u64(tet_cells(8)));
    CHECK(grid_bb(8, 3).blocks() == 512);

    // n = 1 degenerate: a single member block.
    CHECK_FALSE(map_bb({0, 0, 0}, 1, 2).is_void);
    CHECK(grid_bb(1, 2).blocks() == 1);
}

TEST_CASE("rectangular box fold") {
    CHECK(map_rb_2d({2, 5, 0}, 8) == data_coord{2, 5, 0});
    CHECK(map_rb_2d({3, 1, 0}, 8) == data_coord{5, 6, 0});
    CHECK_THROWS_AS(map_rb_2d({4, 0, 0}, 8), std::invalid_argument);

    for (i64 n : {1, 2, 3, 4, 6, 7, 8, 27, 64, 101, 255, 256, 257}) {
        grid_spec g = grid_rb(n);
        CHECK(g.blocks() == u64(tri_cells(n)));
        std::vector<u32> marks(std::size_t(tri_cells(n)), 0);
        for (i64 oy = 0; oy < g.extents[1]; ++oy)
            for (i64 ox = 0; ox < g.extents[0]; ++ox) {
                data_coord d = map_rb_2d({ox, oy, 0}, n);
                REQUIRE(tri_contains(n, d.x, d.y));
                ++marks[tri_linear_index(d.x, d.y)];
            }
        for (u32 m : marks) REQUIRE(m == 1);
    }
}

TEST_CASE("lambda enumeration map") {
    CHECK(map_lambda_2d(0, 8) == data_coord{0, 0, 0});
    CHECK(map_lambda_2d(3, 8) == data_coord{0, 2, 0});
    CHECK_THROWS_AS(map_lambda_2d(36, 8), std::invalid_argument);

    // Round trip over the full 2^12 domain: index recoverable, rows ordered.
    i64 n = i64{1} << 12;
    u64 cells = u64(tri_cells(n));
    for (u64 i = 0; i < cells; ++i) {
        data_coord d = map_lambda_2d(i, n);
        REQUIRE(tri_contains(n, d.x, d.y));
        REQUIRE(tri_linear_index(d.x, d.y) == i);
    }
}

TEST_CASE("lambda fp32 faithful mode has a failure onset") {
    auto onset = lambda_fp32_failure_onset(u64{1} << 24);
    REQUIRE(onset.found);
    data_coord exact = map_lambda_2d(onset.index, i64{1} << 20);
    data_coord fp32 = map_lambda_2d_fp32(onset.index);
    CHECK((exact.x != fp32.x || exact.y != fp32.y));
    CHECK(onset.side == exact.y + 1);
    for (u64 i = onset.index > 64 ? onset.index - 64 : 0; i < onset.index; ++i) {
        data_coord a = map_lambda_2d(i, i64{1} << 20);
        data_coord b = map_lambda_2d_fp32(i);
        REQUIRE(a.x == b.x);
        REQUIRE(a.y == b.y);
    }
}

TEST_CASE("h2d grid shapes") {
    CHECK(grid_h2d(8).extents == std::array<i64, 3>{4, 7, 1});
    CHECK(grid_h2d(8).blocks() == 28);
    CHECK(grid_h2d(2).extents == std::array<i64, 3>{1, 1, 1});
    CHECK(grid_h2d(1024).blocks() == 523776);
    CHECK(grid_h2d(1024).blocks() == u64(simplex_volume(1023, 2)));
    CHECK_THROWS_AS(grid_h2d(9), std::invalid_argument);
    CHECK_THROWS_AS(grid_h2d(1), std::invalid_argument);
}

TEST_CASE("h2d map pinned points and exact cover") {
    CHECK(map_h2d({0, 0, 0}).target == data_coord{0, 1, 0});
    CHECK(map_h2d({3, 0, 0}).target == data_coord{6, 7, 0});
    CHECK(map_h2d({2, 1, 0}).target == data_coord{4, 6, 0});
    CHECK(map_h2d({1, 2, 0}).target == data_coord{1, 3, 0});
    CHECK(map_h2d({2, 1, 0}).level_b == 2);
    CHECK(map_h2d({2, 1, 0}).index_q == 1);

    for (i64 n = 2; n <= 4096; n *= 2) {
        grid_spec g = grid_h2d(n);
        strict_cover2 cover(n);
        for (i64 oy = 0; oy < g.extents[1]; ++oy)
            for (i64 ox = 0; ox < g.extents[0]; ++ox) {
                map_outcome o = map_h2d({ox, oy, 0});
                REQUIRE(is_pow2(u64(o.level_b)));
                REQUIRE(o.index_q * o.level_b <= ox);
                cover.add(o);
            }
        REQUIRE(cover.exact());
        REQUIRE(cover.voids == 0);
        REQUIRE(cover.total == u64(simplex_volume(n - 1, 2)));
    }
}

TEST_CASE("h2d padded covers general n") {
    CHECK(grid_h2d_padded(8).extents == grid_h2d(8).extents);
    CHECK(grid_h2d_padded(9).extents == std::array<i64, 3>{8, 15, 1});

    for (i64 n : {2, 3, 5, 27, 100, 255, 257}) {
        grid_spec g = grid_h2d_padded(n);
        strict_cover2 cover(n);
        for (i64 oy = 0; oy < g.extents[1]; ++oy)
            for (i64 ox = 0; ox < g.extents[0]; ++ox)
                cover.add(map_h2d_padded({ox, oy, 0}, n));
        REQUIRE(cover.exact());
        REQUIRE(cover.total == g.blocks());
        REQUIRE(cover.total - cover.voids == u64(tri_cells(n - 1)));
    }

    // Worst case just past a power of two: block count near 4x useful.
    i64 n = 257;
    grid_spec g = grid_h2d_padded(n);
    double ratio = double(g.blocks()) / double(u64(tri_cells(n - 1)));
    CHECK(ratio > 3.9);
    CHECK(ratio < 4.1);
}

TEST_CASE("trapezoid decomposition") {
    for (i64 T : {1, 4, 16}) {
        auto traps = decompose_trapezoids(16, T);
        REQUIRE(traps.size() == 1);
        CHECK(traps[0].band == 16);
        CHECK(traps[0].h2 == 0);
        CHECK(traps[0].valid_side == 16);
        CHECK(traps[0].ext_x == grid_h2d(16).extents[0]);
        CHECK(traps[0].ext_y == grid_h2d(16).extents[1]);
    }

    auto t27 = decompose_trapezoids(27, 1);
    REQUIRE(t27.size() == 3);
    CHECK(t27[0].delta_x == 0);
    CHECK(t27[0].band == 16);
    CHECK(t27[0].h2 == 11);
    CHECK(t27[1].delta_x == 16);
    CHECK(t27[1].band == 8);
    CHECK(t27[1].h2 == 3);
    CHECK(t27[2].delta_x == 24);
    CHECK(t27[2].band == 2);
    CHECK(t27[2].h2 == 1);

    auto t27p = decompose_trapezoids(27, 4);
    REQUIRE(t27p.size() == 3);
    CHECK(t27p[2].band == 4);
    CHECK(t27p[2].h2 == 0);
    CHECK(t27p[2].valid_side == 3);

    for (auto& t : t27) CHECK(t.h1 + t.h2 == t.ext_y - 1);
}

TEST_CASE("trapezoid map pinned boundary blocks") {
    auto traps = decompose_trapezoids(27, 1);
    // Last B1 row of the first band keeps k = 0; first B2 row folds.
    map_outcome a = map_h2d_trapezoid({0, 25, 0}, traps[0]);
    CHECK(a.target == data_coord{0, 26, 0});
    map_outcome b = map_h2d_trapezoid({0, 26, 0}, traps[0]);
    CHECK(b.target == data_coord{8, 16, 0});
    CHECK_THROWS_AS(map_h2d_trapezoid({0, 37, 0}, traps[0]), std::invalid_argument);

    // With zero offsets and k = 0 the band map is map_h2d.
    auto single = decompose_trapezoids(32, 1);
    REQUIRE(single.size() == 1);
    for (i64 oy = 0; oy < single[0].ext_y; ++oy)
        for (i64 ox = 0; ox < single[0].ext_x; ++ox) {
            map_outcome t = map_h2d_trapezoid({ox, oy, 0}, single[0]);
            map_outcome h = map_h2d({ox, oy, 0});
            REQUIRE(t.target == h.target);
        }
}

TEST_CASE("trapezoid union tiles every n") {
    for (i64 n = 2; n <= 512; ++n) {
        for (i64 T : {1, 4, 16}) {
            auto traps = decompose_trapezoids(n, T);
            REQUIRE(i64(traps.size()) <= ceil_log2(u64(n)));
            strict_cover2 cover(n);
            for (const auto& t : traps)
                for (i64 oy = 0; oy < t.ext_y; ++oy)
                    for (i64 ox = 0; ox < t.ext_x; ++ox)
                        cover.add(map_h2d_trapezoid({ox, oy, 0}, t));
            REQUIRE(cover.exact());
        }
    }
}

TEST_CASE("h3d grid shapes") {
    CHECK(grid_h3d(4).extents == std::array<i64, 3>{2, 2, 3});
    CHECK(grid_h3d(64).blocks() == 49152);
    CHECK_THROWS_AS(grid_h3d(2), std::invalid_argument);
    CHECK_THROWS_AS(grid_h3d(24), std::invalid_argument);
}

TEST_CASE("h3d map pinned points and exact cover") {
    CHECK(map_h3d({0, 0, 0}, 8).target == data_coord{0, 5, 0});
    CHECK_THROWS_AS(map_h3d({0, 0, 99}, 8), std::invalid_argument);

    const u64 expected_voids[] = {2, 12, 88, 688, 5472};
    int vi = 0;
    for (i64 n : {4, 8, 16, 32, 64}) {
        grid_spec g = grid_h3d(n);
        std::vector<u32> marks(std::size_t(tet_cells(n - 1)), 0);
        u64 voids = 0;
        for (i64 oz = 0; oz < g.extents[2]; ++oz)
            for (i64 oy = 0; oy < g.extents[1]; ++oy)
                for (i64 ox = 0; ox < g.extents[0]; ++ox) {
                    map_outcome o = map_h3d({ox, oy, oz}, n);
                    if (o.is_void) {
                        ++voids;
                        continue;
                    }
                    REQUIRE(is_pow2(u64(o.level_b)));
                    // strict view: 0 <= x < y <= n-1-z
                    REQUIRE(0 <= o.target.x);
                    REQUIRE(o.target.x < o.target.y);
                    REQUIRE(o.target.z >= 0);
                    REQUIRE(o.target.y <= n - 1 - o.target.z);
                    ++marks[tet_linear_index(n - 1, o.target.x, o.target.y - 1, o.target.z)];
                }
        for (u32 m : marks) REQUIRE(m == 1);
        REQUIRE(voids == expected_voids[vi++]);
        REQUIRE(g.blocks() - voids == u64(tet_cells(n - 1)));
    }
}

TEST_CASE("h3d overhead ratio approaches 9/8 from above") {
    double prev = 10.0;
    for (i64 n : {4, 8, 16, 32, 64, 128}) {
        double ratio = double(grid_h3d(n).blocks()) / double(u64(tet_cells(n - 1)));
        CHECK(ratio < prev);
        CHECK(ratio > 1.125);
        prev = ratio;
    }
    CHECK(prev < 1.125 * 1.10); // within 10% at n = 128
}

TEST_CASE("linearizers round-trip") {
    for (i64 side : {1, 2, 5, 9}) {
        u64 idx = 0;
        for (i64 y = 0; y < side; ++y)
            for (i64 x = 0; x <= y; ++x) {
                REQUIRE(tri_linear_index(x, y) == idx);
                data_coord c = tri_coord_at(idx);
                REQUIRE(c == data_coord{x, y, 0});
                ++idx;
            }
        REQUIRE(idx == u64(tri_cells(side)));

        idx = 0;
        for (i64 z = 0; z < side; ++z)
            for (i64 y = 0; y + z < side; ++y)
                for (i64 x = 0; x <= y; ++x) {
                    REQUIRE(tet_linear_index(side, x, y, z) == idx);
                    data_coord c = tet_coord_at(side, idx);
                    REQUIRE(c == data_coord{x, y, z});
                    ++idx;
                }
        REQUIRE(idx == u64(tet_cells(side)));
    }
}
