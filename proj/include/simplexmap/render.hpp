#pragma once

// SVG 1.1 layout diagrams: grid space and data space side by side, one unit
// square per block. Blocks are colored by stack level (trapezoid grids: one
// color per trapezoid); Void blocks are grey; uncovered domain cells show as
// a faint background. 3D grids render as per-layer slices. Output is
// byte-deterministic for a given grid.

#include <string>

#include "simulator.hpp"

namespace simplexmap {

constexpr i64 render_max_n = 256;

namespace detail {

constexpr const char* render_palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                          "#b07aa1", "#edc948", "#76b7b2", "#ff9da7",
                                          "#9c755f", "#86bcb6"};
constexpr int render_palette_size = 10;
constexpr const char* render_void_fill = "#d8d8d8";
constexpr const char* render_domain_fill = "#f0f0f0";

inline void svg_rect(std::string& out, i64 x, i64 y, const char* fill) {
    out += "<rect x=\"";
    out += std::to_string(x);
    out += "\" y=\"";
    out += std::to_string(y);
    out += "\" width=\"1\" height=\"1\" fill=\"";
    out += fill;
    out += "\"/>\n";
}

inline void svg_caption(std::string& out, i64 x, i64 y, const std::string& text) {
    out += "<text x=\"";
    out += std::to_string(x);
    out += "\" y=\"";
    out += std::to_string(y);
    out += "\" font-family=\"monospace\" font-size=\"2\" fill=\"#222222\">";
    out += text;
    out += "</text>\n";
}

inline const char* block_fill(const grid_spec& g, int trap, const map_outcome& o) {
    if (o.is_void) return render_void_fill;
    int idx = g.kind == map_kind::h2d_trapezoid ? trap
                                                : int(floor_log2(u64(o.level_b < 1 ? 1 : o.level_b)));
    return render_palette[idx % render_palette_size];
}

} // namespace detail

// Echo line identifying the rendered configuration.
inline std::string render_echo(const grid_spec& g) {
    std::string echo = "map=";
    echo += map_kind_name(g.kind);
    echo += " m=" + std::to_string(g.dims);
    echo += " n=" + std::to_string(g.n);
    echo += " rho=" + std::to_string(g.rho);
    if (g.kind == map_kind::h2d_trapezoid) echo += " T=" + std::to_string(g.threshold);
    return echo;
}

inline std::string render_svg(const grid_spec& g) {
    if (g.n > render_max_n)
        throw std::invalid_argument(
            "render: n > 256 produces an impractical diagram; pick a smaller n");

    const i64 side = g.domain_side();
    const i64 caption_h = 3;
    const i64 gap = 2;

    // Grid-space panel extent; trapezoid grids stack their bands vertically.
    i64 grid_w = 0, grid_h = 0;
    if (g.kind == map_kind::h2d_trapezoid) {
        for (const auto& t : g.traps) {
            grid_w = std::max(grid_w, t.ext_x);
            grid_h += t.ext_y + 1;
        }
        grid_h -= 1;
    } else if (g.dims == 2) {
        grid_w = g.extents[0];
        grid_h = g.extents[1];
    } else {
        grid_w = g.extents[2] * (g.extents[0] + 1) - 1;
        grid_h = g.extents[1];
    }

    const i64 data_w = g.dims == 2 ? side : side * (side + 1) - 1;
    const i64 data_h = side;

    i64 width, height, data_x0, data_y0;
    if (g.dims == 2) {
        data_x0 = grid_w + gap;
        data_y0 = caption_h;
        width = data_x0 + data_w;
        height = caption_h + std::max(grid_h, data_h);
    } else {
        data_x0 = 0;
        data_y0 = caption_h + grid_h + caption_h;
        width = std::max(grid_w, data_w);
        height = data_y0 + data_h;
    }

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 ";
    out += std::to_string(width) + " " + std::to_string(height);
    out += "\" width=\"" + std::to_string(width * 8) + "\" height=\"" +
           std::to_string(height * 8) + "\" shape-rendering=\"crispEdges\">\n";
    out += "<!-- " + render_echo(g) + " -->\n";
    detail::svg_caption(out, 0, 2, "grid space " + render_echo(g));
    if (g.dims == 2)
        detail::svg_caption(out, data_x0, 2, "data space side " + std::to_string(side));
    else
        detail::svg_caption(out, 0, data_y0 - 1,
                            "data space side " + std::to_string(side) + ", one panel per z");

    // Faint background for every domain cell.
    if (g.dims == 2) {
        for (i64 y = 0; y < side; ++y)
            for (i64 x = 0; x <= y; ++x)
                detail::svg_rect(out, data_x0 + x, data_y0 + y, detail::render_domain_fill);
    } else {
        for (i64 z = 0; z < side; ++z) {
            const i64 ox = data_x0 + z * (side + 1);
            for (i64 y = 0; y + z < side; ++y)
                for (i64 x = 0; x <= y; ++x)
                    detail::svg_rect(out, ox + x, data_y0 + y, detail::render_domain_fill);
        }
    }

    // Trapezoid band origins in the stacked grid panel.
    std::vector<i64> trap_y0;
    if (g.kind == map_kind::h2d_trapezoid) {
        i64 acc = caption_h;
        for (const auto& t : g.traps) {
            trap_y0.push_back(acc);
            acc += t.ext_y + 1;
        }
    }

    detail::for_each_block_outcome(g, 0, [&](block_coord w, int trap, const map_outcome& o) {
        const char* fill = detail::block_fill(g, trap, o);
        if (g.kind == map_kind::h2d_trapezoid)
            detail::svg_rect(out, w.x, trap_y0[std::size_t(trap)] + w.y, fill);
        else if (g.dims == 2)
            detail::svg_rect(out, w.x, caption_h + w.y, fill);
        else
            detail::svg_rect(out, w.z * (g.extents[0] + 1) + w.x, caption_h + w.y, fill);
        if (o.is_void) return;
        data_coord d = o.target;
        if (strict_view(g.kind)) d.y -= 1;
        if (g.dims == 2)
            detail::svg_rect(out, data_x0 + d.x, data_y0 + d.y, fill);
        else
            detail::svg_rect(out, data_x0 + d.z * (side + 1) + d.x, data_y0 + d.y, fill);
    });

    out += "</svg>\n";
    return out;
}

} // namespace simplexmap
