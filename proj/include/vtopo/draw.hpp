#pragma once

#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"

namespace vtopo {

// All raster positions on the Bresenham line from p to q, inclusive of both
// endpoints. Works in every octant; a zero-length line yields one pixel.
inline std::vector<Pixel> bresenham_line(Pixel p, Pixel q) {
    std::vector<Pixel> pts;
    int x = p.x, y = p.y;
    const int dx = std::abs(q.x - p.x);
    const int dy = -std::abs(q.y - p.y);
    const int sx = p.x < q.x ? 1 : -1;
    const int sy = p.y < q.y ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        pts.push_back({x, y});
        if (x == q.x && y == q.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return pts;
}

namespace detail {

// Offsets of the disk {(dx,dy) : dx^2 + dy^2 <= r^2}.
inline std::vector<Pixel> disk_offsets(int radius) {
    std::vector<Pixel> offs;
    const int r2 = radius * radius;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= r2) offs.push_back({dx, dy});
    return offs;
}

// Stamps a disk into the mask, clipping at the raster edge.
inline void stamp_disk(BinaryMask& mask, Pixel center, const std::vector<Pixel>& offs) {
    for (const Pixel o : offs) {
        const int x = center.x + o.x;
        const int y = center.y + o.y;
        if (mask.in_bounds(x, y)) mask.at(x, y) = 1;
    }
}

} // namespace detail

// Union of the input with a stroke of the given radius along the Bresenham
// line from p to q (a disk is stamped at every line pixel, clipped to the
// raster). Never clears a pixel. Endpoints must lie inside the raster.
inline BinaryMask draw_bridge(const BinaryMask& mask, Pixel p, Pixel q, int radius) {
    if (!mask.in_bounds(p) || !mask.in_bounds(q))
        throw BoundsError("draw_bridge: endpoint (" + std::to_string(p.x) + "," +
                          std::to_string(p.y) + ")-(" + std::to_string(q.x) + "," +
                          std::to_string(q.y) + ") outside " + std::to_string(mask.width) +
                          "x" + std::to_string(mask.height) + " raster");
    if (radius < 0)
        throw DomainError("draw_bridge: radius must be non-negative");

    BinaryMask out = mask;
    const auto offs = detail::disk_offsets(radius);
    for (const Pixel pt : bresenham_line(p, q)) detail::stamp_disk(out, pt, offs);
    return out;
}

} // namespace vtopo
