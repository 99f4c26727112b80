#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vtopo/mask.hpp"

namespace vtopo {

// Exact squared Euclidean distance from every foreground pixel to the
// nearest background pixel, with everything outside the raster counting as
// background. Background pixels get 0. Row-major result.
//
// Two-pass algorithm: a vertical scan records, per pixel, the distance to
// the nearest background in its own column (the virtual background rows at
// y = -1 and y = height bound it), then a horizontal pass computes the lower
// envelope of the parabolas those distances define. The virtual background
// columns at x = -1 and x = width are folded in at the end; no out-of-raster
// point can beat the nearest axis-aligned one, so that min is exact.
inline std::vector<std::int64_t> squared_distance_transform(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<std::int32_t> col(static_cast<std::size_t>(w) * h);

    for (int x = 0; x < w; ++x) {
        // down: distance to nearest background at or above, seeded by the
        // virtual row just outside the top edge
        std::int32_t d = 0;
        for (int y = 0; y < h; ++y) {
            ++d;
            if (!mask.at(x, y)) d = 0;
            col[mask.index(x, y)] = d;
        }
        // up: same from below, keep the minimum
        d = 0;
        for (int y = h - 1; y >= 0; --y) {
            ++d;
            if (!mask.at(x, y)) d = 0;
            auto& c = col[mask.index(x, y)];
            if (d < c) c = d;
        }
    }

    std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h);
    std::vector<int> v(static_cast<std::size_t>(w));      // parabola sites
    std::vector<double> z(static_cast<std::size_t>(w) + 1); // envelope breakpoints
    std::vector<std::int64_t> f(static_cast<std::size_t>(w));

    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const std::int64_t c = col[row + x];
            f[x] = c * c;
        }

        int k = 0;
        v[0] = 0;
        z[0] = -1e30;
        z[1] = 1e30;
        for (int q = 1; q < w; ++q) {
            double s;
            for (;;) {
                const int p = v[k];
                s = (static_cast<double>(f[q] - f[p]) +
                     static_cast<double>(static_cast<std::int64_t>(q) * q -
                                         static_cast<std::int64_t>(p) * p)) /
                    (2.0 * (q - p));
                if (s <= z[k] && k > 0) {
                    --k;
                    continue;
                }
                break;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = 1e30;
        }

        k = 0;
        for (int q = 0; q < w; ++q) {
            while (z[k + 1] < q) ++k;
            const std::int64_t dx = q - v[k];
            std::int64_t best = dx * dx + f[v[k]];
            // virtual background columns just outside the side edges
            const std::int64_t left = static_cast<std::int64_t>(q) + 1;
            const std::int64_t right = static_cast<std::int64_t>(w) - q;
            if (left * left < best) best = left * left;
            if (right * right < best) best = right * right;
            out[row + q] = mask.pixels[row + q] ? best : 0;
        }
    }
    return out;
}

// Euclidean distance to the nearest background pixel (see the squared
// variant for conventions).
inline std::vector<double> distance_transform(const BinaryMask& mask) {
    const auto sq = squared_distance_transform(mask);
    std::vector<double> out(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
        out[i] = std::sqrt(static_cast<double>(sq[i]));
    return out;
}

} // namespace vtopo
