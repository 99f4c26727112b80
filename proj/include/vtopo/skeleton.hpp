#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"

namespace vtopo {

namespace detail {

// 8-neighborhood in the classic thinning order: N, NE, E, SE, S, SW, W, NW.
inline constexpr int kNbrDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
inline constexpr int kNbrDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

// Packs the 8 neighbors of (x, y) into bits 0..7 (order above); pixels
// outside the raster read as background.
inline unsigned neighborhood_bits(const BinaryMask& m, int x, int y) {
    unsigned bits = 0;
    for (int k = 0; k < 8; ++k)
        bits |= static_cast<unsigned>(m.at_or_bg(x + kNbrDx[k], y + kNbrDy[k])) << k;
    return bits;
}

inline int neighbor_count(unsigned bits) { return __builtin_popcount(bits); }

// Number of 0 -> 1 transitions walking the neighborhood circularly.
inline int transition_count(unsigned bits) {
    int t = 0;
    for (int k = 0; k < 8; ++k) {
        const unsigned a = (bits >> k) & 1u;
        const unsigned b = (bits >> ((k + 1) & 7)) & 1u;
        if (!a && b) ++t;
    }
    return t;
}

// One pixel's deletability under the two-subiteration thinning rule.
// `step` 0 deletes south/east boundary pixels, step 1 north/west ones.
inline bool thinning_deletable(unsigned bits, int step) {
    const int b = neighbor_count(bits);
    if (b < 2 || b > 6) return false;
    if (transition_count(bits) != 1) return false;
    const unsigned n = bits & 1u;        // N
    const unsigned e = (bits >> 2) & 1u; // E
    const unsigned s = (bits >> 4) & 1u; // S
    const unsigned w = (bits >> 6) & 1u; // W
    if (step == 0) {
        if (n && e && s) return false;
        if (e && s && w) return false;
    } else {
        if (n && e && w) return false;
        if (n && s && w) return false;
    }
    return true;
}

} // namespace detail

// Morphological thinning to a 1-pixel-wide skeleton (two-subiteration
// parallel thinning; deletions within a subiteration are simultaneous, and
// iteration stops when a full pass deletes nothing).
//
// Only boundary pixels can ever be deleted, so a frontier worklist is kept:
// foreground pixels with at least one background 8-neighbor. Deleting a
// pixel can only expose its own 8-neighbors, which rejoin the frontier.
// Every pixel deletable in a subiteration is on the frontier, so the result
// is identical to re-scanning the full raster each pass.
inline BinaryMask skeletonize(const BinaryMask& mask) {
    BinaryMask out = mask;
    const int w = out.width;
    const int h = out.height;

    std::vector<std::uint32_t> frontier;
    std::vector<std::uint8_t> queued(out.size(), 0);
    frontier.reserve(1024);

    auto is_boundary = [&](int x, int y) {
        for (int k = 0; k < 8; ++k)
            if (!out.at_or_bg(x + detail::kNbrDx[k], y + detail::kNbrDy[k])) return true;
        return false;
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (out.at(x, y) && is_boundary(x, y)) {
                const std::size_t i = out.index(x, y);
                queued[i] = 1;
                frontier.push_back(static_cast<std::uint32_t>(i));
            }

    std::vector<std::uint32_t> deleted;
    std::vector<std::uint32_t> next;
    for (;;) {
        bool changed = false;
        for (int step = 0; step < 2; ++step) {
            deleted.clear();
            next.clear();
            for (const std::uint32_t i : frontier) {
                if (!out.pixels[i]) continue; // removed in the other subiteration
                const int x = static_cast<int>(i % w);
                const int y = static_cast<int>(i / w);
                if (detail::thinning_deletable(detail::neighborhood_bits(out, x, y), step))
                    deleted.push_back(i);
                else
                    next.push_back(i);
            }
            for (const std::uint32_t i : deleted) {
                out.pixels[i] = 0;
                queued[i] = 0;
            }
            for (const std::uint32_t i : deleted) {
                const int x = static_cast<int>(i % w);
                const int y = static_cast<int>(i / w);
                for (int k = 0; k < 8; ++k) {
                    const int nx = x + detail::kNbrDx[k];
                    const int ny = y + detail::kNbrDy[k];
                    if (!out.in_bounds(nx, ny)) continue;
                    const std::size_t ni = out.index(nx, ny);
                    if (out.pixels[ni] && !queued[ni]) {
                        queued[ni] = 1;
                        next.push_back(static_cast<std::uint32_t>(ni));
                    }
                }
            }
            frontier.swap(next);
            if (!deleted.empty()) changed = true;
        }
        if (!changed) break;
    }
    return out;
}

// Unit direction a skeleton endpoint points away from its branch, plus a
// validity flag (false when no inward step exists).
struct TipDirection {
    double x = 0.0;
    double y = 0.0;
    bool valid = false;
};

// A skeleton tip: its position and outward direction.
struct Endpoint {
    Pixel pos;
    TipDirection dir;
};

namespace detail {

inline int skeleton_neighbors(const BinaryMask& m, int x, int y, Pixel* found) {
    int n = 0;
    for (int k = 0; k < 8; ++k) {
        const int nx = x + kNbrDx[k];
        const int ny = y + kNbrDy[k];
        if (m.at_or_bg(nx, ny)) {
            if (found && n < 8) found[n] = {nx, ny};
            ++n;
        }
    }
    return n;
}

} // namespace detail

// Outward unit direction at a skeleton tip, estimated by walking up to
// `depth` steps inward along the unique path (stopping early at a junction
// or when the path ends) and normalizing tip - walk_end. A tip with no
// inward step yields an invalid (0, 0) direction. `tip` must be a skeleton
// pixel with exactly one foreground 8-neighbor.
inline TipDirection endpoint_direction(const BinaryMask& skeleton, Pixel tip, int depth = 5) {
    if (!skeleton.in_bounds(tip))
        throw BoundsError("endpoint_direction: tip (" + std::to_string(tip.x) + "," +
                          std::to_string(tip.y) + ") outside raster");
    if (depth < 0)
        throw DomainError("endpoint_direction: depth must be non-negative");
    Pixel nbrs[8];
    if (!skeleton.at(tip.x, tip.y) ||
        detail::skeleton_neighbors(skeleton, tip.x, tip.y, nbrs) != 1)
        throw ContractError("endpoint_direction: (" + std::to_string(tip.x) + "," +
                            std::to_string(tip.y) + ") is not a skeleton endpoint");

    Pixel prev = tip;
    Pixel cur = tip;
    int steps = 0;
    for (int i = 0; i < depth; ++i) {
        Pixel cand[8];
        const int n = detail::skeleton_neighbors(skeleton, cur.x, cur.y, cand);
        Pixel next{};
        int continuations = 0;
        for (int k = 0; k < n; ++k) {
            if (cand[k] == prev) continue;
            next = cand[k];
            ++continuations;
        }
        if (continuations != 1) break; // 0 = path end, >= 2 = junction
        prev = cur;
        cur = next;
        ++steps;
    }

    TipDirection dir;
    if (steps == 0) return dir; // isolated stub; no direction
    const double dx = static_cast<double>(tip.x - cur.x);
    const double dy = static_cast<double>(tip.y - cur.y);
    const double len = std::sqrt(dx * dx + dy * dy);
    dir.x = dx / len;
    dir.y = dy / len;
    dir.valid = true;
    return dir;
}

// All skeleton pixels with exactly one foreground 8-neighbor, in raster
// order, each with its outward direction.
inline std::vector<Endpoint> find_endpoints(const BinaryMask& skeleton,
                                            int direction_depth = 5) {
    std::vector<Endpoint> eps;
    for (int y = 0; y < skeleton.height; ++y) {
        for (int x = 0; x < skeleton.width; ++x) {
            if (!skeleton.at(x, y)) continue;
            if (detail::skeleton_neighbors(skeleton, x, y, nullptr) != 1) continue;
            Endpoint e;
            e.pos = {x, y};
            e.dir = endpoint_direction(skeleton, e.pos, direction_depth);
            eps.push_back(e);
        }
    }
    return eps;
}

} // namespace vtopo
