#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtopo/ccl.hpp"
#include "vtopo/draw.hpp"
#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"
#include "vtopo/pcg32.hpp"
#include "vtopo/skeleton.hpp"

namespace vtopo {

struct FragmentParams {
    int breaks = 3;
    int min_radius = 2;
    int max_radius = 5;
    std::uint64_t seed = 0;
};

// One accepted break: the disk that was cleared and the component counts
// around it.
struct BreakRecord {
    Pixel center;
    int radius = 0;
    int components_before = 0;
    int components_after = 0;
};

struct FragmentResult {
    BinaryMask mask;
    std::vector<BreakRecord> records;
};

// Synthesizes vessel discontinuities: disk-shaped cuts centered on skeleton
// pixels of the intact mask. A candidate cut is accepted only if it
// strictly increases the 8-connected component count of the working mask
// (so every accepted break is a real disconnection) and its disk shares no
// pixel with a previously accepted disk. Drawing stops after `breaks`
// acceptances or 50 * breaks attempts, whichever comes first, so a mask
// that cannot be cut that many times terminates gracefully with fewer
// records. Fully deterministic for fixed inputs and seed.
inline FragmentResult generate_breaks(const BinaryMask& gt, const FragmentParams& params) {
    if (!gt.any_foreground())
        throw EmptyInputError("generate_breaks: ground-truth mask is empty");
    if (params.breaks < 0)
        throw DomainError("generate_breaks: breaks must be non-negative");
    if (params.min_radius < 1 || params.max_radius < params.min_radius)
        throw DomainError("generate_breaks: need 1 <= min_radius <= max_radius, got [" +
                          std::to_string(params.min_radius) + ", " +
                          std::to_string(params.max_radius) + "]");

    FragmentResult result;
    result.mask = gt;
    if (params.breaks == 0) return result;

    const BinaryMask skeleton = skeletonize(gt);
    std::vector<Pixel> sites;
    for (int y = 0; y < skeleton.height; ++y)
        for (int x = 0; x < skeleton.width; ++x)
            if (skeleton.at(x, y)) sites.push_back({x, y});
    if (sites.empty()) return result; // blob too small to have a skeleton

    Pcg32 rng(params.seed);
    BinaryMask& work = result.mask;
    BinaryMask used_disks(gt.width, gt.height); // union of accepted disks
    std::vector<std::size_t> cleared;           // scratch for rollback

    int components = component_count(work, 8);
    const long budget = 50L * params.breaks;
    long attempts = 0;
    while (static_cast<int>(result.records.size()) < params.breaks && attempts < budget) {
        ++attempts;
        const Pixel center = sites[rng.bounded(static_cast<std::uint32_t>(sites.size()))];
        const int radius =
            params.min_radius +
            static_cast<int>(rng.bounded(
                static_cast<std::uint32_t>(params.max_radius - params.min_radius + 1)));

        // Reject any overlap with an earlier accepted disk, then clear the
        // disk provisionally and keep it only if it splits a component.
        const int r2 = radius * radius;
        bool overlaps = false;
        for (int dy = -radius; dy <= radius && !overlaps; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                const int x = center.x + dx;
                const int y = center.y + dy;
                if (used_disks.in_bounds(x, y) && used_disks.at(x, y)) {
                    overlaps = true;
                    break;
                }
            }
        if (overlaps) continue;

        cleared.clear();
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                const int x = center.x + dx;
                const int y = center.y + dy;
                if (!work.in_bounds(x, y)) continue;
                const std::size_t i = work.index(x, y);
                if (work.pixels[i]) {
                    work.pixels[i] = 0;
                    cleared.push_back(i);
                }
            }
        if (cleared.empty()) continue;

        const int after = component_count(work, 8);
        if (after <= components) {
            for (const std::size_t i : cleared) work.pixels[i] = 1; // roll back
            continue;
        }

        BreakRecord rec;
        rec.center = center;
        rec.radius = radius;
        rec.components_before = components;
        rec.components_after = after;
        result.records.push_back(rec);
        components = after;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                const int x = center.x + dx;
                const int y = center.y + dy;
                if (used_disks.in_bounds(x, y)) used_disks.at(x, y) = 1;
            }
    }
    return result;
}

// Union of the recorded break disks on an empty raster of the given size —
// the "damaged regions" map that downstream masking consumes.
inline BinaryMask break_region_mask(const std::vector<BreakRecord>& records, int width,
                                    int height) {
    BinaryMask out(width, height);
    const auto stamp = [&](const BreakRecord& rec) {
        if (!out.in_bounds(rec.center))
            throw BoundsError("break_region_mask: center (" + std::to_string(rec.center.x) +
                              "," + std::to_string(rec.center.y) + ") outside " +
                              std::to_string(width) + "x" + std::to_string(height));
        const int r2 = rec.radius * rec.radius;
        for (int dy = -rec.radius; dy <= rec.radius; ++dy)
            for (int dx = -rec.radius; dx <= rec.radius; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                const int x = rec.center.x + dx;
                const int y = rec.center.y + dy;
                if (out.in_bounds(x, y)) out.at(x, y) = 1;
            }
    };
    for (const BreakRecord& rec : records) stamp(rec);
    return out;
}

} // namespace vtopo
