#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vtopo/errors.hpp"

namespace vtopo {

// Integer pixel coordinate, x to the right, y downward.
struct Pixel {
    int x = 0;
    int y = 0;

    bool operator==(const Pixel&) const = default;
};

// Row-major binary raster. Pixels hold exactly 0 (background) or 1
// (foreground); everything outside the raster is treated as background by
// the algorithms in this library.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), pixels(checked_size(w, h), 0) {}

    // Validated before any allocation happens, so absurd dimensions raise
    // DomainError rather than bad_alloc/length_error from the vector.
    static std::size_t checked_size(int w, int h) {
        if (w <= 0 || h <= 0)
            throw DomainError("mask dimensions must be positive, got " +
                              std::to_string(w) + "x" + std::to_string(h));
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }

    std::size_t size() const { return pixels.size(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool in_bounds(Pixel p) const { return in_bounds(p.x, p.y); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }

    std::uint8_t at(int x, int y) const { return pixels[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels[index(x, y)]; }

    // Out-of-border reads as background.
    std::uint8_t at_or_bg(int x, int y) const {
        return in_bounds(x, y) ? pixels[index(x, y)] : std::uint8_t{0};
    }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (std::uint8_t p : pixels) n += p;
        return n;
    }

    bool any_foreground() const {
        for (std::uint8_t p : pixels)
            if (p) return true;
        return false;
    }

    bool operator==(const BinaryMask&) const = default;
};

// Row-major raster of real-valued activations, expected in [0, 1].
struct SoftMask {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    SoftMask() = default;
    SoftMask(int w, int h)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0) {
        if (w <= 0 || h <= 0)
            throw DomainError("mask dimensions must be positive, got " +
                              std::to_string(w) + "x" + std::to_string(h));
    }

    static SoftMask from(const BinaryMask& m) {
        SoftMask s(m.width, m.height);
        for (std::size_t i = 0; i < m.pixels.size(); ++i)
            s.values[i] = m.pixels[i] ? 1.0 : 0.0;
        return s;
    }

    std::size_t size() const { return values.size(); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }

    double at(int x, int y) const { return values[index(x, y)]; }
    double& at(int x, int y) { return values[index(x, y)]; }

    double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

inline void require_same_shape(int wa, int ha, int wb, int hb, const char* op) {
    if (wa != wb || ha != hb)
        throw ShapeError(std::string(op) + ": shape mismatch, " +
                         std::to_string(wa) + "x" + std::to_string(ha) + " vs " +
                         std::to_string(wb) + "x" + std::to_string(hb));
}

inline void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* op) {
    require_same_shape(a.width, a.height, b.width, b.height, op);
}

inline void require_same_shape(const SoftMask& a, const SoftMask& b, const char* op) {
    require_same_shape(a.width, a.height, b.width, b.height, op);
}

// Axis-aligned patch rectangle inside a raster.
struct PatchRect {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    bool operator==(const PatchRect&) const = default;
};

// Regular tiling of a raster. Border patches are truncated, never dropped,
// so every pixel belongs to exactly one patch.
struct PatchGrid {
    int patch_size = 0;
    int cols = 0;
    int rows = 0;
    std::vector<PatchRect> patches; // row-major patch order

    std::size_t count() const { return patches.size(); }
};

inline PatchGrid tile_patches(int width, int height, int patch_size) {
    if (width <= 0 || height <= 0)
        throw DomainError("tile_patches: raster dimensions must be positive");
    if (patch_size <= 0)
        throw DomainError("tile_patches: patch size must be positive");

    PatchGrid grid;
    grid.patch_size = patch_size;
    grid.cols = (width + patch_size - 1) / patch_size;
    grid.rows = (height + patch_size - 1) / patch_size;
    grid.patches.reserve(static_cast<std::size_t>(grid.cols) * grid.rows);
    for (int py = 0; py < grid.rows; ++py) {
        for (int px = 0; px < grid.cols; ++px) {
            PatchRect r;
            r.x0 = px * patch_size;
            r.y0 = py * patch_size;
            r.w = std::min(patch_size, width - r.x0);
            r.h = std::min(patch_size, height - r.y0);
            grid.patches.push_back(r);
        }
    }
    return grid;
}

} // namespace vtopo
