#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vtopo/ccl.hpp"
#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"
#include "vtopo/skeleton.hpp"

namespace vtopo {

// Dice overlap 2|X∩Y| / (|X|+|Y|). Two empty masks are identical, so 1.
inline double dice(const BinaryMask& x, const BinaryMask& y) {
    require_same_shape(x, y, "dice");
    std::size_t inter = 0, nx = 0, ny = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        inter += x.pixels[i] & y.pixels[i];
        nx += x.pixels[i];
        ny += y.pixels[i];
    }
    if (nx + ny == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(nx + ny);
}

// Jaccard overlap |X∩Y| / |X∪Y|; 1 when both masks are empty.
inline double iou(const BinaryMask& x, const BinaryMask& y) {
    require_same_shape(x, y, "iou");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        inter += x.pixels[i] & y.pixels[i];
        uni += x.pixels[i] | y.pixels[i];
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Centerline Dice: harmonic mean of topology precision |S_p∩gt|/|S_p| and
// topology sensitivity |S_g∩pred|/|S_g|, where S_p and S_g are the thinning
// skeletons of prediction and ground truth. Both skeletons empty -> 1 (the
// degenerate inputs agree); exactly one empty -> 0.
inline double cldice(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_shape(pred, gt, "cldice");
    const BinaryMask sp = skeletonize(pred);
    const BinaryMask sg = skeletonize(gt);

    std::size_t sp_n = 0, sp_in_gt = 0, sg_n = 0, sg_in_pred = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        sp_n += sp.pixels[i];
        sp_in_gt += sp.pixels[i] & gt.pixels[i];
        sg_n += sg.pixels[i];
        sg_in_pred += sg.pixels[i] & pred.pixels[i];
    }

    if (sp_n == 0 && sg_n == 0) return 1.0;
    if (sp_n == 0 || sg_n == 0) return 0.0;
    const double tprec = static_cast<double>(sp_in_gt) / static_cast<double>(sp_n);
    const double tsens = static_cast<double>(sg_in_pred) / static_cast<double>(sg_n);
    if (tprec + tsens == 0.0) return 0.0;
    return 2.0 * tprec * tsens / (tprec + tsens);
}

// Patch-normalized connected-component discrepancy: the masks are tiled
// into patch_size x patch_size patches (border patches truncated) and the
// absolute difference in component count is averaged over all patches.
// 0 means every patch agrees; identical masks always score 0.
inline double betti0_normalized(const BinaryMask& pred, const BinaryMask& gt,
                                int patch_size = 64, int connectivity = 8) {
    require_same_shape(pred, gt, "betti0_normalized");
    const PatchGrid grid = tile_patches(pred.width, pred.height, patch_size);

    auto patch_components = [&](const BinaryMask& m, const PatchRect& r) {
        BinaryMask sub(r.w, r.h);
        for (int y = 0; y < r.h; ++y)
            for (int x = 0; x < r.w; ++x)
                sub.at(x, y) = m.at(r.x0 + x, r.y0 + y);
        return component_count(sub, connectivity);
    };

    std::int64_t total = 0;
    for (const PatchRect& r : grid.patches)
        total += std::abs(static_cast<std::int64_t>(patch_components(pred, r)) -
                          static_cast<std::int64_t>(patch_components(gt, r)));
    return static_cast<double>(total) / static_cast<double>(grid.count());
}

// Mean squared difference of two activation rasters.
inline double mse(const SoftMask& a, const SoftMask& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

namespace detail {

// 3x3 min / max filter with the window clipped at the raster edge,
// computed separably (1x3 then 3x1).
template <typename Cmp>
inline SoftMask filter3x3(const SoftMask& img, Cmp better) {
    SoftMask tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = img.at(x, y);
            if (x > 0 && better(img.at(x - 1, y), v)) v = img.at(x - 1, y);
            if (x + 1 < img.width && better(img.at(x + 1, y), v)) v = img.at(x + 1, y);
            tmp.at(x, y) = v;
        }
    }
    SoftMask out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = tmp.at(x, y);
            if (y > 0 && better(tmp.at(x, y - 1), v)) v = tmp.at(x, y - 1);
            if (y + 1 < img.height && better(tmp.at(x, y + 1), v)) v = tmp.at(x, y + 1);
            out.at(x, y) = v;
        }
    }
    return out;
}

inline SoftMask erode3x3(const SoftMask& img) {
    return filter3x3(img, [](double a, double b) { return a < b; });
}

inline SoftMask dilate3x3(const SoftMask& img) {
    return filter3x3(img, [](double a, double b) { return a > b; });
}

} // namespace detail

// Differentiable-style soft skeleton via iterated min/max-pool erosion:
// each round adds relu(img - open(img)) of the current image to the
// skeleton (scaled by what the skeleton still lacks), then erodes.
// iterations = 0 yields an all-zero raster. Values stay in [0, 1] for
// inputs in [0, 1], and the support never exceeds the input's.
inline SoftMask soft_skeleton(const SoftMask& img, int iterations) {
    if (iterations < 0)
        throw DomainError("soft_skeleton: iterations must be non-negative");
    SoftMask cur = img;
    SoftMask skel(img.width, img.height);
    for (int it = 0; it < iterations; ++it) {
        const SoftMask eroded = detail::erode3x3(cur);
        const SoftMask opened = detail::dilate3x3(eroded);
        for (std::size_t i = 0; i < skel.values.size(); ++i) {
            const double ridge = std::max(0.0, cur.values[i] - opened.values[i]);
            skel.values[i] += ridge * (1.0 - skel.values[i]);
        }
        cur = eroded;
    }
    for (double& v : skel.values) v = std::clamp(v, 0.0, 1.0);
    return skel;
}

// Soft centerline-Dice loss over activation rasters: 1 minus the harmonic
// mean of soft topology precision and sensitivity, each stabilized with
// eps = 1e-8. 0 is a perfect match; identical supports give ~0.
inline double soft_cldice_loss(const SoftMask& pred, const SoftMask& gt,
                               int iterations = 10) {
    require_same_shape(pred, gt, "soft_cldice_loss");
    constexpr double eps = 1e-8;
    const SoftMask sp = soft_skeleton(pred, iterations);
    const SoftMask sg = soft_skeleton(gt, iterations);

    double sp_sum = 0.0, sg_sum = 0.0, sp_gt = 0.0, sg_pred = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        sp_sum += sp.values[i];
        sg_sum += sg.values[i];
        sp_gt += sp.values[i] * gt.values[i];
        sg_pred += sg.values[i] * pred.values[i];
    }
    const double tprec = sp_gt / (sp_sum + eps);
    const double tsens = sg_pred / (sg_sum + eps);
    return 1.0 - 2.0 * tprec * tsens / (tprec + tsens + eps);
}

// Percentage drop from a positive baseline: 100 * (baseline - value) /
// baseline. Negative when the value got worse.
inline double relative_improvement(double baseline, double value) {
    if (!(baseline > 0.0))
        throw DomainError("relative_improvement: baseline must be positive, got " +
                          std::to_string(baseline));
    return 100.0 * (baseline - value) / baseline;
}

// One evaluated image pair.
struct MetricRow {
    std::string image_id;
    double dice = 0.0;
    double iou = 0.0;
    double cldice = 0.0;
    double beta0 = 0.0;
};

struct MetricStats {
    double mean = 0.0;
    double stdev = 0.0;
};

enum class StdMode {
    Population, // divide by n
    Sample,     // divide by n - 1 (0 when n == 1)
};

struct MetricAggregate {
    MetricStats dice;
    MetricStats iou;
    MetricStats cldice;
    MetricStats beta0;
    std::size_t n = 0;
    StdMode std_mode = StdMode::Population;
};

struct MetricReport {
    std::vector<MetricRow> per_image;
    MetricAggregate summary;
    int patch_size = 64;
    int connectivity = 8;
};

namespace detail {

// Welford's running mean/variance.
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    MetricStats finish(StdMode mode) const {
        MetricStats s;
        s.mean = mean;
        if (mode == StdMode::Population)
            s.stdev = n > 0 ? std::sqrt(m2 / static_cast<double>(n)) : 0.0;
        else
            s.stdev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
        return s;
    }
};

} // namespace detail

// Mean and standard deviation of each metric column.
inline MetricAggregate aggregate(const std::vector<MetricRow>& rows,
                                 StdMode mode = StdMode::Population) {
    if (rows.empty())
        throw EmptyInputError("aggregate: no rows");
    detail::RunningStats d, i, c, b;
    for (const MetricRow& r : rows) {
        d.push(r.dice);
        i.push(r.iou);
        c.push(r.cldice);
        b.push(r.beta0);
    }
    MetricAggregate agg;
    agg.dice = d.finish(mode);
    agg.iou = i.finish(mode);
    agg.cldice = c.finish(mode);
    agg.beta0 = b.finish(mode);
    agg.n = rows.size();
    agg.std_mode = mode;
    return agg;
}

} // namespace vtopo
