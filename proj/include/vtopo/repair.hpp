#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vtopo/distance.hpp"
#include "vtopo/draw.hpp"
#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"
#include "vtopo/skeleton.hpp"

namespace vtopo {

enum class WidthMode {
    DistanceTransform, // bridge radius from local vessel half-width
    Fixed,             // constant radius (ablation mode)
};

struct RepairParams {
    double d_max = 20.0;   // maximum endpoint gap to bridge
    double cos_min = 0.5;  // minimum mutual alignment (cosine)
    WidthMode width_mode = WidthMode::DistanceTransform;
    int fixed_radius = 1;  // used when width_mode == Fixed
};

// One accepted endpoint pairing, with the geometry that justified it.
struct BridgeProposal {
    Endpoint a;
    Endpoint b;
    double gap = 0.0;   // Euclidean distance between the tips
    double score = 0.0; // min of the two alignment cosines
    int radius = 0;     // stroke radius used when drawing (filled by repair_mask)
};

namespace detail {

inline void check_repair_params(const RepairParams& p) {
    if (!(p.d_max > 0.0))
        throw DomainError("repair: d_max must be positive");
    if (!(p.cos_min >= -1.0 && p.cos_min <= 1.0))
        throw DomainError("repair: cos_min must lie in [-1, 1]");
    if (p.width_mode == WidthMode::Fixed && p.fixed_radius < 0)
        throw DomainError("repair: fixed radius must be non-negative");
}

} // namespace detail

// Proposes endpoint pairs to reconnect. The prediction is skeletonized and
// its endpoints collected; a pair (a, b) is a candidate when the gap is at
// most d_max and both tips point at each other: with u the unit vector from
// a to b, score = min(dir_a . u, dir_b . -u) must reach cos_min. Tips with
// no direction estimate contribute cosine 0. Candidates are accepted
// greedily by (gap ascending, score descending, raster order), each
// endpoint used at most once. Deterministic; no endpoints means no
// proposals.
inline std::vector<BridgeProposal> pair_endpoints(const BinaryMask& pred,
                                                  const RepairParams& params) {
    detail::check_repair_params(params);
    const BinaryMask skeleton = skeletonize(pred);
    const std::vector<Endpoint> eps = find_endpoints(skeleton);

    std::vector<BridgeProposal> candidates;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (std::size_t j = i + 1; j < eps.size(); ++j) {
            const Endpoint& a = eps[i];
            const Endpoint& b = eps[j];
            const double dx = static_cast<double>(b.pos.x - a.pos.x);
            const double dy = static_cast<double>(b.pos.y - a.pos.y);
            const double gap = std::sqrt(dx * dx + dy * dy);
            if (gap == 0.0 || gap > params.d_max) continue;
            const double ux = dx / gap;
            const double uy = dy / gap;
            const double cos_a = a.dir.valid ? a.dir.x * ux + a.dir.y * uy : 0.0;
            const double cos_b = b.dir.valid ? -(b.dir.x * ux + b.dir.y * uy) : 0.0;
            const double score = std::min(cos_a, cos_b);
            if (score < params.cos_min) continue;
            BridgeProposal prop;
            prop.a = a;
            prop.b = b;
            prop.gap = gap;
            prop.score = score;
            candidates.push_back(prop);
        }
    }

    // find_endpoints returns raster order, so (i, j) index order is already
    // the raster tiebreak.
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (candidates[l].gap != candidates[r].gap) return candidates[l].gap < candidates[r].gap;
        return candidates[l].score > candidates[r].score;
    });

    auto key = [](const Endpoint& e) {
        return static_cast<long long>(e.pos.y) * 1000000 + e.pos.x;
    };
    std::vector<long long> used;
    std::vector<BridgeProposal> accepted;
    for (const std::size_t idx : order) {
        const BridgeProposal& c = candidates[idx];
        const long long ka = key(c.a);
        const long long kb = key(c.b);
        if (std::find(used.begin(), used.end(), ka) != used.end()) continue;
        if (std::find(used.begin(), used.end(), kb) != used.end()) continue;
        used.push_back(ka);
        used.push_back(kb);
        accepted.push_back(c);
    }
    return accepted;
}

struct RepairResult {
    BinaryMask mask;
    std::vector<BridgeProposal> bridges;
};

// Bridges the accepted endpoint pairs into the prediction. In
// distance-transform mode each bridge's radius is the rounded mean of the
// vessel half-widths at its two tips (so repairs match local caliber); in
// fixed mode all bridges share params.fixed_radius. Bridges only ever add
// pixels that connect existing structures, so the 8-connected component
// count never increases.
inline RepairResult repair_mask(const BinaryMask& pred, const RepairParams& params) {
    std::vector<BridgeProposal> proposals = pair_endpoints(pred, params);

    std::vector<double> dt;
    if (params.width_mode == WidthMode::DistanceTransform) dt = distance_transform(pred);

    RepairResult result;
    result.mask = pred;
    for (BridgeProposal& prop : proposals) {
        int radius = params.fixed_radius;
        if (params.width_mode == WidthMode::DistanceTransform) {
            const double ra = dt[result.mask.index(prop.a.pos.x, prop.a.pos.y)];
            const double rb = dt[result.mask.index(prop.b.pos.x, prop.b.pos.y)];
            radius = static_cast<int>(std::lround((ra + rb) / 2.0));
        }
        prop.radius = radius;
        result.mask = draw_bridge(result.mask, prop.a.pos, prop.b.pos, radius);
    }
    result.bridges = std::move(proposals);
    return result;
}

} // namespace vtopo
