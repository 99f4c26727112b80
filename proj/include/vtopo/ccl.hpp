#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"

namespace vtopo {

// Connected-component labeling result. Labels are 1..component_count in
// first-appearance (raster scan) order; background pixels are 0.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
    std::int32_t component_count = 0;

    std::int32_t at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

namespace detail {

struct UnionFind {
    std::vector<std::int32_t> parent;

    std::int32_t make() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }

    std::int32_t find(std::int32_t a) {
        std::int32_t root = a;
        while (parent[root] != root) root = parent[root];
        while (parent[a] != root) {
            const std::int32_t next = parent[a];
            parent[a] = root;
            a = next;
        }
        return root;
    }

    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b < a ? a : b] = b < a ? b : a;
    }
};

} // namespace detail

// Two-pass union-find labeling under 4- or 8-connectivity.
inline LabelMap connected_components(const BinaryMask& mask, int connectivity = 8) {
    if (connectivity != 4 && connectivity != 8)
        throw DomainError("connected_components: connectivity must be 4 or 8, got " +
                          std::to_string(connectivity));

    LabelMap out;
    out.width = mask.width;
    out.height = mask.height;
    out.labels.assign(mask.size(), 0);

    detail::UnionFind uf;
    std::vector<std::int32_t> provisional(mask.size(), -1);

    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const std::size_t i = mask.index(x, y);

            std::int32_t label = -1;
            auto adopt = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= mask.width) return;
                const std::int32_t n = provisional[mask.index(nx, ny)];
                if (n < 0) return;
                if (label < 0)
                    label = n;
                else
                    uf.unite(label, n);
            };

            adopt(x - 1, y);
            adopt(x, y - 1);
            if (connectivity == 8) {
                adopt(x - 1, y - 1);
                adopt(x + 1, y - 1);
            }

            provisional[i] = label >= 0 ? label : uf.make();
        }
    }

    // Renumber roots by first raster appearance.
    std::vector<std::int32_t> compact(uf.parent.size(), 0);
    std::int32_t next = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (provisional[i] < 0) continue;
        const std::int32_t root = uf.find(provisional[i]);
        if (compact[root] == 0) compact[root] = ++next;
        out.labels[i] = compact[root];
    }
    out.component_count = next;
    return out;
}

// Number of connected components, without keeping the label raster.
inline std::int32_t component_count(const BinaryMask& mask, int connectivity = 8) {
    return connected_components(mask, connectivity).component_count;
}

} // namespace vtopo
