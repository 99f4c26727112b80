#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vtopo/ccl.hpp"
#include "vtopo/fragment.hpp"
#include "vtopo/metrics.hpp"
#include "vtopo/repair.hpp"
#include "support/shapes.hpp"

using namespace vtopo;

namespace {

// Two collinear 1-px segments with facing tips 4 px apart.
BinaryMask broken_line() {
    BinaryMask m(30, 11);
    for (int x = 2; x <= 12; ++x) m.at(x, 5) = 1;
    for (int x = 16; x <= 26; ++x) m.at(x, 5) = 1;
    return m;
}

} // namespace

TEST_CASE("pair_endpoints on collinear facing segments") {
    const BinaryMask m = broken_line();
    const auto proposals = pair_endpoints(m, {});
    REQUIRE(proposals.size() == 1);
    REQUIRE(proposals[0].a.pos == Pixel{12, 5});
    REQUIRE(proposals[0].b.pos == Pixel{16, 5});
    REQUIRE(proposals[0].gap == 4.0);
    REQUIRE(proposals[0].score == Catch::Approx(1.0));
}

TEST_CASE("parallel segments with same-direction tips never pair") {
    // two vertical segments side by side; all tips point up/down, never at
    // the neighboring vessel
    BinaryMask m(11, 30);
    for (int y = 2; y <= 12; ++y) {
        m.at(4, y) = 1;
        m.at(6, y) = 1;
    }
    REQUIRE(pair_endpoints(m, {}).empty());
}

TEST_CASE("three collinear fragments chain without reusing endpoints") {
    BinaryMask m(40, 9);
    for (int x = 2; x <= 10; ++x) m.at(x, 4) = 1;
    for (int x = 14; x <= 22; ++x) m.at(x, 4) = 1;
    for (int x = 26; x <= 34; ++x) m.at(x, 4) = 1;

    const auto proposals = pair_endpoints(m, {});
    REQUIRE(proposals.size() == 2);
    REQUIRE(proposals[0].a.pos == Pixel{10, 4});
    REQUIRE(proposals[0].b.pos == Pixel{14, 4});
    REQUIRE(proposals[1].a.pos == Pixel{22, 4});
    REQUIRE(proposals[1].b.pos == Pixel{26, 4});

    const RepairResult r = repair_mask(m, {});
    REQUIRE(component_count(r.mask, 8) == 1);
}

TEST_CASE("repair_mask reconnects the broken line") {
    const BinaryMask m = broken_line();
    REQUIRE(component_count(m, 8) == 2);
    const RepairResult r = repair_mask(m, {});
    REQUIRE(r.bridges.size() == 1);
    REQUIRE(component_count(r.mask, 8) == 1);
    // 1-px line has distance-transform 1 at the tips -> bridge radius 1
    REQUIRE(r.bridges[0].radius == 1);
    // monotone: no pixel was cleared
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.pixels[i]) REQUIRE(r.mask.pixels[i] == 1);
}

TEST_CASE("repair leaves the parallel-vessels fixture untouched") {
    const BinaryMask fixture = testsupport::parallel_vessels();
    RepairParams params;
    SECTION("default parameters") {
        const RepairResult r = repair_mask(fixture, params);
        REQUIRE(r.bridges.empty());
        REQUIRE(r.mask == fixture);
    }
    SECTION("even with a generous gap limit") {
        params.d_max = 500.0;
        const RepairResult r = repair_mask(fixture, params);
        REQUIRE(r.bridges.empty());
        REQUIRE(r.mask == fixture);
    }
}

TEST_CASE("repair is idempotent once gaps are closed") {
    const BinaryMask m = broken_line();
    const RepairResult first = repair_mask(m, {});
    REQUIRE(first.bridges.size() == 1);
    const RepairResult second = repair_mask(first.mask, {});
    REQUIRE(second.bridges.empty());
    REQUIRE(second.mask == first.mask);
}

TEST_CASE("fixed width mode uses the configured radius") {
    const BinaryMask m = broken_line();
    RepairParams params;
    params.width_mode = WidthMode::Fixed;
    params.fixed_radius = 0;
    const RepairResult r = repair_mask(m, params);
    REQUIRE(r.bridges.size() == 1);
    REQUIRE(r.bridges[0].radius == 0);
    // radius 0 adds exactly the 3 gap pixels (13,5), (14,5), (15,5)
    REQUIRE(r.mask.foreground_count() == m.foreground_count() + 3);
}

TEST_CASE("repair never increases the component count on fragmented shapes") {
    FragmentParams fp;
    fp.breaks = 3;
    for (const auto& shape : testsupport::vessel_corpus()) {
        for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
            fp.seed = seed;
            const FragmentResult broken = generate_breaks(shape.mask, fp);
            const RepairResult fixed = repair_mask(broken.mask, {});
            INFO("shape " << shape.name << " seed " << seed);
            REQUIRE(component_count(fixed.mask, 8) <= component_count(broken.mask, 8));
            for (std::size_t i = 0; i < broken.mask.size(); ++i)
                if (broken.mask.pixels[i]) REQUIRE(fixed.mask.pixels[i] == 1);
        }
    }
}

TEST_CASE("repair output is deterministic") {
    FragmentParams fp;
    fp.breaks = 3;
    fp.seed = 11;
    const auto corpus = testsupport::vessel_corpus();
    const BinaryMask broken = generate_breaks(corpus[7].mask, fp).mask;
    const RepairResult a = repair_mask(broken, {});
    const RepairResult b = repair_mask(broken, {});
    REQUIRE(a.mask == b.mask);
    REQUIRE(a.bridges.size() == b.bridges.size());
    for (std::size_t i = 0; i < a.bridges.size(); ++i) {
        REQUIRE(a.bridges[i].a.pos == b.bridges[i].a.pos);
        REQUIRE(a.bridges[i].b.pos == b.bridges[i].b.pos);
        REQUIRE(a.bridges[i].gap == b.bridges[i].gap);
        REQUIRE(a.bridges[i].score == b.bridges[i].score);
        REQUIRE(a.bridges[i].radius == b.bridges[i].radius);
    }
}

TEST_CASE("repair parameter validation") {
    const BinaryMask m = broken_line();
    RepairParams p;
    p.d_max = 0.0;
    REQUIRE_THROWS_AS(pair_endpoints(m, p), DomainError);
    p = {};
    p.cos_min = 1.5;
    REQUIRE_THROWS_AS(pair_endpoints(m, p), DomainError);
    p = {};
    p.width_mode = WidthMode::Fixed;
    p.fixed_radius = -2;
    REQUIRE_THROWS_AS(repair_mask(m, p), DomainError);
}

TEST_CASE("no endpoints means no proposals") {
    SECTION("empty mask") {
        REQUIRE(pair_endpoints(BinaryMask(10, 10), {}).empty());
    }
    SECTION("closed ring") {
        BinaryMask ring(12, 12);
        for (int i = 3; i <= 8; ++i) {
            ring.at(i, 3) = ring.at(i, 8) = 1;
            ring.at(3, i) = ring.at(8, i) = 1;
        }
        const RepairResult r = repair_mask(ring, {});
        REQUIRE(r.bridges.empty());
        REQUIRE(r.mask == ring);
    }
}
