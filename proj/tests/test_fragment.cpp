#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "vtopo/ccl.hpp"
#include "vtopo/fragment.hpp"
#include "vtopo/metrics.hpp"
#include "vtopo/pcg32.hpp"
#include "vtopo/skeleton.hpp"
#include "support/shapes.hpp"

using namespace vtopo;

TEST_CASE("pcg32 reproduces the reference stream") {
    SECTION("seed 42") {
        Pcg32 rng(42);
        const std::uint32_t expected[6] = {0xa15c02b7u, 0x7b47f409u, 0xba1d3330u,
                                           0x83d2f293u, 0xbfa4784bu, 0xcbed606eu};
        for (const std::uint32_t e : expected) REQUIRE(rng.next() == e);
    }
    SECTION("seed 0") {
        Pcg32 rng(0);
        REQUIRE(rng.next() == 0x47c28b93u);
        REQUIRE(rng.next() == 0xb98f6a27u);
        REQUIRE(rng.next() == 0x7d3dcb1eu);
    }
    SECTION("bounded draws") {
        Pcg32 rng(42);
        const std::uint32_t expected[12] = {3, 7, 4, 5, 5, 6, 5, 5, 4, 4, 2, 3};
        for (const std::uint32_t e : expected) REQUIRE(rng.bounded(10) == e);
    }
    SECTION("bounded stays in range") {
        Pcg32 rng(7);
        for (int i = 0; i < 1000; ++i) REQUIRE(rng.bounded(7) < 7);
    }
}

TEST_CASE("generate_breaks input validation") {
    BinaryMask line(50, 9);
    for (int x = 5; x < 45; ++x) line.at(x, 4) = 1;

    REQUIRE_THROWS_AS(generate_breaks(BinaryMask(10, 10), {}), EmptyInputError);

    FragmentParams bad;
    bad.min_radius = 0;
    REQUIRE_THROWS_AS(generate_breaks(line, bad), DomainError);
    bad.min_radius = 5;
    bad.max_radius = 2;
    REQUIRE_THROWS_AS(generate_breaks(line, bad), DomainError);
    bad = {};
    bad.breaks = -1;
    REQUIRE_THROWS_AS(generate_breaks(line, bad), DomainError);
}

TEST_CASE("zero breaks is the identity") {
    BinaryMask line(50, 9);
    for (int x = 5; x < 45; ++x) line.at(x, 4) = 1;
    FragmentParams p;
    p.breaks = 0;
    const FragmentResult r = generate_breaks(line, p);
    REQUIRE(r.mask == line);
    REQUIRE(r.records.empty());
}

TEST_CASE("one cut on a straight line leaves two components") {
    BinaryMask line(50, 9);
    for (int x = 5; x < 45; ++x) line.at(x, 4) = 1;
    FragmentParams p;
    p.breaks = 1;
    p.min_radius = 2;
    p.max_radius = 2;
    p.seed = 42;
    const FragmentResult r = generate_breaks(line, p);
    REQUIRE(r.records.size() == 1);
    REQUIRE(component_count(r.mask, 8) == 2);
    REQUIRE(r.records[0].components_before == 1);
    REQUIRE(r.records[0].components_after == 2);
    REQUIRE(r.records[0].radius == 2);
    // the record is re-verifiable: the cut really did remove pixels
    REQUIRE(r.mask.foreground_count() < line.foreground_count());
}

TEST_CASE("break records tell a consistent story") {
    const auto corpus = testsupport::vessel_corpus();
    FragmentParams p;
    p.breaks = 3;
    p.seed = 7;
    for (const auto& shape : corpus) {
        const FragmentResult r = generate_breaks(shape.mask, p);
        INFO("shape " << shape.name);

        // fragmented mask is a subset of the intact one
        for (std::size_t i = 0; i < r.mask.size(); ++i)
            if (r.mask.pixels[i]) REQUIRE(shape.mask.pixels[i] == 1);

        // each accepted break strictly increased the component count, and
        // the counts chain from record to record
        const BinaryMask skel = skeletonize(shape.mask);
        int prev_after = component_count(shape.mask, 8);
        for (const BreakRecord& rec : r.records) {
            REQUIRE(rec.components_before == prev_after);
            REQUIRE(rec.components_after > rec.components_before);
            REQUIRE(skel.at(rec.center.x, rec.center.y) == 1); // center on skeleton
            REQUIRE(rec.radius >= p.min_radius);
            REQUIRE(rec.radius <= p.max_radius);
            prev_after = rec.components_after;
        }
        REQUIRE(component_count(r.mask, 8) == prev_after);

        if (!r.records.empty()) REQUIRE(dice(r.mask, shape.mask) < 1.0);

        // accepted disks are pairwise disjoint: the union's area equals the
        // sum of the individual (clipped) disk areas
        std::size_t sum_areas = 0;
        for (const BreakRecord& rec : r.records)
            sum_areas += break_region_mask({rec}, shape.mask.width, shape.mask.height)
                             .foreground_count();
        const BinaryMask all =
            break_region_mask(r.records, shape.mask.width, shape.mask.height);
        REQUIRE(all.foreground_count() == sum_areas);
    }
}

TEST_CASE("fragmentation is deterministic") {
    const auto corpus = testsupport::vessel_corpus();
    FragmentParams p;
    p.breaks = 3;
    p.seed = 42;
    const FragmentResult a = generate_breaks(corpus[3].mask, p);
    const FragmentResult b = generate_breaks(corpus[3].mask, p);
    REQUIRE(a.mask == b.mask);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].center == b.records[i].center);
        REQUIRE(a.records[i].radius == b.records[i].radius);
    }

    p.seed = 43;
    const FragmentResult c = generate_breaks(corpus[3].mask, p);
    REQUIRE(a.mask != c.mask); // different seed, different cuts
}

TEST_CASE("break_region_mask") {
    SECTION("empty records give an empty mask") {
        REQUIRE(break_region_mask({}, 10, 10).foreground_count() == 0);
    }
    SECTION("radius 1 disk is the 5-pixel plus") {
        BreakRecord rec;
        rec.center = {5, 5};
        rec.radius = 1;
        const BinaryMask m = break_region_mask({rec}, 11, 11);
        REQUIRE(m.foreground_count() == 5);
        REQUIRE(m.at(5, 5) == 1);
        REQUIRE(m.at(4, 5) == 1);
        REQUIRE(m.at(6, 5) == 1);
        REQUIRE(m.at(5, 4) == 1);
        REQUIRE(m.at(5, 6) == 1);
    }
    SECTION("disjoint records add up") {
        BreakRecord a, b;
        a.center = {3, 3};
        a.radius = 2;
        b.center = {12, 12};
        b.radius = 3;
        const auto ma = break_region_mask({a}, 20, 20).foreground_count();
        const auto mb = break_region_mask({b}, 20, 20).foreground_count();
        REQUIRE(break_region_mask({a, b}, 20, 20).foreground_count() == ma + mb);
    }
    SECTION("out-of-bounds center is rejected") {
        BreakRecord rec;
        rec.center = {30, 2};
        rec.radius = 1;
        REQUIRE_THROWS_AS(break_region_mask({rec}, 10, 10), BoundsError);
    }
}

TEST_CASE("unbreakable shapes terminate with fewer records") {
    // a tiny plus cannot be split three times over
    BinaryMask plus(7, 7);
    for (int i = 2; i <= 4; ++i) {
        plus.at(i, 3) = 1;
        plus.at(3, i) = 1;
    }
    FragmentParams p;
    p.breaks = 5;
    p.min_radius = 3;
    p.max_radius = 3;
    p.seed = 12;
    const FragmentResult r = generate_breaks(plus, p);
    REQUIRE(r.records.size() < 5); // budget exhausted, no infinite loop
}
