#include "affvqa/policy.hpp"

#include "affvqa/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace affvqa;
using namespace affvqa::policy;

namespace {

// Independent oracle for the concave-centroid rule: full scan for the
// foreground pixel nearest to the exact centroid, row-major tie-break.
Vec2 brute_force_contact(const RleMask& mask) {
    auto raster = mask.to_raster();
    double sx = 0, sy = 0;
    std::uint64_t n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (raster[static_cast<std::size_t>(y) * mask.width + x]) {
                sx += x;
                sy += y;
                ++n;
            }
    double cx = sx / static_cast<double>(n), cy = sy / static_cast<double>(n);
    int rx = static_cast<int>(std::floor(cx + 0.5)), ry = static_cast<int>(std::floor(cy + 0.5));
    if (rx >= 0 && ry >= 0 && rx < mask.width && ry < mask.height &&
        raster[static_cast<std::size_t>(ry) * mask.width + rx])
        return Vec2{double(rx), double(ry)};
    double best = 1e30;
    Vec2 out;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!raster[static_cast<std::size_t>(y) * mask.width + x]) continue;
            double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            if (d < best) {
                best = d;
                out = Vec2{double(x), double(y)};
            }
        }
    return out;
}

} // namespace

TEST_CASE("mask_for_box fallback and intersection") {
    ImageRef image{"i", 100, 100, ""};

    SUBCASE("no external mask: filled box rectangle") {
        auto result = mask_for_box(NormBBox{0.25, 0.25, 0.75, 0.75}, image, std::nullopt);
        CHECK(result.fallback);
        CHECK(result.mask.foreground_count() == 50 * 50);
        CHECK(bbox_from_mask(result.mask) == PixelBBox{25, 25, 75, 75});
    }
    SUBCASE("external mask fully inside the box is returned unchanged") {
        RleMask inner = RleMask::filled_rect(100, 100, 30, 30, 40, 45);
        auto result = mask_for_box(NormBBox{0.25, 0.25, 0.75, 0.75}, image, inner);
        CHECK_FALSE(result.fallback);
        CHECK(result.mask == inner);
        CHECK(result.warning.empty());
    }
    SUBCASE("external mask is clipped to the box") {
        RleMask wide = RleMask::filled_rect(100, 100, 0, 30, 100, 40);
        auto result = mask_for_box(NormBBox{0.25, 0.25, 0.75, 0.75}, image, wide);
        CHECK_FALSE(result.fallback);
        CHECK(result.mask.foreground_count() == 50 * 10);
    }
    SUBCASE("disjoint external mask falls back with a warning") {
        RleMask outside = RleMask::filled_rect(100, 100, 0, 0, 10, 10);
        auto result = mask_for_box(NormBBox{0.25, 0.25, 0.75, 0.75}, image, outside);
        CHECK(result.fallback);
        CHECK(!result.warning.empty());
        CHECK(result.mask.foreground_count() == 50 * 50);
    }
    SUBCASE("mismatched external mask dimensions are an error") {
        RleMask tiny = RleMask::filled_rect(10, 10, 0, 0, 5, 5);
        CHECK_THROWS_AS(mask_for_box(NormBBox{0.25, 0.25, 0.75, 0.75}, image, tiny),
                        std::invalid_argument);
    }
}

TEST_CASE("contact_point geometry") {
    SUBCASE("filled rectangle centroid rounds half-up") {
        RleMask rect = RleMask::filled_rect(40, 30, 10, 10, 30, 20);
        CHECK(contact_point(rect) == Vec2{20, 15});
    }
    SUBCASE("single pixel is its own contact") {
        RleMask px = RleMask::filled_rect(10, 10, 7, 3, 8, 4);
        CHECK(contact_point(px) == Vec2{7, 3});
    }
    SUBCASE("L-shaped mask with the centroid in the notch") {
        // vertical bar x in [0,2), y in [0,10); horizontal bar y in [8,10), x in [0,10)
        std::vector<std::uint8_t> raster(10 * 10, 0);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 10; ++x)
                if (x < 2 || y >= 8) raster[static_cast<std::size_t>(y) * 10 + x] = 1;
        RleMask ell = RleMask::from_raster(10, 10, raster);
        Vec2 expected = brute_force_contact(ell);
        Vec2 got = contact_point(ell);
        CHECK(got == expected);
        CHECK(ell.pixel(static_cast<int>(got.x), static_cast<int>(got.y)));
    }
    SUBCASE("largest connected component wins before centroid computation") {
        std::vector<std::uint8_t> raster(20 * 10, 0);
        // small blob at the left, large blob at the right
        raster[0] = 1;
        for (int y = 2; y < 9; ++y)
            for (int x = 10; x < 18; ++x) raster[static_cast<std::size_t>(y) * 20 + x] = 1;
        RleMask mask = RleMask::from_raster(20, 10, raster);
        Vec2 got = contact_point(mask);
        CHECK(got.x >= 10);
        CHECK(mask.pixel(static_cast<int>(got.x), static_cast<int>(got.y)));
    }
    SUBCASE("property: contact is always a foreground pixel") {
        SeededRng rng(97);
        for (int trial = 0; trial < 300; ++trial) {
            int w = 3 + static_cast<int>(rng.next_below(28));
            int h = 3 + static_cast<int>(rng.next_below(28));
            std::vector<std::uint8_t> raster(static_cast<std::size_t>(w) * h, 0);
            bool any = false;
            for (auto& px : raster) {
                px = rng.next_below(4) == 0;
                any |= px != 0;
            }
            if (!any) raster[rng.next_below(raster.size())] = 1;
            RleMask mask = RleMask::from_raster(w, h, raster);
            Vec2 contact = contact_point(mask);
            CHECK(mask.pixel(static_cast<int>(contact.x), static_cast<int>(contact.y)));
        }
    }
    SUBCASE("empty mask is an error") {
        CHECK_THROWS_AS(contact_point(RleMask::filled_rect(5, 5, 0, 0, 0, 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("approach_from_normal") {
    CHECK(approach_from_normal({0, 1}, ApproachMode::pull) == Vec2{0, 1});
    CHECK(approach_from_normal({0, 1}, ApproachMode::push) == Vec2{0, -1});
    Vec2 scaled = approach_from_normal({3, 4}, ApproachMode::pull);
    CHECK(scaled.x == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(scaled.y == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(approach_from_normal({0, 0}, ApproachMode::pull), std::invalid_argument);
}

TEST_CASE("plan_contact composes acquisition, contact, and approach") {
    ImageRef image{"i", 100, 100, ""};
    ContactPlan plan =
        plan_contact(NormBBox{0.2, 0.2, 0.6, 0.4}, image, std::nullopt, {1, 0},
                     ApproachMode::pull);
    CHECK(plan.source == ContactPlan::Source::bbox_fallback);
    CHECK(plan.contact == Vec2{40, 30});
    CHECK(plan.approach == Vec2{1, 0});

    RleMask external = RleMask::filled_rect(100, 100, 25, 25, 35, 35);
    ContactPlan with_mask = plan_contact(NormBBox{0.2, 0.2, 0.6, 0.4}, image, external,
                                         {0, 2}, ApproachMode::push);
    CHECK(with_mask.source == ContactPlan::Source::mask_centroid);
    CHECK(with_mask.approach == Vec2{0, -1});
    CHECK(external.pixel(static_cast<int>(with_mask.contact.x),
                         static_cast<int>(with_mask.contact.y)));
}
