#include "affvqa/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace affvqa::policy {

Vec2 normalized(const Vec2& v) {
    double norm = std::hypot(v.x, v.y);
    if (norm == 0.0) throw std::invalid_argument("normalized: zero vector");
    return Vec2{v.x / norm, v.y / norm};
}

MaskForBox mask_for_box(const NormBBox& box, const ImageRef& image,
                        const std::optional<RleMask>& external_mask) {
    if (!box.valid() || !image.valid())
        throw std::invalid_argument("mask_for_box: invalid box or image");
    PixelBBox pixel = denormalize_bbox(box, image);
    int x0 = static_cast<int>(std::lround(pixel.x_min));
    int y0 = static_cast<int>(std::lround(pixel.y_min));
    int x1 = static_cast<int>(std::lround(pixel.x_max));
    int y1 = static_cast<int>(std::lround(pixel.y_max));
    x1 = std::max(x1, x0 + 1);
    y1 = std::max(y1, y0 + 1);

    auto rectangle = [&] {
        return RleMask::filled_rect(image.width, image.height, x0, y0, x1, y1);
    };
    if (!external_mask)
        return MaskForBox{rectangle(), true, ""};
    if (external_mask->width != image.width || external_mask->height != image.height)
        throw std::invalid_argument("mask_for_box: external mask does not match image size");
    RleMask clipped = mask_intersect_rect(*external_mask, x0, y0, x1, y1);
    if (clipped.empty())
        return MaskForBox{rectangle(), true,
                          "external mask is empty inside the box; rectangle fallback used"};
    return MaskForBox{std::move(clipped), false, ""};
}

Vec2 contact_point(const RleMask& mask) {
    if (!mask.valid() || mask.empty())
        throw std::invalid_argument("contact_point: empty mask");

    // Multi-component masks reduce to the largest component (first in
    // row-major order on ties).
    RleMask region = mask;
    auto components = connected_components(mask);
    if (components.size() > 1) {
        std::size_t best = 0;
        std::uint64_t best_count = components[0].foreground_count();
        for (std::size_t i = 1; i < components.size(); ++i) {
            std::uint64_t count = components[i].foreground_count();
            if (count > best_count) {
                best = i;
                best_count = count;
            }
        }
        region = components[best];
    }

    auto raster = region.to_raster();
    double sum_x = 0, sum_y = 0;
    std::uint64_t count = 0;
    for (int y = 0; y < region.height; ++y)
        for (int x = 0; x < region.width; ++x)
            if (raster[static_cast<std::size_t>(y) * region.width + x]) {
                sum_x += x;
                sum_y += y;
                ++count;
            }
    int cx = static_cast<int>(std::floor(sum_x / static_cast<double>(count) + 0.5));
    int cy = static_cast<int>(std::floor(sum_y / static_cast<double>(count) + 0.5));

    if (cx >= 0 && cy >= 0 && cx < region.width && cy < region.height &&
        raster[static_cast<std::size_t>(cy) * region.width + cx])
        return Vec2{static_cast<double>(cx), static_cast<double>(cy)};

    // Concave region: nearest foreground pixel to the exact centroid, ties
    // broken by row-major order.
    double exact_x = sum_x / static_cast<double>(count);
    double exact_y = sum_y / static_cast<double>(count);
    double best_d2 = 0;
    int best_x = -1, best_y = -1;
    for (int y = 0; y < region.height; ++y)
        for (int x = 0; x < region.width; ++x) {
            if (!raster[static_cast<std::size_t>(y) * region.width + x]) continue;
            double dx = x - exact_x, dy = y - exact_y;
            double d2 = dx * dx + dy * dy;
            if (best_x < 0 || d2 < best_d2) {
                best_d2 = d2;
                best_x = x;
                best_y = y;
            }
        }
    return Vec2{static_cast<double>(best_x), static_cast<double>(best_y)};
}

Vec2 approach_from_normal(const Vec2& normal, ApproachMode mode) {
    Vec2 unit = normalized(normal);
    if (mode == ApproachMode::push) return Vec2{-unit.x, -unit.y};
    return unit;
}

ContactPlan plan_contact(const NormBBox& box, const ImageRef& image,
                         const std::optional<RleMask>& external_mask,
                         const Vec2& surface_normal, ApproachMode mode) {
    MaskForBox acquired = mask_for_box(box, image, external_mask);
    ContactPlan plan;
    plan.contact = contact_point(acquired.mask);
    plan.approach = approach_from_normal(surface_normal, mode);
    plan.source = acquired.fallback ? ContactPlan::Source::bbox_fallback
                                    : ContactPlan::Source::mask_centroid;
    return plan;
}

} // namespace affvqa::policy
