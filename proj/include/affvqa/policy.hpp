#pragma once

#include "affvqa/bbox.hpp"
#include "affvqa/mask.hpp"

#include <optional>
#include <string>

namespace affvqa::policy {

struct Vec2 {
    double x = 0;
    double y = 0;
    bool operator==(const Vec2&) const = default;
};

Vec2 normalized(const Vec2& v); // throws on the zero vector

/// Where and how the gripper engages the grounded region.
struct ContactPlan {
    Vec2 contact;                       // pixel coordinates
    Vec2 approach;                      // unit vector
    enum class Source { mask_centroid, bbox_fallback } source = Source::mask_centroid;
};

struct MaskForBox {
    RleMask mask;
    bool fallback = false; // true when the filled box rectangle was used
    std::string warning;
};

/// External segmenter output intersected with the box; without one (or when
/// the intersection is empty) the filled box rectangle stands in.
MaskForBox mask_for_box(const NormBBox& box, const ImageRef& image,
                        const std::optional<RleMask>& external_mask);

/// Geometric center of the mask foreground, rounded half-up to the nearest
/// pixel. When the rounded centroid is not foreground (concave masks), the
/// nearest foreground pixel wins, ties broken in row-major order. Masks with
/// several components reduce to the largest one first.
Vec2 contact_point(const RleMask& mask);

enum class ApproachMode { pull, push };

/// pull follows the surface normal; push opposes it.
Vec2 approach_from_normal(const Vec2& normal, ApproachMode mode);

/// Full pipeline: box -> mask -> contact point + approach direction.
ContactPlan plan_contact(const NormBBox& box, const ImageRef& image,
                         const std::optional<RleMask>& external_mask,
                         const Vec2& surface_normal, ApproachMode mode);

} // namespace affvqa::policy
