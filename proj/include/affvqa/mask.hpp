#pragma once

#include "affvqa/bbox.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa {

/// Run-length encoded binary raster. Runs alternate background/foreground
/// starting with background (first run may be 0) and walk the raster in
/// column-major order: pixel index i maps to x = i / height, y = i % height.
struct RleMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> runs;

    bool valid() const;
    std::uint64_t foreground_count() const;
    bool empty() const { return foreground_count() == 0; }

    /// Decodes to a row-major byte raster (0 background, 1 foreground).
    std::vector<std::uint8_t> to_raster() const;

    /// Encodes a row-major byte raster (nonzero = foreground).
    static RleMask from_raster(int width, int height,
                               const std::vector<std::uint8_t>& raster);

    /// Filled axis-aligned rectangle [x0, x1) x [y0, y1), clamped to the canvas.
    static RleMask filled_rect(int width, int height,
                               int x0, int y0, int x1, int y1);

    bool pixel(int x, int y) const; // via decoded raster; prefer to_raster in loops

    bool operator==(const RleMask&) const = default;
};

/// Wire format: {"size": [height, width], "counts": [r0, r1, ...]}.
nlohmann::json rle_to_json(const RleMask& mask);
RleMask rle_from_json(const nlohmann::json& j);

/// Tight pixel box over the foreground. Throws on an empty mask.
PixelBBox bbox_from_mask(const RleMask& mask);

/// IoU of two masks of identical dimensions, in [0, 1].
double mask_iou(const RleMask& a, const RleMask& b);

/// Intersection of a mask with a pixel rectangle (exclusive max edges).
RleMask mask_intersect_rect(const RleMask& mask, int x0, int y0, int x1, int y1);

/// 4-connected foreground components, ordered by their first pixel in
/// row-major scan order. Each component is returned as a full-canvas mask.
std::vector<RleMask> connected_components(const RleMask& mask);

/// 4-connected components of one label value in a label raster (row-major).
std::vector<RleMask> label_components(int width, int height,
                                      const std::vector<std::uint8_t>& labels,
                                      std::uint8_t value);

} // namespace affvqa
