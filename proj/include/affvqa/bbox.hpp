#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace affvqa {

/// Image descriptor; dimensions are in pixels and must be >= 1.
struct ImageRef {
    std::string id;
    int width = 0;
    int height = 0;
    std::string path;

    bool valid() const { return !id.empty() && width >= 1 && height >= 1; }
};

/// Axis-aligned box in pixel coordinates, corners [x_min, y_min, x_max, y_max].
/// x_max/y_max are exclusive edges: a single pixel (x, y) has the box
/// [x, y, x+1, y+1].
struct PixelBBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    bool valid() const {
        return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max;
    }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool within(const ImageRef& image) const {
        return valid() && x_max <= image.width && y_max <= image.height;
    }
    bool operator==(const PixelBBox&) const = default;
};

/// Box normalized to image dimensions. Every coordinate is a multiple of
/// 0.001 (the codec quantum); format/parse below are bit-exact on such values.
struct NormBBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    bool valid() const {
        return x_min >= 0 && y_min >= 0 && x_max <= 1.0 && y_max <= 1.0 &&
               x_min < x_max && y_min < y_max;
    }
    bool operator==(const NormBBox&) const = default;
};

// Rounds half-up to 3 decimals; the single quantization rule used by the
// bbox codec so that outputs are identical across implementations.
double quantize3(double v);

/// Divides by image dimensions and quantizes to the 3-decimal grid.
/// Throws std::invalid_argument if the box lies outside the image or the
/// quantized box has zero extent (degenerate bbox).
NormBBox normalize_bbox(const PixelBBox& box, const ImageRef& image);

/// Multiplies by image dimensions. Inverse of normalize_bbox up to
/// 0.5 * dimension / 1000 per coordinate.
PixelBBox denormalize_bbox(const NormBBox& box, const ImageRef& image);

/// Renders exactly "[a, b, c, d]" with 3-decimal fixed-point fields.
std::string format_bbox(const NormBBox& box);

enum class BBoxParseFailure { none, no_bbox, malformed_bbox };

struct BBoxParseResult {
    std::optional<NormBBox> box;
    BBoxParseFailure failure = BBoxParseFailure::none;

    explicit operator bool() const { return box.has_value(); }
};

/// Scans free text for the first bracketed group of exactly four real
/// numbers. Values are quantized to the 3-decimal grid; a group that then
/// violates the NormBBox invariants yields malformed_bbox.
BBoxParseResult parse_bbox(std::string_view text);

/// Intersection-over-union of two pixel boxes, in [0, 1].
double iou(const PixelBBox& a, const PixelBBox& b);

/// Intersection-over-union of two normalized boxes. Equal to the pixel-space
/// IoU of the same boxes on any image (IoU is invariant to axis scaling).
double iou(const NormBBox& a, const NormBBox& b);

} // namespace affvqa
