#include "affvqa/bbox.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace affvqa {

double quantize3(double v) {
    return std::floor(v * 1000.0 + 0.5) / 1000.0;
}

NormBBox normalize_bbox(const PixelBBox& box, const ImageRef& image) {
    if (!image.valid()) throw std::invalid_argument("normalize_bbox: invalid image");
    if (!box.within(image)) throw std::invalid_argument("normalize_bbox: bbox outside image bounds");
    NormBBox out{
        quantize3(box.x_min / image.width),
        quantize3(box.y_min / image.height),
        quantize3(box.x_max / image.width),
        quantize3(box.y_max / image.height),
    };
    if (out.x_min >= out.x_max || out.y_min >= out.y_max)
        throw std::invalid_argument("normalize_bbox: degenerate bbox after quantization");
    return out;
}

PixelBBox denormalize_bbox(const NormBBox& box, const ImageRef& image) {
    if (!image.valid()) throw std::invalid_argument("denormalize_bbox: invalid image");
    if (!box.valid()) throw std::invalid_argument("denormalize_bbox: invalid NormBBox");
    return PixelBBox{
        box.x_min * image.width,
        box.y_min * image.height,
        box.x_max * image.width,
        box.y_max * image.height,
    };
}

std::string format_bbox(const NormBBox& box) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "[%.3f, %.3f, %.3f, %.3f]",
                  box.x_min, box.y_min, box.x_max, box.y_max);
    return buf;
}

namespace {

// Parses the interior of one bracket pair into real numbers; returns false
// unless the interior is exactly a comma-separated list of reals.
bool parse_number_list(std::string_view interior, std::vector<double>& out) {
    out.clear();
    std::size_t pos = 0;
    while (true) {
        std::size_t next = interior.find(',', pos);
        std::string field(interior.substr(pos, next == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : next - pos));
        const char* begin = field.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) return false;
        while (*end == ' ' || *end == '\t') ++end;
        if (*end != '\0') return false;
        out.push_back(v);
        if (next == std::string_view::npos) return true;
        pos = next + 1;
    }
}

} // namespace

BBoxParseResult parse_bbox(std::string_view text) {
    std::vector<double> values;
    std::size_t open = text.find('[');
    while (open != std::string_view::npos) {
        std::size_t close = text.find(']', open + 1);
        if (close == std::string_view::npos) break;
        if (parse_number_list(text.substr(open + 1, close - open - 1), values) &&
            values.size() == 4) {
            NormBBox box{quantize3(values[0]), quantize3(values[1]),
                         quantize3(values[2]), quantize3(values[3])};
            if (!box.valid())
                return {std::nullopt, BBoxParseFailure::malformed_bbox};
            return {box, BBoxParseFailure::none};
        }
        open = text.find('[', open + 1);
    }
    return {std::nullopt, BBoxParseFailure::no_bbox};
}

namespace {

double interval_overlap(double a0, double a1, double b0, double b1) {
    double lo = std::max(a0, b0);
    double hi = std::min(a1, b1);
    return hi > lo ? hi - lo : 0.0;
}

double iou_impl(double ax0, double ay0, double ax1, double ay1,
                double bx0, double by0, double bx1, double by1) {
    double inter = interval_overlap(ax0, ax1, bx0, bx1) *
                   interval_overlap(ay0, ay1, by0, by1);
    double uni = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

} // namespace

double iou(const PixelBBox& a, const PixelBBox& b) {
    if (!a.valid() || !b.valid()) throw std::invalid_argument("iou: invalid box");
    return iou_impl(a.x_min, a.y_min, a.x_max, a.y_max,
                    b.x_min, b.y_min, b.x_max, b.y_max);
}

double iou(const NormBBox& a, const NormBBox& b) {
    if (!a.valid() || !b.valid()) throw std::invalid_argument("iou: invalid box");
    return iou_impl(a.x_min, a.y_min, a.x_max, a.y_max,
                    b.x_min, b.y_min, b.x_max, b.y_max);
}

} // namespace affvqa
