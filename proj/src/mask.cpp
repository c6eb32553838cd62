#include "affvqa/mask.hpp"

#include <algorithm>
#include <stdexcept>

namespace affvqa {

bool RleMask::valid() const {
    if (width < 1 || height < 1) return false;
    std::uint64_t total = 0;
    for (std::uint32_t r : runs) total += r;
    return total == static_cast<std::uint64_t>(width) * height;
}

std::uint64_t RleMask::foreground_count() const {
    std::uint64_t fg = 0;
    for (std::size_t i = 1; i < runs.size(); i += 2) fg += runs[i];
    return fg;
}

std::vector<std::uint8_t> RleMask::to_raster() const {
    if (!valid()) throw std::invalid_argument("RleMask: invalid run lengths");
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) * height, 0);
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i % 2 == 1) {
            for (std::uint32_t k = 0; k < runs[i]; ++k) {
                std::uint64_t idx = pos + k;
                int x = static_cast<int>(idx / height);
                int y = static_cast<int>(idx % height);
                raster[static_cast<std::size_t>(y) * width + x] = 1;
            }
        }
        pos += runs[i];
    }
    return raster;
}

RleMask RleMask::from_raster(int width, int height,
                             const std::vector<std::uint8_t>& raster) {
    if (width < 1 || height < 1 ||
        raster.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("RleMask::from_raster: bad dimensions");
    RleMask mask;
    mask.width = width;
    mask.height = height;
    std::uint32_t run = 0;
    bool fg = false; // runs start with background
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(width) * height; ++i) {
        int x = static_cast<int>(i / height);
        int y = static_cast<int>(i % height);
        bool on = raster[static_cast<std::size_t>(y) * width + x] != 0;
        if (on == fg) {
            ++run;
        } else {
            mask.runs.push_back(run);
            fg = on;
            run = 1;
        }
    }
    mask.runs.push_back(run);
    return mask;
}

RleMask RleMask::filled_rect(int width, int height,
                             int x0, int y0, int x1, int y1) {
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) * height, 0);
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width);
    y1 = std::min(y1, height);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            raster[static_cast<std::size_t>(y) * width + x] = 1;
    return from_raster(width, height, raster);
}

bool RleMask::pixel(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    std::uint64_t target = static_cast<std::uint64_t>(x) * height + y;
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        pos += runs[i];
        if (target < pos) return i % 2 == 1;
    }
    return false;
}

nlohmann::json rle_to_json(const RleMask& mask) {
    return nlohmann::json{{"size", {mask.height, mask.width}}, {"counts", mask.runs}};
}

RleMask rle_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("size") || !j.contains("counts"))
        throw std::invalid_argument("rle_from_json: missing size/counts");
    const auto& size = j.at("size");
    if (!size.is_array() || size.size() != 2)
        throw std::invalid_argument("rle_from_json: size must be [height, width]");
    if (!j.at("counts").is_array())
        throw std::invalid_argument("rle_from_json: counts must be an array");
    RleMask mask;
    mask.height = size.at(0).get<int>();
    mask.width = size.at(1).get<int>();
    mask.runs = j.at("counts").get<std::vector<std::uint32_t>>();
    if (!mask.valid())
        throw std::invalid_argument("rle_from_json: run lengths do not cover the raster");
    return mask;
}

PixelBBox bbox_from_mask(const RleMask& mask) {
    if (!mask.valid()) throw std::invalid_argument("bbox_from_mask: invalid mask");
    int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        if (i % 2 == 1) {
            for (std::uint32_t k = 0; k < mask.runs[i]; ++k) {
                std::uint64_t idx = pos + k;
                int x = static_cast<int>(idx / mask.height);
                int y = static_cast<int>(idx % mask.height);
                min_x = std::min(min_x, x);
                min_y = std::min(min_y, y);
                max_x = std::max(max_x, x);
                max_y = std::max(max_y, y);
            }
        }
        pos += mask.runs[i];
    }
    if (max_x < 0) throw std::invalid_argument("bbox_from_mask: empty mask");
    return PixelBBox{static_cast<double>(min_x), static_cast<double>(min_y),
                     static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
}

double mask_iou(const RleMask& a, const RleMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mask_iou: dimension mismatch");
    if (a.empty() || b.empty())
        throw std::invalid_argument("mask_iou: empty mask");
    auto ra = a.to_raster();
    auto rb = b.to_raster();
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        bool pa = ra[i] != 0, pb = rb[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

RleMask mask_intersect_rect(const RleMask& mask, int x0, int y0, int x1, int y1) {
    auto raster = mask.to_raster();
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (x < x0 || x >= x1 || y < y0 || y >= y1)
                raster[static_cast<std::size_t>(y) * mask.width + x] = 0;
    return RleMask::from_raster(mask.width, mask.height, raster);
}

namespace {

std::vector<RleMask> components_of(int width, int height,
                                   const std::vector<std::uint8_t>& on) {
    std::vector<RleMask> out;
    std::vector<std::uint8_t> seen(on.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < on.size(); ++start) {
        if (!on[start] || seen[start]) continue;
        std::vector<std::uint8_t> comp(on.size(), 0);
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            std::size_t idx = stack.back();
            stack.pop_back();
            comp[idx] = 1;
            int x = static_cast<int>(idx % width);
            int y = static_cast<int>(idx / width);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= width || ny[k] < 0 || ny[k] >= height) continue;
                std::size_t nidx = static_cast<std::size_t>(ny[k]) * width + nx[k];
                if (on[nidx] && !seen[nidx]) {
                    seen[nidx] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        out.push_back(RleMask::from_raster(width, height, comp));
    }
    return out;
}

} // namespace

std::vector<RleMask> connected_components(const RleMask& mask) {
    return components_of(mask.width, mask.height, mask.to_raster());
}

std::vector<RleMask> label_components(int width, int height,
                                      const std::vector<std::uint8_t>& labels,
                                      std::uint8_t value) {
    if (labels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("label_components: bad raster size");
    std::vector<std::uint8_t> on(labels.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) on[i] = labels[i] == value;
    return components_of(width, height, on);
}

} // namespace affvqa
