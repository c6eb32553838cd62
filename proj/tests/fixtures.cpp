#include "fixtures.hpp"

#include "affvqa/mask.hpp"
#include "affvqa/raster_png.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace fixtures {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

json image_entry(int id, const std::string& name, int w, int h) {
    return json{{"id", id}, {"file_name", name}, {"width", w}, {"height", h}};
}

json ann_entry(int id, int image, int category, std::initializer_list<double> xywh) {
    return json{{"id", id},
                {"image_id", image},
                {"category_id", category},
                {"bbox", std::vector<double>(xywh)}};
}

} // namespace

CocoFixtureInfo write_coco_fixture(const std::string& dir, bool dirty) {
    json root;
    root["categories"] = {
        json{{"id", 1}, {"name", "ratchet"}},
        json{{"id", 2}, {"name", "screwdriver"}},
        json{{"id", 3}, {"name", "screwdriver:handle"}},
        json{{"id", 4}, {"name", "wrench"}},
        json{{"id", 5}, {"name", "wrench:handle"}},
        json{{"id", 6}, {"name", "hammer"}},
        json{{"id", 7}, {"name", "hammer:handle"}},
    };
    root["images"] = {
        image_entry(1, "img1.jpg", 640, 480),
        image_entry(2, "img2.jpg", 800, 600),
        image_entry(3, "img3.jpg", 1000, 1000),
        image_entry(4, "img4.jpg", 640, 480),
    };
    json anns = json::array();
    anns.push_back(ann_entry(1, 1, 1, {100, 120, 200, 160}));
    anns.push_back(ann_entry(2, 1, 2, {300, 200, 150, 80}));
    anns.push_back(ann_entry(3, 1, 3, {300, 220, 60, 40}));
    anns.push_back(ann_entry(4, 2, 4, {50, 50, 300, 100}));
    anns.push_back(ann_entry(5, 2, 5, {60, 60, 120, 40}));
    anns.push_back(ann_entry(6, 3, 6, {250, 250, 500, 500}));

    // Polygon segmentation matching its bbox exactly.
    json with_poly = ann_entry(7, 3, 7, {300, 600, 80, 120});
    with_poly["segmentation"] = {{300.0, 600.0, 380.0, 600.0, 380.0, 720.0, 300.0, 720.0}};
    anns.push_back(with_poly);

    // RLE segmentation: filled rectangle [200,300) x [100,180) on 640x480.
    json with_rle = ann_entry(8, 4, 1, {200, 100, 100, 80});
    with_rle["segmentation"] =
        affvqa::rle_to_json(affvqa::RleMask::filled_rect(640, 480, 200, 100, 300, 180));
    anns.push_back(with_rle);

    if (dirty) {
        anns.push_back(ann_entry(9, 1, 1, {600, 400, 100, 100})); // > 1 px out of bounds
        anns.push_back(ann_entry(10, 1, 2, {10, 10, 0, 50}));     // w == 0
    }
    root["annotations"] = anns;
    write_text(fs::path(dir) / "annotations.json", root.dump(1));
    return {};
}

RasterFixtureInfo write_raster_fixture(const std::string& dir) {
    fs::create_directories(dir);
    auto raster = [](int w, int h) {
        return affvqa::GrayRaster{w, h, std::vector<std::uint8_t>(
                                            static_cast<std::size_t>(w) * h, 0)};
    };
    auto fill = [](affvqa::GrayRaster& r, int x0, int y0, int x1, int y1, std::uint8_t v) {
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                r.pixels[static_cast<std::size_t>(y) * r.width + x] = v;
    };

    affvqa::GrayRaster hammer = raster(120, 90);
    fill(hammer, 10, 50, 40, 70, 1); // grasp
    fill(hammer, 60, 20, 100, 45, 5); // pound
    affvqa::write_gray_png((fs::path(dir) / "hammer_01.png").string(), hammer);

    affvqa::GrayRaster bowl = raster(100, 80);
    fill(bowl, 10, 10, 30, 30, 4);  // contain
    fill(bowl, 60, 40, 85, 60, 4);  // contain, disjoint
    affvqa::write_gray_png((fs::path(dir) / "bowl_01.png").string(), bowl);

    affvqa::GrayRaster knife = raster(140, 60);
    fill(knife, 70, 20, 130, 35, 2); // cut
    fill(knife, 10, 22, 60, 33, 1);  // grasp
    affvqa::write_gray_png((fs::path(dir) / "knife_01.png").string(), knife);
    return {};
}

PhysicalFixtureInfo write_physical_fixture(const std::string& dir, bool dirty) {
    json root;
    root["categories"] = {
        json{{"id", 1}, {"name", "mug"}},
        json{{"id", 2}, {"name", "bottle"}},
        json{{"id", 3}, {"name", "bowl"}},
    };
    root["images"] = {
        image_entry(1, "p1.jpg", 500, 400),
        image_entry(2, "p2.jpg", 640, 480),
    };
    root["annotations"] = {
        ann_entry(1, 1, 1, {50, 60, 120, 150}),
        ann_entry(2, 1, 2, {300, 40, 90, 220}),
        ann_entry(3, 2, 3, {100, 100, 200, 120}),
        ann_entry(4, 2, 1, {400, 200, 100, 130}),
    };
    write_text(fs::path(dir) / "annotations.json", root.dump(1));

    std::string csv =
        "id,transparency,liquid_storage,sealability,mass\n"
        "1,opaque,true,false,0.3\n"
        "2,transparent,true,true,0.2\n"
        "3,opaque,true,,0.5\n"
        "4,,false,false,\n";
    if (dirty) {
        csv += "99,opaque,true,false,0.1\n"; // unmatched id
        csv += "3,shiny,,,\n";               // unknown level
    }
    write_text(fs::path(dir) / "properties.csv", csv);
    return {};
}

} // namespace fixtures
