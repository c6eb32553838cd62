#pragma once

#include <string>

namespace fixtures {

// Synthetic desk-scale corpora in the shapes the loaders expect. All content
// is deterministic so record counts can be asserted exactly.

struct CocoFixtureInfo {
    std::size_t images = 4;
    std::size_t clean_records = 8;
    std::size_t part_records = 3; // screwdriver/wrench/hammer handles
};

// Hand-tool detection corpus ("H"): whole objects plus "object:part"
// categories, one polygon mask and one RLE mask. With dirty=true two extra
// invalid records are appended (out-of-bounds bbox, non-positive width).
CocoFixtureInfo write_coco_fixture(const std::string& dir, bool dirty = false);

struct RasterFixtureInfo {
    std::size_t images = 3;
    std::size_t records = 6; // hammer: 2, bowl: 2, knife: 2
};

// Label-raster corpus ("R"): hammer_01.png, bowl_01.png, knife_01.png.
RasterFixtureInfo write_raster_fixture(const std::string& dir);

struct PhysicalFixtureInfo {
    std::size_t images = 2;
    std::size_t records = 4;
    std::size_t property_count = 10; // (annotation, concept) pairs
};

// Household-object corpus ("Phy"): COCO boxes plus properties.csv. With
// dirty=true, adds an unknown level row and an unmatched id row.
PhysicalFixtureInfo write_physical_fixture(const std::string& dir, bool dirty = false);

} // namespace fixtures
