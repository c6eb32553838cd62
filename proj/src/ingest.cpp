#include "affvqa/ingest.hpp"

#include "affvqa/raster_png.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace affvqa::ingest {

const char* corpus_kind_name(CorpusKind k) {
    switch (k) {
        case CorpusKind::coco_detection: return "coco-detection";
        case CorpusKind::part_affordance_maps: return "part-affordance-maps";
        case CorpusKind::physical_properties: return "physical-properties";
    }
    return "?";
}

std::optional<CorpusKind> corpus_kind_from_name(std::string_view name) {
    if (name == "coco-detection") return CorpusKind::coco_detection;
    if (name == "part-affordance-maps") return CorpusKind::part_affordance_maps;
    if (name == "physical-properties") return CorpusKind::physical_properties;
    return std::nullopt;
}

void LoadReport::merge_from(const LoadReport& other) {
    for (const auto& [k, v] : other.images_per_source) images_per_source[k] += v;
    for (const auto& [k, v] : other.records_per_source) records_per_source[k] += v;
    for (const auto& [k, v] : other.records_per_capability) records_per_capability[k] += v;
    errors.insert(errors.end(), other.errors.begin(), other.errors.end());
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    invalid_records += other.invalid_records;
}

nlohmann::json LoadReport::to_json() const {
    auto issues = [](const std::vector<LoadIssue>& v) {
        nlohmann::json arr = nlohmann::json::array();
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& issue : sorted)
            arr.push_back({{"where", issue.where}, {"message", issue.message}});
        return arr;
    };
    return nlohmann::json{
        {"images_per_source", images_per_source},
        {"records_per_source", records_per_source},
        {"records_per_capability", records_per_capability},
        {"invalid_records", invalid_records},
        {"errors", issues(errors)},
        {"warnings", issues(warnings)},
    };
}

void AnnotationStore::add_image(ImageRef image) {
    if (!image.valid()) throw std::invalid_argument("add_image: invalid image " + image.id);
    if (!images.emplace(image.id, image).second)
        throw std::invalid_argument("add_image: duplicate id " + image.id);
}

void AnnotationStore::add_record(AnnotationRecord record) {
    if (record.id.empty() || record.category.empty())
        throw std::invalid_argument("add_record: missing id or category");
    if (!images.count(record.image))
        throw std::invalid_argument("add_record: unresolved image " + record.image);
    if (!annotations.emplace(record.id, std::move(record)).second)
        throw std::invalid_argument("add_record: duplicate id");
}

const ImageRef& AnnotationStore::image_of(const AnnotationRecord& record) const {
    auto it = images.find(record.image);
    if (it == images.end())
        throw std::invalid_argument("image_of: unresolved image " + record.image);
    return it->second;
}

TaskCapability AnnotationStore::capability(const AnnotationRecord& record) const {
    TaskCapability cap;
    auto it = sources.find(record.source);
    CorpusKind kind = it != sources.end() ? it->second : CorpusKind::coco_detection;
    switch (kind) {
        case CorpusKind::coco_detection:
            cap.object = true;
            cap.affordance = !record.part.empty();
            cap.grounding = !record.part.empty();
            break;
        case CorpusKind::part_affordance_maps:
            cap.affordance = record.affordance.has_value();
            cap.grounding = record.affordance.has_value();
            break;
        case CorpusKind::physical_properties:
            cap.physical = !record.physical.empty();
            break;
    }
    return cap;
}

std::vector<const AnnotationRecord*> AnnotationStore::by_image(const std::string& image_id) const {
    std::vector<const AnnotationRecord*> out;
    for (const auto& [id, rec] : annotations)
        if (rec.image == image_id) out.push_back(&rec);
    return out;
}

std::vector<const AnnotationRecord*> AnnotationStore::by_category(const std::string& category) const {
    std::vector<const AnnotationRecord*> out;
    for (const auto& [id, rec] : annotations)
        if (rec.category == category) out.push_back(&rec);
    return out;
}

std::vector<std::string> AnnotationStore::grounding_categories() const {
    std::set<std::string> cats;
    for (const auto& [id, rec] : annotations)
        if (capability(rec).grounding) cats.insert(rec.category);
    return {cats.begin(), cats.end()};
}

namespace {

nlohmann::json bbox_to_json(const PixelBBox& b) {
    return nlohmann::json{b.x_min, b.y_min, b.x_max, b.y_max};
}

PixelBBox bbox_from_json(const nlohmann::json& j) {
    return PixelBBox{j.at(0).get<double>(), j.at(1).get<double>(),
                     j.at(2).get<double>(), j.at(3).get<double>()};
}

nlohmann::json property_to_json(const PhysicalProperty& p) {
    nlohmann::json j{{"concept", concept_name(p.kind)}};
    if (p.kind == PhysicalConcept::transparency)
        j["value"] = p.level_value;
    else
        j["value"] = p.bool_value;
    return j;
}

PhysicalProperty property_from_json(const nlohmann::json& j) {
    auto c = concept_from_name(j.at("concept").get<std::string>());
    if (!c) throw std::invalid_argument("unknown physical concept");
    if (*c == PhysicalConcept::transparency)
        return PhysicalProperty::level(*c, j.at("value").get<std::string>());
    return PhysicalProperty::boolean(*c, j.at("value").get<bool>());
}

} // namespace

nlohmann::json AnnotationStore::to_json() const {
    nlohmann::json imgs = nlohmann::json::array();
    for (const auto& [id, img] : images)
        imgs.push_back({{"id", img.id},
                        {"width", img.width},
                        {"height", img.height},
                        {"path", img.path}});
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& [id, rec] : annotations) {
        nlohmann::json r{{"id", rec.id},
                         {"image", rec.image},
                         {"bbox", bbox_to_json(rec.bbox)},
                         {"category", rec.category},
                         {"source", rec.source}};
        if (!rec.part.empty()) r["part"] = rec.part;
        if (rec.affordance) {
            r["affordance"] = {{"kind", rec.affordance->kind == AffordanceLabel::Kind::closed_set
                                            ? "closed"
                                            : "text"},
                               {"value", rec.affordance->value}};
        }
        if (!rec.physical.empty()) {
            nlohmann::json props = nlohmann::json::array();
            for (const auto& p : rec.physical) props.push_back(property_to_json(p));
            r["physical"] = props;
        }
        if (rec.mask) r["mask"] = rle_to_json(*rec.mask);
        recs.push_back(std::move(r));
    }
    nlohmann::json srcs = nlohmann::json::object();
    for (const auto& [tag, kind] : sources) srcs[tag] = corpus_kind_name(kind);
    return nlohmann::json{{"images", imgs}, {"annotations", recs}, {"sources", srcs}};
}

AnnotationStore AnnotationStore::from_json(const nlohmann::json& j) {
    AnnotationStore store;
    for (const auto& [tag, kind] : j.at("sources").items()) {
        auto k = corpus_kind_from_name(kind.get<std::string>());
        if (!k) throw std::invalid_argument("store: unknown corpus kind");
        store.sources[tag] = *k;
    }
    for (const auto& img : j.at("images"))
        store.add_image(ImageRef{img.at("id").get<std::string>(),
                                 img.at("width").get<int>(),
                                 img.at("height").get<int>(),
                                 img.value("path", "")});
    for (const auto& r : j.at("annotations")) {
        AnnotationRecord rec;
        rec.id = r.at("id").get<std::string>();
        rec.image = r.at("image").get<std::string>();
        rec.bbox = bbox_from_json(r.at("bbox"));
        rec.category = r.at("category").get<std::string>();
        rec.source = r.at("source").get<std::string>();
        rec.part = r.value("part", "");
        if (r.contains("affordance")) {
            const auto& a = r.at("affordance");
            rec.affordance = a.at("kind").get<std::string>() == "closed"
                                 ? AffordanceLabel::closed(a.at("value").get<std::string>())
                                 : AffordanceLabel::text(a.at("value").get<std::string>());
        }
        if (r.contains("physical"))
            for (const auto& p : r.at("physical")) rec.physical.push_back(property_from_json(p));
        if (r.contains("mask")) rec.mask = rle_from_json(r.at("mask"));
        store.add_record(std::move(rec));
    }
    return store;
}

void AnnotationStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FatalLoadError("cannot write store: " + path);
    out << to_json().dump(1) << '\n';
}

AnnotationStore AnnotationStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FatalLoadError("cannot read store: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FatalLoadError("store parse failure: " + std::string(e.what()));
    }
    return from_json(j);
}

// ---------------------------------------------------------------------------
// COCO-style detection loader

namespace {

std::string json_id_to_string(const nlohmann::json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw std::invalid_argument("id must be a string or integer");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FatalLoadError("missing file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FatalLoadError("JSON parse failure in " + path + ": " + e.what());
    }
    return j;
}

std::string coco_annotation_path(const CorpusSpec& spec) {
    if (fs::is_directory(spec.root)) return (fs::path(spec.root) / "annotations.json").string();
    return spec.root;
}

// Even-odd scanline fill at pixel centers; polygons are COCO-style flat
// [x0, y0, x1, y1, ...] lists.
RleMask rasterize_polygons(const std::vector<std::vector<double>>& polygons,
                           int width, int height) {
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) * height, 0);
    for (const auto& poly : polygons) {
        std::size_t n = poly.size() / 2;
        if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
        for (int y = 0; y < height; ++y) {
            double cy = y + 0.5;
            std::vector<double> xs;
            for (std::size_t i = 0; i < n; ++i) {
                double x0 = poly[2 * i], y0 = poly[2 * i + 1];
                double x1 = poly[2 * ((i + 1) % n)], y1 = poly[2 * ((i + 1) % n) + 1];
                if ((y0 <= cy && y1 > cy) || (y1 <= cy && y0 > cy))
                    xs.push_back(x0 + (cy - y0) / (y1 - y0) * (x1 - x0));
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                int from = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
                int to = std::min(width - 1, static_cast<int>(std::floor(xs[i + 1] - 0.5)));
                for (int x = from; x <= to; ++x)
                    raster[static_cast<std::size_t>(y) * width + x] = 1;
            }
        }
    }
    return RleMask::from_raster(width, height, raster);
}

// Clamps excursions of at most 1 px into the image; larger ones are the
// caller's per-record error.
bool clamp_to_image(PixelBBox& box, const ImageRef& image) {
    if (box.x_min < -1.0 || box.y_min < -1.0 ||
        box.x_max > image.width + 1.0 || box.y_max > image.height + 1.0)
        return false;
    box.x_min = std::max(box.x_min, 0.0);
    box.y_min = std::max(box.y_min, 0.0);
    box.x_max = std::min(box.x_max, static_cast<double>(image.width));
    box.y_max = std::min(box.y_max, static_cast<double>(image.height));
    return box.valid();
}

struct CocoParseOut {
    AnnotationStore store;
    LoadReport report;
    // raw annotation id -> namespaced record id, for property attachment
    std::map<std::string, std::string> raw_to_record;
};

CocoParseOut parse_coco_file(const CorpusSpec& spec, CorpusKind kind) {
    CocoParseOut out;
    out.store.sources[spec.tag] = kind;
    nlohmann::json root = read_json_file(coco_annotation_path(spec));
    if (!root.contains("images") || !root.contains("annotations") ||
        !root.contains("categories"))
        throw FatalLoadError("not a COCO detection file: " + coco_annotation_path(spec));

    std::map<std::string, std::pair<std::string, std::string>> categories; // id -> (category, part)
    for (const auto& cat : root.at("categories")) {
        std::string name = cat.at("name").get<std::string>();
        std::string part;
        if (auto sep = name.find(':'); sep != std::string::npos) {
            part = name.substr(sep + 1);
            name = name.substr(0, sep);
        }
        categories[json_id_to_string(cat.at("id"))] = {name, part};
    }

    std::map<std::string, std::string> image_ids; // raw -> namespaced
    for (const auto& img : root.at("images")) {
        std::string raw;
        try {
            raw = json_id_to_string(img.at("id"));
            ImageRef ref{spec.tag + "/" + raw, img.at("width").get<int>(),
                         img.at("height").get<int>(), img.value("file_name", "")};
            if (!ref.valid()) throw std::invalid_argument("non-positive dimensions");
            out.store.add_image(ref);
            image_ids[raw] = ref.id;
            ++out.report.images_per_source[spec.tag];
        } catch (const std::exception& e) {
            out.report.errors.push_back({spec.tag + "/image/" + raw, e.what()});
        }
    }

    for (const auto& ann : root.at("annotations")) {
        std::string raw;
        try {
            raw = json_id_to_string(ann.at("id"));
            AnnotationRecord rec;
            rec.id = spec.tag + "/" + raw;
            rec.source = spec.tag;

            auto img_it = image_ids.find(json_id_to_string(ann.at("image_id")));
            if (img_it == image_ids.end())
                throw std::invalid_argument("unresolvable image id");
            rec.image = img_it->second;
            const ImageRef& image = out.store.images.at(rec.image);

            auto cat_it = categories.find(json_id_to_string(ann.at("category_id")));
            if (cat_it == categories.end())
                throw std::invalid_argument("unknown category id");
            rec.category = cat_it->second.first;
            rec.part = cat_it->second.second;

            const auto& bb = ann.at("bbox");
            double w = bb.at(2).get<double>(), h = bb.at(3).get<double>();
            if (w <= 0 || h <= 0) throw std::invalid_argument("malformed bbox (w or h <= 0)");
            rec.bbox = PixelBBox{bb.at(0).get<double>(), bb.at(1).get<double>(),
                                 bb.at(0).get<double>() + w, bb.at(1).get<double>() + h};
            if (!clamp_to_image(rec.bbox, image))
                throw std::invalid_argument("bbox exceeds image bounds by more than 1 px");

            if (ann.contains("segmentation") && !ann.at("segmentation").is_null()) {
                const auto& seg = ann.at("segmentation");
                RleMask mask;
                if (seg.is_object()) {
                    if (seg.contains("counts") && seg.at("counts").is_string())
                        throw std::invalid_argument("compressed RLE strings are not supported");
                    mask = rle_from_json(seg);
                    if (mask.width != image.width || mask.height != image.height)
                        throw std::invalid_argument("mask dimensions do not match image");
                } else if (seg.is_array()) {
                    mask = rasterize_polygons(
                        seg.get<std::vector<std::vector<double>>>(), image.width, image.height);
                } else {
                    throw std::invalid_argument("unsupported segmentation format");
                }
                if (mask.empty()) throw std::invalid_argument("empty mask");
                PixelBBox tight = bbox_from_mask(mask);
                if (std::abs(tight.x_min - rec.bbox.x_min) > 1.0 ||
                    std::abs(tight.y_min - rec.bbox.y_min) > 1.0 ||
                    std::abs(tight.x_max - rec.bbox.x_max) > 1.0 ||
                    std::abs(tight.y_max - rec.bbox.y_max) > 1.0)
                    throw std::invalid_argument("bbox is not the tight box of the mask (+-1 px)");
                rec.mask = std::move(mask);
            }

            out.store.add_record(std::move(rec));
            out.raw_to_record[raw] = spec.tag + "/" + raw;
            ++out.report.records_per_source[spec.tag];
        } catch (const std::exception& e) {
            out.report.errors.push_back({spec.tag + "/" + raw, e.what()});
        }
    }
    return out;
}

} // namespace

LoadResult load_coco(const CorpusSpec& spec) {
    auto parsed = parse_coco_file(spec, CorpusKind::coco_detection);
    return {std::move(parsed.store), std::move(parsed.report)};
}

// ---------------------------------------------------------------------------
// Part-affordance label rasters

namespace {

// Category convention for raster corpora: file stem up to the first '_'
// ("hammer_01.png" -> "hammer").
std::string category_from_stem(const std::string& stem) {
    auto sep = stem.find('_');
    return sep == std::string::npos ? stem : stem.substr(0, sep);
}

} // namespace

LoadResult load_part_affordance_maps(const CorpusSpec& spec) {
    if (!fs::is_directory(spec.root))
        throw FatalLoadError("not a directory: " + spec.root);
    LoadResult out;
    out.store.sources[spec.tag] = CorpusKind::part_affordance_maps;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(spec.root))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        GrayRaster raster;
        try {
            raster = read_gray_png(file.string());
        } catch (const std::exception& e) {
            out.report.errors.push_back({spec.tag + "/" + stem, e.what()});
            continue;
        }
        if (std::any_of(raster.pixels.begin(), raster.pixels.end(),
                        [](std::uint8_t v) { return v > 7; })) {
            out.report.errors.push_back(
                {spec.tag + "/" + stem, "label value outside 0..7"});
            continue;
        }
        ImageRef image{spec.tag + "/" + stem, raster.width, raster.height,
                       file.filename().string()};
        out.store.add_image(image);
        ++out.report.images_per_source[spec.tag];

        bool any = false;
        for (std::uint8_t value = 1; value <= 7; ++value) {
            auto comps = label_components(raster.width, raster.height, raster.pixels, value);
            for (std::size_t k = 0; k < comps.size(); ++k) {
                AnnotationRecord rec;
                rec.id = spec.tag + "/" + stem + "/" +
                         std::string(kClosedAffordances[value - 1]) + "/" + std::to_string(k);
                rec.image = image.id;
                rec.source = spec.tag;
                rec.category = category_from_stem(stem);
                rec.affordance = AffordanceLabel::closed(kClosedAffordances[value - 1]);
                rec.mask = comps[k];
                rec.bbox = bbox_from_mask(comps[k]);
                out.store.add_record(std::move(rec));
                ++out.report.records_per_source[spec.tag];
                any = true;
            }
        }
        if (!any)
            out.report.warnings.push_back({spec.tag + "/" + stem, "empty label raster"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Physical-property tables

namespace {

// Minimal CSV reader: header row, comma separation, double-quoted fields
// may contain commas.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FatalLoadError("missing file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::optional<PhysicalConcept> concept_from_column(const std::string& column) {
    std::string c = lower(column);
    if (c == "transparency") return PhysicalConcept::transparency;
    if (c == "liquid_storage" || c == "liquidstorage" || c == "liquids_storage")
        return PhysicalConcept::liquid_storage;
    if (c == "sealability") return PhysicalConcept::sealability;
    return std::nullopt; // out-of-focus concept; ignored
}

std::optional<PhysicalProperty> parse_property(PhysicalConcept c, const std::string& raw) {
    std::string v = lower(raw);
    if (c == PhysicalConcept::transparency) {
        if (std::find(kTransparencyLevels.begin(), kTransparencyLevels.end(), v) ==
            kTransparencyLevels.end())
            return std::nullopt;
        return PhysicalProperty::level(c, v);
    }
    if (v == "true") return PhysicalProperty::boolean(c, true);
    if (v == "false") return PhysicalProperty::boolean(c, false);
    return std::nullopt;
}

// Rows normalized to (raw id, column -> cell) regardless of CSV/JSON origin.
struct PropertyRow {
    std::string raw_id;
    std::vector<std::pair<std::string, std::string>> cells;
};

std::vector<PropertyRow> read_property_table(const std::string& root, LoadReport& report,
                                             const std::string& tag) {
    fs::path csv = fs::path(root) / "properties.csv";
    fs::path json = fs::path(root) / "properties.json";
    std::vector<PropertyRow> rows;
    if (fs::exists(csv)) {
        auto raw = read_csv(csv.string());
        if (raw.empty()) throw FatalLoadError("empty property table: " + csv.string());
        const auto& header = raw.front();
        auto id_col = std::find_if(header.begin(), header.end(), [](const std::string& h) {
            return lower(h) == "id";
        });
        if (id_col == header.end())
            throw FatalLoadError("property table lacks an id column: " + csv.string());
        std::size_t id_idx = static_cast<std::size_t>(id_col - header.begin());
        for (std::size_t r = 1; r < raw.size(); ++r) {
            if (raw[r].size() != header.size()) {
                report.errors.push_back({tag + "/properties/row" + std::to_string(r),
                                         "column count mismatch"});
                continue;
            }
            PropertyRow row;
            row.raw_id = raw[r][id_idx];
            for (std::size_t c = 0; c < header.size(); ++c)
                if (c != id_idx) row.cells.emplace_back(header[c], raw[r][c]);
            rows.push_back(std::move(row));
        }
    } else if (fs::exists(json)) {
        nlohmann::json arr = read_json_file(json.string());
        if (!arr.is_array()) throw FatalLoadError("properties.json must be an array");
        for (const auto& entry : arr) {
            PropertyRow row;
            row.raw_id = json_id_to_string(entry.at("id"));
            for (const auto& [key, value] : entry.items()) {
                if (key == "id") continue;
                row.cells.emplace_back(
                    key, value.is_string() ? value.get<std::string>() : value.dump());
            }
            rows.push_back(std::move(row));
        }
    } else {
        throw FatalLoadError("no properties.csv or properties.json under " + root);
    }
    return rows;
}

} // namespace

LoadResult load_physical_properties(const CorpusSpec& spec) {
    auto parsed = parse_coco_file(spec, CorpusKind::physical_properties);
    LoadResult out{std::move(parsed.store), std::move(parsed.report)};

    auto rows = read_property_table(spec.root, out.report, spec.tag);
    for (const auto& row : rows) {
        auto rec_it = parsed.raw_to_record.find(row.raw_id);
        if (rec_it == parsed.raw_to_record.end()) {
            out.report.errors.push_back(
                {spec.tag + "/properties/" + row.raw_id, "no matching annotation"});
            continue;
        }
        AnnotationRecord& rec = out.store.annotations.at(rec_it->second);
        bool row_ok = true;
        std::vector<PhysicalProperty> parsed_props;
        for (const auto& [column, cell] : row.cells) {
            if (cell.empty()) continue; // unannotated
            auto c = concept_from_column(column);
            if (!c) continue; // out-of-focus concept, ignored silently
            auto prop = parse_property(*c, cell);
            if (!prop) {
                out.report.errors.push_back({spec.tag + "/properties/" + row.raw_id,
                                             "bad value '" + cell + "' for " + column});
                row_ok = false;
                break;
            }
            parsed_props.push_back(*prop);
        }
        if (row_ok)
            for (const auto& p : parsed_props) rec.physical.push_back(p);
    }
    return out;
}

LoadResult load_corpus(const CorpusSpec& spec) {
    if (spec.tag.empty()) throw FatalLoadError("corpus tag must be non-empty");
    switch (spec.kind) {
        case CorpusKind::coco_detection: return load_coco(spec);
        case CorpusKind::part_affordance_maps: return load_part_affordance_maps(spec);
        case CorpusKind::physical_properties: return load_physical_properties(spec);
    }
    throw FatalLoadError("unknown corpus kind");
}

AnnotationStore merge(const std::vector<AnnotationStore>& stores) {
    AnnotationStore merged;
    for (const auto& store : stores) {
        for (const auto& [tag, kind] : store.sources) {
            auto it = merged.sources.find(tag);
            if (it != merged.sources.end() && it->second != kind)
                throw FatalLoadError("conflicting kinds for source tag " + tag);
            merged.sources[tag] = kind;
        }
        for (const auto& [id, img] : store.images)
            if (!merged.images.emplace(id, img).second)
                throw FatalLoadError("image id collision after namespacing: " + id);
        for (const auto& [id, rec] : store.annotations)
            if (!merged.annotations.emplace(id, rec).second)
                throw FatalLoadError("record id collision after namespacing: " + id);
    }
    return merged;
}

LoadReport validate(const AnnotationStore& store) {
    LoadReport report;
    for (const auto& [id, img] : store.images) ++report.images_per_source[img.id.substr(0, img.id.find('/'))];
    for (const auto& [id, rec] : store.annotations) {
        std::string problem;
        auto img_it = store.images.find(rec.image);
        if (rec.id != id) problem = "key/id mismatch";
        else if (rec.category.empty()) problem = "empty category";
        else if (img_it == store.images.end()) problem = "unresolved image";
        else if (!rec.bbox.within(img_it->second)) problem = "bbox outside image";
        else if (rec.mask) {
            if (!rec.mask->valid() || rec.mask->empty()) problem = "invalid or empty mask";
            else {
                PixelBBox tight = bbox_from_mask(*rec.mask);
                if (std::abs(tight.x_min - rec.bbox.x_min) > 1.0 ||
                    std::abs(tight.y_min - rec.bbox.y_min) > 1.0 ||
                    std::abs(tight.x_max - rec.bbox.x_max) > 1.0 ||
                    std::abs(tight.y_max - rec.bbox.y_max) > 1.0)
                    problem = "bbox not tight around mask";
            }
        }
        if (problem.empty())
            for (const auto& p : rec.physical)
                if (!p.valid()) problem = "invalid physical property";

        if (!problem.empty()) {
            report.errors.push_back({id, problem});
            ++report.invalid_records;
            continue;
        }
        ++report.records_per_source[rec.source];
        TaskCapability cap = store.capability(rec);
        if (cap.object) ++report.records_per_capability["object"];
        if (cap.affordance) ++report.records_per_capability["affordance"];
        if (cap.grounding) ++report.records_per_capability["grounding"];
        if (cap.physical) ++report.records_per_capability["physical"];
    }
    return report;
}

} // namespace affvqa::ingest
