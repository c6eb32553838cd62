#include "affvqa/compiler.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace affvqa;
using namespace affvqa::compiler;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("affvqa-ctest-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

struct FixtureStore {
    TempDir coco_dir, raster_dir, phy_dir;
    ingest::AnnotationStore store;
    std::map<std::string, std::vector<augment::GroundingTask>> tasks;

    FixtureStore() {
        fixtures::write_coco_fixture(coco_dir.str());
        fixtures::write_raster_fixture(raster_dir.str());
        fixtures::write_physical_fixture(phy_dir.str());
        auto h = ingest::load_coco({ingest::CorpusKind::coco_detection, coco_dir.str(), "H"});
        auto r = ingest::load_part_affordance_maps(
            {ingest::CorpusKind::part_affordance_maps, raster_dir.str(), "R"});
        auto p = ingest::load_physical_properties(
            {ingest::CorpusKind::physical_properties, phy_dir.str(), "Phy"});
        store = ingest::merge({h.store, r.store, p.store});
        for (const auto& category : store.grounding_categories())
            tasks[category] = augment::fallback_generate(category, 5);
    }
};

CompileOptions canonical_options() {
    CompileOptions opt;
    opt.paraphrase = false;
    return opt;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("object task compilation follows the canonical templates") {
    FixtureStore fx;
    CompileStats stats;
    auto rec = compile_rec_object(fx.store, canonical_options(), stats);
    auto reg = compile_reg_object(fx.store, canonical_options(), stats);
    REQUIRE(rec.size() == 8);
    REQUIRE(reg.size() == 8);

    auto find = [](const std::vector<VqaSample>& v, const std::string& id) {
        auto it = std::find_if(v.begin(), v.end(),
                               [&](const VqaSample& s) { return s.id == id; });
        REQUIRE(it != v.end());
        return *it;
    };

    SUBCASE("REC names the category, and the part when present") {
        VqaSample ratchet = find(rec, "RecObject/H/1");
        CHECK(ratchet.prompt ==
              "Please provide bounding box coordinates of this region: a ratchet.");
        VqaSample handle = find(rec, "RecObject/H/3");
        CHECK(handle.prompt ==
              "Please provide bounding box coordinates of this region: handle of a "
              "screwdriver.");
        auto parsed = parse_bbox(handle.answer);
        REQUIRE(parsed.box.has_value());
    }
    SUBCASE("REG embeds the bbox and answers with the category phrase") {
        VqaSample ratchet = find(reg, "RegObject/H/1");
        CHECK(ratchet.answer == "A ratchet.");
        CHECK(ratchet.prompt.find("Please provide a short description of this region: [") == 0);
        // exactly one formatted bbox in the prompt
        CHECK(std::count(ratchet.prompt.begin(), ratchet.prompt.end(), '[') == 1);
    }
    SUBCASE("a full-image annotation compiles to the identity box") {
        ingest::AnnotationStore store;
        store.sources["T"] = ingest::CorpusKind::coco_detection;
        store.add_image(ImageRef{"T/i", 640, 480, "i.jpg"});
        AnnotationRecord record;
        record.id = "T/1";
        record.image = "T/i";
        record.bbox = PixelBBox{0, 0, 640, 480};
        record.category = "pan";
        record.source = "T";
        store.add_record(record);
        CompileStats s;
        auto samples = compile_rec_object(store, canonical_options(), s);
        REQUIRE(samples.size() == 1);
        CHECK(samples[0].answer == "[0.000, 0.000, 1.000, 1.000].");
    }
}

TEST_CASE("affordance task compilation") {
    FixtureStore fx;
    CompileStats stats;
    auto rec = compile_rec_affordance(fx.store, canonical_options(), stats);
    auto reg = compile_reg_affordance(fx.store, canonical_options(), stats);
    CHECK(rec.size() == 3 + 6);
    CHECK(reg.size() == 3 + 6);

    SUBCASE("part-based records use the part phrase") {
        auto it = std::find_if(rec.begin(), rec.end(), [](const VqaSample& s) {
            return s.id == "RecAffordance/H/5";
        });
        REQUIRE(it != rec.end());
        CHECK(it->prompt ==
              "Please provide bounding box coordinates of this region: handle of a wrench.");
    }
    SUBCASE("closed-set records use the template phrase") {
        auto it = std::find_if(rec.begin(), rec.end(), [](const VqaSample& s) {
            return s.id == "RecAffordance/R/bowl_01/contain/0";
        });
        REQUIRE(it != rec.end());
        CHECK(it->prompt.find("the part that can contain") != std::string::npos);
        CHECK(it->meta.at("affordance") == "contain");
    }
    SUBCASE("records without affordance information are excluded") {
        for (const auto& s : rec) CHECK(s.id.find("/Phy/") == std::string::npos);
    }
    SUBCASE("a part-name phrase for a hyphenated category") {
        ingest::AnnotationStore store;
        store.sources["T"] = ingest::CorpusKind::coco_detection;
        store.add_image(ImageRef{"T/i", 640, 480, "i.jpg"});
        AnnotationRecord record;
        record.id = "T/9";
        record.image = "T/i";
        record.bbox = PixelBBox{10, 10, 200, 100};
        record.category = "pliers-locking";
        record.part = "handle";
        record.source = "T";
        store.add_record(record);
        CompileStats s;
        auto samples = compile_rec_affordance(store, canonical_options(), s);
        REQUIRE(samples.size() == 1);
        CHECK(samples[0].prompt.find("handle of a pliers-locking.") != std::string::npos);
    }
}

TEST_CASE("grounding affordance compilation enforces the leakage rule") {
    FixtureStore fx;
    CompileStats stats;
    auto samples = compile_grounding_affordance(fx.store, fx.tasks, canonical_options(), stats);

    // 3 part records + 6 raster records, 3 fallback tasks each
    CHECK(samples.size() == 9 * 3);
    for (const auto& s : samples) {
        const std::string category = s.meta.at("category");
        CAPTURE(s.id);
        CHECK(augment::validate_grounding_task(s.prompt, category, {}).accepted);
        CHECK(s.prompt.find(s.meta.at("description")) != std::string::npos);
    }

    SUBCASE("categories without grounding tasks are skipped and counted") {
        CompileStats s;
        auto none = compile_grounding_affordance(fx.store, {}, canonical_options(), s);
        CHECK(none.empty());
        CHECK(s.skipped_no_grounding_task == 9);
    }
    SUBCASE("a leaking description that slipped into the artifact is rejected here") {
        auto tasks = fx.tasks;
        tasks["wrench"].push_back(
            augment::GroundingTask{"wrench", "use the wrench firmly",
                                   augment::GroundingTask::Origin::llm});
        CompileStats s;
        auto compiled = compile_grounding_affordance(fx.store, tasks, canonical_options(), s);
        CHECK(s.skipped_leaking_description == 1); // one wrench handle record
        for (const auto& sample : compiled)
            CHECK(sample.prompt.find("wrench") == std::string::npos);
    }
}

TEST_CASE("physical task compilation renders booleans and levels") {
    FixtureStore fx;
    CompileStats stats;
    auto samples = compile_reg_physical(fx.store, canonical_options(), stats);
    REQUIRE(samples.size() == 10); // (annotation, concept) pairs in the fixture

    auto find = [&](const std::string& id) {
        auto it = std::find_if(samples.begin(), samples.end(),
                               [&](const VqaSample& s) { return s.id == id; });
        REQUIRE(it != samples.end());
        return *it;
    };
    VqaSample liquid = find("RegPhysical/Phy/1/LiquidStorage");
    CHECK(liquid.prompt.find("whether this object can contain liquid") != std::string::npos);
    CHECK(liquid.answer == "True.");
    VqaSample seal = find("RegPhysical/Phy/1/Sealability");
    CHECK(seal.prompt.find("whether this object is sealed") != std::string::npos);
    CHECK(seal.answer == "False.");
    VqaSample transp = find("RegPhysical/Phy/1/Transparency");
    CHECK(transp.prompt.find("transparency level") != std::string::npos);
    CHECK(transp.answer == "Opaque.");
}

TEST_CASE("compile_all yields exact per-task multiplicities on the fixture store") {
    FixtureStore fx;
    auto result = compile_all(fx.store, fx.tasks, canonical_options());

    CHECK(result.stats.emitted_per_task.at("RecObject") == 8);
    CHECK(result.stats.emitted_per_task.at("RegObject") == 8);
    CHECK(result.stats.emitted_per_task.at("RecAffordance") == 9);
    CHECK(result.stats.emitted_per_task.at("RegAffordance") == 9);
    CHECK(result.stats.emitted_per_task.at("RecGroundingAffordance") == 27);
    CHECK(result.stats.emitted_per_task.at("RegPhysical") == 10);
    CHECK(result.samples.size() == 8 + 8 + 9 + 9 + 27 + 10);
    CHECK(std::is_sorted(result.samples.begin(), result.samples.end(),
                         [](const VqaSample& a, const VqaSample& b) { return a.id < b.id; }));

    SUBCASE("REC answers denormalize to within 1 px of the source annotation") {
        for (const auto& s : result.samples) {
            if (!is_rec_task(s.task)) continue;
            auto parsed = parse_bbox(s.answer);
            REQUIRE(parsed.box.has_value());
            const auto& rec = fx.store.annotations.at(s.source_annotation);
            PixelBBox back = denormalize_bbox(*parsed.box, fx.store.image_of(rec));
            CHECK(std::abs(back.x_min - rec.bbox.x_min) <= 1.0);
            CHECK(std::abs(back.y_min - rec.bbox.y_min) <= 1.0);
            CHECK(std::abs(back.x_max - rec.bbox.x_max) <= 1.0);
            CHECK(std::abs(back.y_max - rec.bbox.y_max) <= 1.0);
        }
    }
    SUBCASE("paraphrase mode stays within the template table and is seeded") {
        CompileOptions opt;
        opt.seed = 17;
        auto a = compile_all(fx.store, fx.tasks, opt);
        auto b = compile_all(fx.store, fx.tasks, opt);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            CHECK(a.samples[i].prompt == b.samples[i].prompt);
        opt.seed = 18;
        auto c = compile_all(fx.store, fx.tasks, opt);
        bool any_difference = false;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            any_difference |= a.samples[i].prompt != c.samples[i].prompt;
        CHECK(any_difference);
    }
}

TEST_CASE("mix_and_split subsamples deterministically and splits by image") {
    FixtureStore fx;
    auto compiled = compile_all(fx.store, fx.tasks, canonical_options());

    SUBCASE("no targets takes everything; val 0 keeps val empty") {
        MixSpec spec;
        spec.seed = 7;
        auto mixed = mix_and_split(compiled.samples, spec);
        CHECK(mixed.val.empty());
        CHECK(mixed.train.size() == compiled.samples.size());
    }
    SUBCASE("paper proportion preset lands within one sample of targets") {
        MixSpec spec;
        spec.seed = 7;
        spec.has_targets = true;
        spec.targets = MixSpec::targets_from_ratios(MixSpec::paper_proportions(), 21);
        std::size_t total_target = 0;
        for (const auto& [t, n] : spec.targets) total_target += n;
        CHECK(total_target == 21);
        auto mixed = mix_and_split(compiled.samples, spec);
        for (const auto& [t, n] : spec.targets) {
            CAPTURE(task_name(t));
            CHECK(mixed.achieved_per_task.at(task_name(t)) == n);
        }
    }
    SUBCASE("targets above availability clamp with a warning") {
        MixSpec spec;
        spec.seed = 1;
        spec.has_targets = true;
        spec.targets[TaskType::RegPhysical] = 999;
        auto mixed = mix_and_split(compiled.samples, spec);
        CHECK(mixed.achieved_per_task.at("RegPhysical") == 10);
        REQUIRE(mixed.warnings.size() == 1);
        CHECK(mixed.warnings[0].find("clamped") != std::string::npos);
    }
    SUBCASE("train and val image sets are disjoint") {
        MixSpec spec;
        spec.seed = 99;
        spec.val_fraction = 0.5;
        auto mixed = mix_and_split(compiled.samples, spec);
        CHECK(!mixed.val.empty());
        CHECK(!mixed.train.empty());
        std::set<std::string> train_images, val_images;
        for (const auto& s : mixed.train) train_images.insert(s.image);
        for (const auto& s : mixed.val) val_images.insert(s.image);
        for (const auto& image : val_images) CHECK(train_images.count(image) == 0);
    }
    SUBCASE("same seed emits byte-identical JSONL") {
        MixSpec spec;
        spec.seed = 42;
        spec.val_fraction = 0.25;
        spec.has_targets = true;
        spec.targets = MixSpec::targets_from_ratios(MixSpec::paper_proportions(), 42);
        TempDir out;
        auto first = mix_and_split(compiled.samples, spec);
        emit_jsonl(first.train, (out.path / "a.jsonl").string());
        auto second = mix_and_split(compiled.samples, spec);
        emit_jsonl(second.train, (out.path / "b.jsonl").string());
        CHECK(file_bytes(out.path / "a.jsonl") == file_bytes(out.path / "b.jsonl"));
        CHECK(!file_bytes(out.path / "a.jsonl").empty());
    }
}

TEST_CASE("emit_jsonl writes the conversations schema sorted by id") {
    FixtureStore fx;
    auto compiled = compile_all(fx.store, fx.tasks, canonical_options());
    TempDir out;
    fs::path path = out.path / "data.jsonl";
    emit_jsonl(compiled.samples, path.string());

    SUBCASE("line format and ordering") {
        std::ifstream in(path);
        std::string line;
        std::string prev_id;
        std::size_t lines = 0;
        while (std::getline(in, line)) {
            ++lines;
            auto j = nlohmann::json::parse(line);
            CHECK(j.at("conversations").size() == 2);
            CHECK(j.at("conversations").at(0).at("from") == "human");
            CHECK(j.at("conversations").at(1).at("from") == "gpt");
            std::string id = j.at("id").get<std::string>();
            CHECK(prev_id < id);
            prev_id = id;
        }
        CHECK(lines == compiled.samples.size());
    }
    SUBCASE("round-trip through read_jsonl") {
        auto back = read_jsonl(path.string());
        REQUIRE(back.size() == compiled.samples.size());
        CHECK(back.front().id == compiled.samples.front().id);
        CHECK(back.front().prompt == compiled.samples.front().prompt);
        CHECK(back.front().answer == compiled.samples.front().answer);
        CHECK(back.front().source_annotation == compiled.samples.front().source_annotation);
    }
    SUBCASE("empty input emits an empty file") {
        fs::path empty = out.path / "empty.jsonl";
        emit_jsonl({}, empty.string());
        CHECK(file_bytes(empty).empty());
    }
}

TEST_CASE("MixSpec parses targets, ratios and the preset") {
    auto direct = MixSpec::from_json(nlohmann::json::parse(
        R"({"seed": 3, "val_fraction": 0.2, "targets": {"RecObject": 5}})"));
    CHECK(direct.seed == 3);
    CHECK(direct.has_targets);
    CHECK(direct.targets.at(TaskType::RecObject) == 5);

    auto ratios = MixSpec::from_json(nlohmann::json::parse(
        R"({"ratios": {"RecObject": 0.5, "RegObject": 0.5}, "total": 7})"));
    CHECK(ratios.targets.at(TaskType::RecObject) + ratios.targets.at(TaskType::RegObject) == 7);

    auto preset = MixSpec::from_json(nlohmann::json::parse(
        R"({"preset": "paper-proportions", "total": 84})"));
    CHECK(preset.targets.at(TaskType::RecObject) == 18);
    CHECK(preset.targets.at(TaskType::RecGroundingAffordance) == 15);
    CHECK(preset.targets.at(TaskType::RegPhysical) == 7);

    CHECK_THROWS_AS(MixSpec::from_json(nlohmann::json::parse(
                        R"({"ratios": {"RecObject": 0.4}, "total": 10})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(MixSpec::from_json(nlohmann::json::parse(R"({"val_fraction": 1.5})")),
                    std::invalid_argument);
}
