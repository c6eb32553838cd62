#include "affvqa/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace fs = std::filesystem;

namespace affvqa::sim {

const char* reason_name(TrialResult::Reason r) {
    switch (r) {
        case TrialResult::Reason::ok: return "ok";
        case TrialResult::Reason::off_part: return "off-part";
        case TrialResult::Reason::bad_direction: return "bad-direction";
    }
    return "?";
}

bool point_in_polygon(const Vec2& point, const std::vector<Vec2>& polygon) {
    bool inside = false;
    std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = polygon[j];
        const Vec2& b = polygon[i];
        if ((b.y <= point.y && a.y > point.y) || (a.y <= point.y && b.y > point.y)) {
            double x_cross = b.x + (point.y - b.y) / (a.y - b.y) * (a.x - b.x);
            if (point.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

RleMask rasterize_polygon(const std::vector<Vec2>& polygon, int width, int height) {
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) * height, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (point_in_polygon(Vec2{x + 0.5, y + 0.5}, polygon))
                raster[static_cast<std::size_t>(y) * width + x] = 1;
    return RleMask::from_raster(width, height, raster);
}

namespace {

double opening_sign(const Joint& joint) {
    return joint.range_hi > 0 ? 1.0 : -1.0;
}

} // namespace

Vec2 motion_direction(const Joint& joint, const Vec2& contact_center) {
    double sign = opening_sign(joint);
    if (joint.kind == JointKind::prismatic) {
        Vec2 axis = policy::normalized(joint.axis);
        return Vec2{sign * axis.x, sign * axis.y};
    }
    Vec2 radius{contact_center.x - joint.pivot.x, contact_center.y - joint.pivot.y};
    Vec2 tangent{-radius.y, radius.x}; // perpendicular, positive rotation
    Vec2 unit = policy::normalized(tangent);
    return Vec2{sign * unit.x, sign * unit.y};
}

ArticulatedScene scene_from_json(const nlohmann::json& j) {
    ArticulatedScene scene;
    scene.id = j.at("id").get<std::string>();
    scene.canvas_width = j.at("canvas").at(0).get<int>();
    scene.canvas_height = j.at("canvas").at(1).get<int>();
    if (scene.canvas_width < 1 || scene.canvas_height < 1)
        throw std::invalid_argument("scene " + scene.id + ": bad canvas");

    auto read_polygon = [&](const char* key) {
        std::vector<Vec2> poly;
        for (const auto& v : j.at(key))
            poly.push_back(Vec2{v.at(0).get<double>(), v.at(1).get<double>()});
        if (poly.size() < 3)
            throw std::invalid_argument("scene " + scene.id + ": polygon " + key +
                                        " needs 3+ vertices");
        return poly;
    };
    scene.static_link = read_polygon("static_link");
    scene.movable_link = read_polygon("movable_link");

    const auto& joint = j.at("joint");
    std::string kind = joint.at("kind").get<std::string>();
    if (kind == "prismatic") {
        scene.joint.kind = JointKind::prismatic;
        scene.joint.axis = Vec2{joint.at("axis").at(0).get<double>(),
                                joint.at("axis").at(1).get<double>()};
        if (scene.joint.axis.x == 0 && scene.joint.axis.y == 0)
            throw std::invalid_argument("scene " + scene.id + ": zero joint axis");
    } else if (kind == "revolute") {
        scene.joint.kind = JointKind::revolute;
        scene.joint.pivot = Vec2{joint.at("pivot").at(0).get<double>(),
                                 joint.at("pivot").at(1).get<double>()};
    } else {
        throw std::invalid_argument("scene " + scene.id + ": unknown joint kind " + kind);
    }
    scene.joint.range_lo = joint.at("range").at(0).get<double>();
    scene.joint.range_hi = joint.at("range").at(1).get<double>();
    if (!(scene.joint.range_lo < scene.joint.range_hi))
        throw std::invalid_argument("scene " + scene.id + ": empty joint range");

    scene.handle_region = rle_from_json(j.at("handle_region"));
    if (scene.handle_region.width != scene.canvas_width ||
        scene.handle_region.height != scene.canvas_height)
        throw std::invalid_argument("scene " + scene.id + ": handle raster size mismatch");
    if (scene.handle_region.empty())
        throw std::invalid_argument("scene " + scene.id + ": empty handle region");

    scene.outward_normal = Vec2{j.at("normal").at(0).get<double>(),
                                j.at("normal").at(1).get<double>()};
    double norm = std::hypot(scene.outward_normal.x, scene.outward_normal.y);
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("scene " + scene.id + ": normal is not unit length");
    scene.outward_normal = policy::normalized(scene.outward_normal);

    scene.category = j.at("category").get<std::string>();
    if (scene.category.empty())
        throw std::invalid_argument("scene " + scene.id + ": empty category");

    // handle_region must lie on the movable link raster
    RleMask movable = rasterize_polygon(scene.movable_link, scene.canvas_width,
                                        scene.canvas_height);
    auto handle = scene.handle_region.to_raster();
    auto link = movable.to_raster();
    for (std::size_t i = 0; i < handle.size(); ++i)
        if (handle[i] && !link[i])
            throw std::invalid_argument("scene " + scene.id +
                                        ": handle region leaves the movable link");
    return scene;
}

nlohmann::json scene_to_json(const ArticulatedScene& scene) {
    auto polygon = [](const std::vector<Vec2>& poly) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : poly) arr.push_back({v.x, v.y});
        return arr;
    };
    nlohmann::json joint;
    if (scene.joint.kind == JointKind::prismatic) {
        joint = {{"kind", "prismatic"},
                 {"axis", {scene.joint.axis.x, scene.joint.axis.y}},
                 {"range", {scene.joint.range_lo, scene.joint.range_hi}}};
    } else {
        joint = {{"kind", "revolute"},
                 {"pivot", {scene.joint.pivot.x, scene.joint.pivot.y}},
                 {"range", {scene.joint.range_lo, scene.joint.range_hi}}};
    }
    return nlohmann::json{
        {"id", scene.id},
        {"canvas", {scene.canvas_width, scene.canvas_height}},
        {"static_link", polygon(scene.static_link)},
        {"movable_link", polygon(scene.movable_link)},
        {"joint", joint},
        {"handle_region", rle_to_json(scene.handle_region)},
        {"normal", {scene.outward_normal.x, scene.outward_normal.y}},
        {"category", scene.category},
    };
}

SceneLoadResult load_scenes(const std::string& path) {
    if (!fs::is_directory(path))
        throw std::runtime_error("load_scenes: not a directory: " + path);
    SceneLoadResult out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            std::ifstream in(file);
            nlohmann::json j;
            in >> j;
            out.scenes.push_back(scene_from_json(j));
        } catch (const std::exception& e) {
            out.errors.emplace_back(file.filename().string(), e.what());
        }
    }
    std::sort(out.scenes.begin(), out.scenes.end(),
              [](const ArticulatedScene& a, const ArticulatedScene& b) { return a.id < b.id; });
    return out;
}

TrialResult evaluate_plan(const ArticulatedScene& scene, const ContactPlan& plan,
                          double cos_threshold) {
    TrialResult result;
    result.scene_id = scene.id;
    result.plan = plan;

    Vec2 center{plan.contact.x + 0.5, plan.contact.y + 0.5};
    if (!point_in_polygon(center, scene.movable_link)) {
        result.reason = TrialResult::Reason::off_part;
        return result;
    }
    Vec2 motion;
    try {
        motion = motion_direction(scene.joint, center);
    } catch (const std::invalid_argument&) {
        result.reason = TrialResult::Reason::bad_direction; // contact at the pivot
        return result;
    }
    Vec2 approach = policy::normalized(plan.approach);
    double cos_theta = approach.x * motion.x + approach.y * motion.y;
    if (cos_theta >= cos_threshold) {
        result.success = true;
        result.reason = TrialResult::Reason::ok;
    } else {
        result.reason = TrialResult::Reason::bad_direction;
    }
    return result;
}

ContactPlan oracle_plan(const ArticulatedScene& scene) {
    ContactPlan plan;
    plan.contact = policy::contact_point(scene.handle_region);
    plan.approach = policy::normalized(scene.outward_normal);
    plan.source = ContactPlan::Source::mask_centroid;
    return plan;
}

SuiteResult run_suite(const std::vector<ArticulatedScene>& scenes,
                      const std::map<std::string, ContactPlan>& plans,
                      double cos_threshold) {
    SuiteResult out;
    std::map<std::string, std::size_t> successes;
    std::vector<const ArticulatedScene*> ordered;
    for (const auto& s : scenes) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const ArticulatedScene* a, const ArticulatedScene* b) { return a->id < b->id; });

    for (const ArticulatedScene* scene : ordered) {
        ++out.trials_per_category[scene->category];
        auto it = plans.find(scene->id);
        if (it == plans.end()) {
            TrialResult failed;
            failed.scene_id = scene->id;
            failed.reason = TrialResult::Reason::off_part;
            out.trials.push_back(failed);
            continue;
        }
        TrialResult trial = evaluate_plan(*scene, it->second, cos_threshold);
        if (trial.success) ++successes[scene->category];
        out.trials.push_back(std::move(trial));
    }
    double sum = 0;
    for (const auto& [category, total] : out.trials_per_category) {
        double rate = static_cast<double>(successes[category]) / static_cast<double>(total);
        out.success_per_category[category] = rate;
        sum += rate;
    }
    out.average = out.trials_per_category.empty()
                      ? 0.0
                      : sum / static_cast<double>(out.trials_per_category.size());
    return out;
}

double random_policy_rate(const ArticulatedScene& scene, double cos_threshold) {
    // Uniform pixel contact + uniform continuous approach angle. The angle
    // gate passes on an arc of 2*acos(t), i.e. probability acos(t)/pi.
    const double direction_pass = std::acos(cos_threshold) / std::numbers::pi;
    std::uint64_t hits = 0;
    std::uint64_t pivot_pixels = 0;
    for (int y = 0; y < scene.canvas_height; ++y)
        for (int x = 0; x < scene.canvas_width; ++x) {
            Vec2 center{x + 0.5, y + 0.5};
            if (!point_in_polygon(center, scene.movable_link)) continue;
            if (scene.joint.kind == JointKind::revolute &&
                center.x == scene.joint.pivot.x && center.y == scene.joint.pivot.y) {
                ++pivot_pixels; // motion undefined there; never succeeds
                continue;
            }
            ++hits;
        }
    (void)pivot_pixels;
    double canvas = static_cast<double>(scene.canvas_width) * scene.canvas_height;
    return static_cast<double>(hits) / canvas * direction_pass;
}

} // namespace affvqa::sim
