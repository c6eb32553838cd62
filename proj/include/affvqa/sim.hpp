#pragma once

#include "affvqa/mask.hpp"
#include "affvqa/policy.hpp"

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa::sim {

using policy::ContactPlan;
using policy::Vec2;

enum class JointKind { prismatic, revolute };

struct Joint {
    JointKind kind = JointKind::prismatic;
    Vec2 axis;        // prismatic: slide direction
    Vec2 pivot;       // revolute: rotation center
    double range_lo = 0;
    double range_hi = 0; // opening is toward hi when hi > 0, else toward lo
};

/// Planar articulated object: a static link, one movable link with a single
/// joint, an annotated graspable region and its outward normal.
struct ArticulatedScene {
    std::string id;
    int canvas_width = 0;
    int canvas_height = 0;
    std::vector<Vec2> static_link;
    std::vector<Vec2> movable_link;
    Joint joint;
    RleMask handle_region; // on the movable link, canvas-sized
    Vec2 outward_normal;   // unit
    std::string category;
};

struct TrialResult {
    std::string scene_id;
    ContactPlan plan;
    bool success = false;
    enum class Reason { ok, off_part, bad_direction } reason = Reason::off_part;
};

const char* reason_name(TrialResult::Reason r);

/// Point-in-polygon (even-odd rule) on continuous coordinates.
bool point_in_polygon(const Vec2& point, const std::vector<Vec2>& polygon);

/// Pixel-center rasterization of a polygon onto the canvas.
RleMask rasterize_polygon(const std::vector<Vec2>& polygon, int width, int height);

/// Direction the contact point moves under positive opening motion;
/// prismatic joints slide along the axis, revolute joints move along the
/// tangent perpendicular to the pivot radius.
Vec2 motion_direction(const Joint& joint, const Vec2& contact_center);

/// Parses one scene from the JSON scene schema and checks its invariants.
ArticulatedScene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const ArticulatedScene& scene);

struct SceneLoadResult {
    std::vector<ArticulatedScene> scenes; // sorted by id
    std::vector<std::pair<std::string, std::string>> errors; // (file, message)
};

/// Loads every *.json under path; invalid scenes are skipped and reported.
SceneLoadResult load_scenes(const std::string& path);

/// Success iff the contact pixel center lies on the movable link and the
/// approach direction aligns with the instantaneous opening motion at the
/// contact (cos theta >= threshold).
TrialResult evaluate_plan(const ArticulatedScene& scene, const ContactPlan& plan,
                          double cos_threshold = 0.5);

/// Ground-truth plan: handle-centroid contact with the outward normal.
ContactPlan oracle_plan(const ArticulatedScene& scene);

struct SuiteResult {
    std::map<std::string, double> success_per_category;
    std::map<std::string, std::size_t> trials_per_category;
    double average = 0.0; // unweighted over categories
    std::vector<TrialResult> trials;
};

/// One plan per scene keyed by scene id; a scene without a plan counts as a
/// failure with reason off-part.
SuiteResult run_suite(const std::vector<ArticulatedScene>& scenes,
                      const std::map<std::string, ContactPlan>& plans,
                      double cos_threshold = 0.5);

/// Expected success probability of a uniform-random policy on one scene:
/// exhaustive sweep over every canvas pixel with the direction gate
/// integrated exactly over the continuous angle.
double random_policy_rate(const ArticulatedScene& scene, double cos_threshold = 0.5);

} // namespace affvqa::sim
