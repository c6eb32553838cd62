#pragma once

#include "affvqa/bbox.hpp"
#include "affvqa/mask.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affvqa {

// The seven closed-set affordances, in label-raster encoding order
// (raster value k encodes kClosedAffordances[k - 1]).
inline constexpr std::array<std::string_view, 7> kClosedAffordances = {
    "grasp", "cut", "scoop", "contain", "pound", "support", "wrap-grasp"};

bool is_closed_affordance(std::string_view name);

/// Either one of the seven closed-set affordances or a free-text
/// task-specific description.
struct AffordanceLabel {
    enum class Kind { closed_set, task_text };
    Kind kind = Kind::closed_set;
    std::string value;

    static AffordanceLabel closed(std::string_view name);
    static AffordanceLabel text(std::string_view description);
    bool operator==(const AffordanceLabel&) const = default;
};

enum class PhysicalConcept { transparency, liquid_storage, sealability };

inline constexpr std::array<std::string_view, 3> kTransparencyLevels = {
    "transparent", "translucent", "opaque"};

const char* concept_name(PhysicalConcept c);           // "Transparency", ...
std::optional<PhysicalConcept> concept_from_name(std::string_view name);

/// Transparency carries a level label; the other two concepts are boolean.
struct PhysicalProperty {
    PhysicalConcept kind = PhysicalConcept::transparency;
    bool bool_value = false;
    std::string level_value;

    static PhysicalProperty level(PhysicalConcept c, std::string_view lvl);
    static PhysicalProperty boolean(PhysicalConcept c, bool v);
    bool valid() const;

    /// Canonical answer token: "True" / "False" or a capitalized level.
    std::string answer_token() const;
    bool operator==(const PhysicalProperty&) const = default;
};

/// One annotated object or part instance.
struct AnnotationRecord {
    std::string id; // unique within a store; namespaced "TAG/raw" after load
    std::string image;
    PixelBBox bbox;
    std::optional<RleMask> mask;
    std::string category;
    std::string part;                       // "" when the record is a whole object
    std::optional<AffordanceLabel> affordance;
    std::vector<PhysicalProperty> physical;
    std::string source;                     // corpus tag, e.g. "H"
};

enum class TaskType {
    RecObject,
    RegObject,
    RecAffordance,
    RegAffordance,
    RecGroundingAffordance,
    RegPhysical,
};

inline constexpr std::array<TaskType, 6> kAllTaskTypes = {
    TaskType::RecObject,        TaskType::RegObject,
    TaskType::RecAffordance,    TaskType::RegAffordance,
    TaskType::RecGroundingAffordance, TaskType::RegPhysical};

const char* task_name(TaskType t); // "RecObject", ...
std::optional<TaskType> task_from_name(std::string_view name);
bool is_rec_task(TaskType t);

} // namespace affvqa
