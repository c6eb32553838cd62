#include "affvqa/annotation.hpp"

#include <algorithm>
#include <stdexcept>

namespace affvqa {

bool is_closed_affordance(std::string_view name) {
    return std::find(kClosedAffordances.begin(), kClosedAffordances.end(), name) !=
           kClosedAffordances.end();
}

AffordanceLabel AffordanceLabel::closed(std::string_view name) {
    if (!is_closed_affordance(name))
        throw std::invalid_argument("AffordanceLabel: unknown closed-set affordance '" +
                                    std::string(name) + "'");
    return AffordanceLabel{Kind::closed_set, std::string(name)};
}

AffordanceLabel AffordanceLabel::text(std::string_view description) {
    if (description.empty())
        throw std::invalid_argument("AffordanceLabel: empty task description");
    return AffordanceLabel{Kind::task_text, std::string(description)};
}

const char* concept_name(PhysicalConcept c) {
    switch (c) {
        case PhysicalConcept::transparency: return "Transparency";
        case PhysicalConcept::liquid_storage: return "LiquidStorage";
        case PhysicalConcept::sealability: return "Sealability";
    }
    return "?";
}

std::optional<PhysicalConcept> concept_from_name(std::string_view name) {
    if (name == "Transparency") return PhysicalConcept::transparency;
    if (name == "LiquidStorage") return PhysicalConcept::liquid_storage;
    if (name == "Sealability") return PhysicalConcept::sealability;
    return std::nullopt;
}

PhysicalProperty PhysicalProperty::level(PhysicalConcept c, std::string_view lvl) {
    PhysicalProperty p;
    p.kind = c;
    p.level_value = std::string(lvl);
    if (!p.valid())
        throw std::invalid_argument("PhysicalProperty: bad level '" + std::string(lvl) + "'");
    return p;
}

PhysicalProperty PhysicalProperty::boolean(PhysicalConcept c, bool v) {
    PhysicalProperty p;
    p.kind = c;
    p.bool_value = v;
    if (!p.valid())
        throw std::invalid_argument("PhysicalProperty: concept is not boolean");
    return p;
}

bool PhysicalProperty::valid() const {
    if (kind == PhysicalConcept::transparency)
        return std::find(kTransparencyLevels.begin(), kTransparencyLevels.end(),
                         level_value) != kTransparencyLevels.end();
    return level_value.empty();
}

std::string PhysicalProperty::answer_token() const {
    if (kind == PhysicalConcept::transparency) {
        std::string s = level_value;
        if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        return s;
    }
    return bool_value ? "True" : "False";
}

const char* task_name(TaskType t) {
    switch (t) {
        case TaskType::RecObject: return "RecObject";
        case TaskType::RegObject: return "RegObject";
        case TaskType::RecAffordance: return "RecAffordance";
        case TaskType::RegAffordance: return "RegAffordance";
        case TaskType::RecGroundingAffordance: return "RecGroundingAffordance";
        case TaskType::RegPhysical: return "RegPhysical";
    }
    return "?";
}

std::optional<TaskType> task_from_name(std::string_view name) {
    for (TaskType t : kAllTaskTypes)
        if (name == task_name(t)) return t;
    return std::nullopt;
}

bool is_rec_task(TaskType t) {
    return t == TaskType::RecObject || t == TaskType::RecAffordance ||
           t == TaskType::RecGroundingAffordance;
}

} // namespace affvqa
