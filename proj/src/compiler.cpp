#include "affvqa/compiler.hpp"

#include "affvqa/rng.hpp"
#include "affvqa/templates_data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace affvqa::compiler {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string indefinite(const std::string& noun) {
    static const std::string vowels = "aeiou";
    if (!noun.empty() && vowels.find(static_cast<char>(std::tolower(
                             static_cast<unsigned char>(noun[0])))) != std::string::npos)
        return "an " + noun;
    return "a " + noun;
}

std::string fill(std::string tpl, const std::string& slot, const std::string& value) {
    if (auto pos = tpl.find(slot); pos != std::string::npos)
        tpl.replace(pos, slot.size(), value);
    return tpl;
}

const std::string& pick_template(const std::vector<std::string>& templates,
                                 const CompileOptions& opt, const std::string& sample_id) {
    if (templates.empty()) throw std::invalid_argument("empty template list");
    if (!opt.paraphrase || templates.size() == 1) return templates.front();
    auto rng = derive_rng(opt.seed, "tpl/" + sample_id);
    return templates[static_cast<std::size_t>(rng.next_below(templates.size()))];
}

// Phrase for a closed-set affordance region, e.g. "the part that can contain".
std::string affordance_phrase(const AffordanceLabel& label) {
    std::string verb = label.value;
    if (verb == "grasp") verb = "be grasped";
    else if (verb == "wrap-grasp") verb = "be wrap-grasped";
    return "the part that can " + verb;
}

std::optional<NormBBox> region_bbox(const ingest::AnnotationStore& store,
                                    const AnnotationRecord& rec, CompileStats& stats) {
    try {
        return normalize_bbox(rec.bbox, store.image_of(rec));
    } catch (const std::invalid_argument&) {
        ++stats.skipped_degenerate_bbox;
        return std::nullopt;
    }
}

VqaSample base_sample(const AnnotationRecord& rec, TaskType task, const std::string& id) {
    VqaSample s;
    s.id = id;
    s.task = task;
    s.image = rec.image;
    s.source_annotation = rec.id;
    s.meta["category"] = rec.category;
    if (!rec.part.empty()) s.meta["part"] = rec.part;
    if (rec.affordance) s.meta["affordance"] = rec.affordance->value;
    return s;
}

std::string object_phrase(const AnnotationRecord& rec) {
    if (!rec.part.empty()) return rec.part + " of " + indefinite(rec.category);
    return indefinite(rec.category);
}

std::string region_phrase(const AnnotationRecord& rec) {
    if (!rec.part.empty()) return rec.part + " of " + indefinite(rec.category);
    if (rec.affordance && rec.affordance->kind == AffordanceLabel::Kind::closed_set)
        return affordance_phrase(*rec.affordance) + " of " + indefinite(rec.category);
    return indefinite(rec.category);
}

void sort_by_id(std::vector<VqaSample>& samples) {
    std::sort(samples.begin(), samples.end(),
              [](const VqaSample& a, const VqaSample& b) { return a.id < b.id; });
}

} // namespace

TemplateSet TemplateSet::builtin() {
    static const TemplateSet set = from_json(nlohmann::json::parse(detail::kDefaultTemplatesJson));
    return set;
}

TemplateSet TemplateSet::from_json(const nlohmann::json& j) {
    TemplateSet set;
    set.rec_object = j.at("rec_object").get<std::vector<std::string>>();
    set.reg_object = j.at("reg_object").get<std::vector<std::string>>();
    set.rec_affordance = j.at("rec_affordance").get<std::vector<std::string>>();
    set.reg_affordance = j.at("reg_affordance").get<std::vector<std::string>>();
    set.rec_grounding_affordance =
        j.at("rec_grounding_affordance").get<std::vector<std::string>>();
    for (const auto& [concept_label, arr] : j.at("reg_physical").items())
        set.reg_physical[concept_label] = arr.get<std::vector<std::string>>();
    for (auto c : {"Transparency", "LiquidStorage", "Sealability"})
        if (!set.reg_physical.count(c) || set.reg_physical.at(c).empty())
            throw std::invalid_argument("template set lacks reg_physical templates for " +
                                        std::string(c));
    return set;
}

TemplateSet TemplateSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read template file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

nlohmann::json CompileStats::to_json() const {
    return nlohmann::json{
        {"emitted_per_task", emitted_per_task},
        {"skipped", {{"degenerate_bbox", skipped_degenerate_bbox},
                     {"no_grounding_task", skipped_no_grounding_task},
                     {"leaking_description", skipped_leaking_description}}}};
}

std::vector<VqaSample> compile_rec_object(const ingest::AnnotationStore& store,
                                          const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).object) continue;
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        VqaSample s = base_sample(rec, TaskType::RecObject, "RecObject/" + rec.id);
        s.prompt = fill(pick_template(opt.templates.rec_object, opt, s.id), "{phrase}",
                        object_phrase(rec));
        s.answer = format_bbox(*nbox) + ".";
        out.push_back(std::move(s));
        ++stats.emitted_per_task[task_name(TaskType::RecObject)];
    }
    return out;
}

std::vector<VqaSample> compile_reg_object(const ingest::AnnotationStore& store,
                                          const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).object) continue;
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        VqaSample s = base_sample(rec, TaskType::RegObject, "RegObject/" + rec.id);
        s.prompt = fill(pick_template(opt.templates.reg_object, opt, s.id), "{bbox}",
                        format_bbox(*nbox));
        s.answer = rec.part.empty() ? capitalized(indefinite(rec.category)) + "."
                                    : "The " + rec.part + " of " + indefinite(rec.category) + ".";
        out.push_back(std::move(s));
        ++stats.emitted_per_task[task_name(TaskType::RegObject)];
    }
    return out;
}

std::vector<VqaSample> compile_rec_affordance(const ingest::AnnotationStore& store,
                                              const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).affordance) continue;
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        VqaSample s = base_sample(rec, TaskType::RecAffordance, "RecAffordance/" + rec.id);
        s.prompt = fill(pick_template(opt.templates.rec_affordance, opt, s.id), "{phrase}",
                        region_phrase(rec));
        s.answer = format_bbox(*nbox) + ".";
        out.push_back(std::move(s));
        ++stats.emitted_per_task[task_name(TaskType::RecAffordance)];
    }
    return out;
}

std::vector<VqaSample> compile_reg_affordance(const ingest::AnnotationStore& store,
                                              const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).affordance) continue;
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        VqaSample s = base_sample(rec, TaskType::RegAffordance, "RegAffordance/" + rec.id);
        s.prompt = fill(pick_template(opt.templates.reg_affordance, opt, s.id), "{bbox}",
                        format_bbox(*nbox));
        s.answer = capitalized(region_phrase(rec)) + ".";
        out.push_back(std::move(s));
        ++stats.emitted_per_task[task_name(TaskType::RegAffordance)];
    }
    return out;
}

std::vector<VqaSample> compile_grounding_affordance(
    const ingest::AnnotationStore& store,
    const std::map<std::string, std::vector<augment::GroundingTask>>& tasks,
    const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).grounding) continue;
        auto task_it = tasks.find(rec.category);
        if (task_it == tasks.end() || task_it->second.empty()) {
            ++stats.skipped_no_grounding_task;
            continue;
        }
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        for (std::size_t k = 0; k < task_it->second.size(); ++k) {
            const auto& task = task_it->second[k];
            VqaSample s = base_sample(rec, TaskType::RecGroundingAffordance,
                                      "RecGroundingAffordance/" + rec.id + "/" +
                                          std::to_string(k));
            s.prompt = fill(pick_template(opt.templates.rec_grounding_affordance, opt, s.id),
                            "{description}", task.description);
            // The Listing-1 leakage rule is re-verified at compile time over
            // the whole prompt, not just the stored description.
            if (!augment::validate_grounding_task(s.prompt, rec.category, {}).accepted) {
                ++stats.skipped_leaking_description;
                continue;
            }
            s.answer = format_bbox(*nbox) + ".";
            s.meta["description"] = task.description;
            out.push_back(std::move(s));
            ++stats.emitted_per_task[task_name(TaskType::RecGroundingAffordance)];
        }
    }
    return out;
}

std::vector<VqaSample> compile_reg_physical(const ingest::AnnotationStore& store,
                                            const CompileOptions& opt, CompileStats& stats) {
    std::vector<VqaSample> out;
    for (const auto& [id, rec] : store.annotations) {
        if (!store.capability(rec).physical) continue;
        auto nbox = region_bbox(store, rec, stats);
        if (!nbox) continue;
        for (const auto& prop : rec.physical) {
            VqaSample s = base_sample(rec, TaskType::RegPhysical,
                                      "RegPhysical/" + rec.id + "/" + concept_name(prop.kind));
            s.prompt = fill(pick_template(opt.templates.reg_physical.at(concept_name(prop.kind)),
                                          opt, s.id),
                            "{bbox}", format_bbox(*nbox));
            s.answer = prop.answer_token() + ".";
            s.meta["concept"] = concept_name(prop.kind);
            out.push_back(std::move(s));
            ++stats.emitted_per_task[task_name(TaskType::RegPhysical)];
        }
    }
    return out;
}

CompileResult compile_all(const ingest::AnnotationStore& store,
                          const std::map<std::string, std::vector<augment::GroundingTask>>& tasks,
                          const CompileOptions& opt) {
    CompileResult result;
    for (TaskType t : kAllTaskTypes) result.stats.emitted_per_task[task_name(t)] = 0;
    auto append = [&](std::vector<VqaSample> batch) {
        result.samples.insert(result.samples.end(),
                              std::make_move_iterator(batch.begin()),
                              std::make_move_iterator(batch.end()));
    };
    append(compile_rec_object(store, opt, result.stats));
    append(compile_reg_object(store, opt, result.stats));
    append(compile_rec_affordance(store, opt, result.stats));
    append(compile_reg_affordance(store, opt, result.stats));
    append(compile_grounding_affordance(store, tasks, opt, result.stats));
    append(compile_reg_physical(store, opt, result.stats));
    sort_by_id(result.samples);
    return result;
}

std::map<TaskType, std::size_t> MixSpec::targets_from_ratios(
    const std::map<TaskType, double>& ratios, std::size_t total) {
    double sum = 0;
    for (const auto& [t, r] : ratios) {
        if (r < 0) throw std::invalid_argument("negative mix ratio");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("mix ratios must sum to 1");
    std::map<TaskType, std::size_t> targets;
    std::vector<std::pair<double, TaskType>> remainders;
    std::size_t assigned = 0;
    for (TaskType t : kAllTaskTypes) {
        auto it = ratios.find(t);
        if (it == ratios.end()) continue;
        double exact = it->second * static_cast<double>(total);
        std::size_t floor_v = static_cast<std::size_t>(exact);
        targets[t] = floor_v;
        assigned += floor_v;
        remainders.push_back({exact - static_cast<double>(floor_v), t});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned)
        ++targets[remainders[i].second];
    return targets;
}

std::map<TaskType, double> MixSpec::paper_proportions() {
    // Row proportions 36 : 26 : 15 : 7, REC/REG rows split evenly.
    const double total = 84.0;
    return {{TaskType::RecObject, 18.0 / total},
            {TaskType::RegObject, 18.0 / total},
            {TaskType::RecAffordance, 13.0 / total},
            {TaskType::RegAffordance, 13.0 / total},
            {TaskType::RecGroundingAffordance, 15.0 / total},
            {TaskType::RegPhysical, 7.0 / total}};
}

MixSpec MixSpec::from_json(const nlohmann::json& j) {
    MixSpec spec;
    spec.seed = j.value("seed", 0ULL);
    spec.val_fraction = j.value("val_fraction", 0.0);
    if (spec.val_fraction < 0.0 || spec.val_fraction > 1.0)
        throw std::invalid_argument("val_fraction must be in [0, 1]");
    if (j.contains("targets")) {
        spec.has_targets = true;
        for (const auto& [name, count] : j.at("targets").items()) {
            auto t = task_from_name(name);
            if (!t) throw std::invalid_argument("unknown task type in targets: " + name);
            spec.targets[*t] = count.get<std::size_t>();
        }
    } else if (j.contains("ratios")) {
        std::map<TaskType, double> ratios;
        for (const auto& [name, r] : j.at("ratios").items()) {
            auto t = task_from_name(name);
            if (!t) throw std::invalid_argument("unknown task type in ratios: " + name);
            ratios[*t] = r.get<double>();
        }
        spec.has_targets = true;
        spec.targets = targets_from_ratios(ratios, j.at("total").get<std::size_t>());
    } else if (j.value("preset", "") == "paper-proportions") {
        spec.has_targets = true;
        spec.targets = targets_from_ratios(paper_proportions(), j.at("total").get<std::size_t>());
    }
    return spec;
}

MixResult mix_and_split(const std::vector<VqaSample>& samples, const MixSpec& spec) {
    MixResult result;
    std::map<TaskType, std::vector<VqaSample>> by_task;
    for (const auto& s : samples) by_task[s.task].push_back(s);

    for (auto& [task, pool] : by_task) {
        sort_by_id(pool);
        std::size_t take = pool.size();
        if (spec.has_targets) {
            auto it = spec.targets.find(task);
            if (it != spec.targets.end()) {
                if (it->second > pool.size()) {
                    result.warnings.push_back(std::string(task_name(task)) + ": target " +
                                              std::to_string(it->second) + " clamped to " +
                                              std::to_string(pool.size()) + " available");
                    take = pool.size();
                } else {
                    take = it->second;
                }
            }
        }
        auto rng = derive_rng(spec.seed, std::string("mix/") + task_name(task));
        rng.shuffle(pool);
        pool.resize(take);
        result.achieved_per_task[task_name(task)] = take;
        for (auto& s : pool) {
            std::uint64_t h = spec.seed ^ fnv1a64(s.image);
            double u = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
            (u < spec.val_fraction ? result.val : result.train).push_back(std::move(s));
        }
    }
    sort_by_id(result.train);
    sort_by_id(result.val);
    return result;
}

std::string jsonl_line(const VqaSample& sample) {
    nlohmann::ordered_json meta;
    meta["annotation"] = sample.source_annotation;
    for (const auto& [k, v] : sample.meta) meta[k] = v;
    nlohmann::ordered_json line{
        {"id", sample.id},
        {"image", sample.image},
        {"task", task_name(sample.task)},
        {"conversations",
         {{{"from", "human"}, {"value", sample.prompt}},
          {{"from", "gpt"}, {"value", sample.answer}}}},
        {"meta", meta},
    };
    return line.dump();
}

void emit_jsonl(const std::vector<VqaSample>& samples, const std::string& path) {
    std::vector<const VqaSample*> ordered;
    ordered.reserve(samples.size());
    for (const auto& s : samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const VqaSample* a, const VqaSample* b) { return a->id < b->id; });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const VqaSample* s : ordered) out << jsonl_line(*s) << '\n';
}

std::vector<VqaSample> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<VqaSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad JSON");
        VqaSample s;
        s.id = j.at("id").get<std::string>();
        s.image = j.at("image").get<std::string>();
        auto t = task_from_name(j.at("task").get<std::string>());
        if (!t) throw std::runtime_error(path + ": unknown task " + j.at("task").dump());
        s.task = *t;
        s.prompt = j.at("conversations").at(0).at("value").get<std::string>();
        s.answer = j.at("conversations").at(1).at("value").get<std::string>();
        if (j.contains("meta"))
            for (const auto& [k, v] : j.at("meta").items()) {
                if (k == "annotation") s.source_annotation = v.get<std::string>();
                else s.meta[k] = v.get<std::string>();
            }
        out.push_back(std::move(s));
    }
    return out;
}

nlohmann::json mix_manifest(const MixSpec& spec, const MixResult& result,
                            const CompileStats& stats) {
    nlohmann::json targets = nlohmann::json::object();
    for (const auto& [t, n] : spec.targets) targets[task_name(t)] = n;
    return nlohmann::json{
        {"seed", spec.seed},
        {"val_fraction", spec.val_fraction},
        {"targets", spec.has_targets ? targets : nlohmann::json()},
        {"achieved_per_task", result.achieved_per_task},
        {"train_samples", result.train.size()},
        {"val_samples", result.val.size()},
        {"compile", stats.to_json()},
        {"warnings", result.warnings},
    };
}

} // namespace affvqa::compiler
