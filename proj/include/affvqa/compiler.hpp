#pragma once

#include "affvqa/augment.hpp"
#include "affvqa/ingest.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa::compiler {

/// One compiled instruction pair.
struct VqaSample {
    std::string id;
    TaskType task = TaskType::RecObject;
    std::string image;
    std::string prompt;
    std::string answer;
    std::string source_annotation;
    std::map<std::string, std::string> meta; // category / part / affordance / concept
};

/// Prompt template table; {phrase} / {bbox} / {description} are the slots.
/// Index 0 of each list is the canonical wording; the rest are paraphrases
/// picked by seeded choice when paraphrasing is enabled.
struct TemplateSet {
    std::vector<std::string> rec_object;
    std::vector<std::string> reg_object;
    std::vector<std::string> rec_affordance;
    std::vector<std::string> reg_affordance;
    std::vector<std::string> rec_grounding_affordance;
    std::map<std::string, std::vector<std::string>> reg_physical; // concept name -> templates

    static TemplateSet builtin();                    // embedded default resource
    static TemplateSet from_json(const nlohmann::json& j);
    static TemplateSet load(const std::string& path);
};

struct CompileOptions {
    std::uint64_t seed = 0;
    bool paraphrase = true; // false pins every prompt to the canonical wording
    TemplateSet templates = TemplateSet::builtin();
};

struct CompileStats {
    std::map<std::string, std::size_t> emitted_per_task;
    std::size_t skipped_degenerate_bbox = 0;
    std::size_t skipped_no_grounding_task = 0;
    std::size_t skipped_leaking_description = 0;

    nlohmann::json to_json() const;
};

struct CompileResult {
    std::vector<VqaSample> samples; // sorted by id
    CompileStats stats;
};

std::vector<VqaSample> compile_rec_object(const ingest::AnnotationStore& store,
                                          const CompileOptions& opt, CompileStats& stats);
std::vector<VqaSample> compile_reg_object(const ingest::AnnotationStore& store,
                                          const CompileOptions& opt, CompileStats& stats);
std::vector<VqaSample> compile_rec_affordance(const ingest::AnnotationStore& store,
                                              const CompileOptions& opt, CompileStats& stats);
std::vector<VqaSample> compile_reg_affordance(const ingest::AnnotationStore& store,
                                              const CompileOptions& opt, CompileStats& stats);
std::vector<VqaSample> compile_grounding_affordance(
    const ingest::AnnotationStore& store,
    const std::map<std::string, std::vector<augment::GroundingTask>>& tasks,
    const CompileOptions& opt, CompileStats& stats);
std::vector<VqaSample> compile_reg_physical(const ingest::AnnotationStore& store,
                                            const CompileOptions& opt, CompileStats& stats);

/// All six task compilers over one store; result sorted by sample id.
CompileResult compile_all(const ingest::AnnotationStore& store,
                          const std::map<std::string, std::vector<augment::GroundingTask>>& tasks,
                          const CompileOptions& opt);

/// Subsampling and split policy. Targets are absolute per-task counts;
/// ratios plus a total are expanded by largest remainder. Absent targets
/// mean "take everything".
struct MixSpec {
    std::uint64_t seed = 0;
    double val_fraction = 0.0;
    std::map<TaskType, std::size_t> targets;
    bool has_targets = false;

    static MixSpec from_json(const nlohmann::json& j);
    /// Expands {ratios, total} to absolute targets by largest remainder.
    static std::map<TaskType, std::size_t> targets_from_ratios(
        const std::map<TaskType, double>& ratios, std::size_t total);
    /// Per-row proportions 36:26:15:7 split evenly between REC and REG.
    static std::map<TaskType, double> paper_proportions();
};

struct MixResult {
    std::vector<VqaSample> train;
    std::vector<VqaSample> val;
    std::map<std::string, std::size_t> achieved_per_task;
    std::vector<std::string> warnings; // clamped targets
};

/// Seeded shuffle + prefix per task type, then an image-id hash split so no
/// image straddles train and val. Never oversamples.
MixResult mix_and_split(const std::vector<VqaSample>& samples, const MixSpec& spec);

/// One JSON object per line, lines sorted by id; byte-identical re-emission.
void emit_jsonl(const std::vector<VqaSample>& samples, const std::string& path);
std::string jsonl_line(const VqaSample& sample);
std::vector<VqaSample> read_jsonl(const std::string& path);

nlohmann::json mix_manifest(const MixSpec& spec, const MixResult& result,
                            const CompileStats& stats);

} // namespace affvqa::compiler
