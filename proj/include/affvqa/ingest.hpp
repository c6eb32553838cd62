#pragma once

#include "affvqa/annotation.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa::ingest {

enum class CorpusKind { coco_detection, part_affordance_maps, physical_properties };

const char* corpus_kind_name(CorpusKind k);
std::optional<CorpusKind> corpus_kind_from_name(std::string_view name);

struct CorpusSpec {
    CorpusKind kind = CorpusKind::coco_detection;
    std::string root; // directory (or the annotation file itself for COCO kinds)
    std::string tag;  // source label, e.g. "H", "P", "R", "Phy"
};

/// Fatal, file-level load failure (missing file, unparseable JSON, ...).
/// Per-record dirt never throws; it accumulates in the LoadReport.
struct FatalLoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadIssue {
    std::string where; // record / file the issue belongs to
    std::string message;
    bool operator<(const LoadIssue& o) const {
        return where != o.where ? where < o.where : message < o.message;
    }
};

struct LoadReport {
    std::map<std::string, std::size_t> images_per_source;
    std::map<std::string, std::size_t> records_per_source;
    std::map<std::string, std::size_t> records_per_capability;
    std::vector<LoadIssue> errors;
    std::vector<LoadIssue> warnings;
    std::size_t invalid_records = 0;

    void merge_from(const LoadReport& other);
    nlohmann::json to_json() const;
};

// Which task families a record can feed, derived from its source corpus
// kind and its own fields.
struct TaskCapability {
    bool object = false;    // REC/REG object tasks
    bool affordance = false; // REC/REG affordance tasks
    bool grounding = false; // REC grounding-affordance tasks
    bool physical = false;  // REG physical tasks
};

class AnnotationStore {
public:
    std::map<std::string, ImageRef> images;
    std::map<std::string, AnnotationRecord> annotations;
    std::map<std::string, CorpusKind> sources; // tag -> loader kind

    void add_image(ImageRef image);
    void add_record(AnnotationRecord record);

    const ImageRef& image_of(const AnnotationRecord& record) const;
    TaskCapability capability(const AnnotationRecord& record) const;

    std::vector<const AnnotationRecord*> by_image(const std::string& image_id) const;
    std::vector<const AnnotationRecord*> by_category(const std::string& category) const;

    /// Categories of records that can feed grounding tasks, sorted.
    std::vector<std::string> grounding_categories() const;

    nlohmann::json to_json() const;
    static AnnotationStore from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static AnnotationStore load(const std::string& path);
};

struct LoadResult {
    AnnotationStore store;
    LoadReport report;
};

/// COCO-style detection JSON: images / annotations / categories, bbox as
/// [x, y, w, h], optional RLE or polygon segmentation. Category names of the
/// form "object:part" carry part information. Record ids are namespaced
/// "TAG/raw" on load.
LoadResult load_coco(const CorpusSpec& spec);

/// Per-image 8-bit label rasters where value k in 1..7 encodes the k-th
/// closed-set affordance. One record per 4-connected region per value.
LoadResult load_part_affordance_maps(const CorpusSpec& spec);

/// COCO-style detection JSON plus a property table (properties.csv or
/// properties.json) keyed by raw annotation id.
LoadResult load_physical_properties(const CorpusSpec& spec);

LoadResult load_corpus(const CorpusSpec& spec);

/// Union of stores. Ids are already namespaced by source tag at load time;
/// any collision that survives namespacing is fatal.
AnnotationStore merge(const std::vector<AnnotationStore>& stores);

/// Re-checks every invariant and tallies records per source and capability.
LoadReport validate(const AnnotationStore& store);

} // namespace affvqa::ingest
