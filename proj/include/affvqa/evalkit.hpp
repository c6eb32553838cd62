#pragma once

#include "affvqa/annotation.hpp"
#include "affvqa/bbox.hpp"
#include "affvqa/mask.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa::evalkit {

/// One free-text model output, keyed by sample id.
struct PredictionRecord {
    std::string sample_id;
    std::string raw_text;
    double score = 1.0; // missing score defaults to 1.0
};

/// Prediction JSONL: {"id", "output_text", "score"?} per line.
std::vector<PredictionRecord> read_predictions_jsonl(const std::string& path);

struct ParsedPrediction {
    std::optional<NormBBox> box;       // REC tasks
    std::optional<std::string> token;  // RegPhysical answer / RegObject sentence
    bool unparseable = false;
};

/// REC tasks route through parse_bbox; RegPhysical takes the first
/// case-insensitive occurrence of True/False or a transparency level;
/// RegObject keeps the trimmed sentence.
ParsedPrediction parse_prediction(const std::string& raw_text, TaskType task);

// ---------------------------------------------------------------------------
// Detection / segmentation AP

struct DetectionInstance {
    std::string image;
    std::string category;
    double score = 1.0;            // meaningful for predictions
    NormBBox box;
    std::optional<RleMask> mask;   // when both sides carry masks, IoU is mask IoU
};

std::vector<double> coco_iou_thresholds(); // 0.50, 0.55, ..., 0.95

struct ApOptions {
    std::vector<double> thresholds = coco_iou_thresholds();
    int recall_points = 101;
};

struct CategoryAp {
    std::map<double, double> per_threshold;
    double mean = 0.0; // over thresholds
    double ap50 = 0.0;
    std::size_t gt_count = 0;
};

struct ApResult {
    std::map<std::string, CategoryAp> categories;
    double mean_ap = 0.0;   // unweighted over categories with GT
    double mean_ap50 = 0.0;
    std::vector<std::string> zero_gt_categories; // excluded from the mean
};

/// Greedy matching in descending score: each prediction takes the unmatched
/// ground truth of its image with the highest IoU at or above the threshold.
/// The precision-recall curve is integrated with 101-point interpolation.
ApResult average_precision(const std::vector<DetectionInstance>& ground_truth,
                           const std::vector<DetectionInstance>& predictions,
                           const ApOptions& options = {});

/// AP of one already-matched TP/FP sequence (ordered by descending score).
double ap_from_matches(const std::vector<bool>& is_tp, std::size_t gt_count,
                       int recall_points = 101);

// ---------------------------------------------------------------------------
// Physical-concept accuracy

struct PhysicalGt {
    std::string sample_id;
    std::string concept_label; // "Transparency" / "LiquidStorage" / "Sealability"
    std::string answer;  // canonical token, e.g. "True", "Opaque"
};

struct PhysicalAccuracy {
    std::map<std::string, double> per_concept;
    std::map<std::string, std::size_t> counts;
    double mean = 0.0; // unweighted over concepts present
    std::size_t unparseable = 0;
};

/// Fraction of samples whose parsed answer equals ground truth; unparseable
/// predictions count as wrong.
PhysicalAccuracy physical_accuracy(const std::vector<PhysicalGt>& ground_truth,
                                   const std::vector<PredictionRecord>& predictions);

// ---------------------------------------------------------------------------
// Heatmap metrics (KLD / SIM / NSS)

struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major

    bool valid() const;
    double max_value() const;
};

Heatmap heatmap_from_mask(const RleMask& mask);

struct SaliencyOptions {
    double epsilon = 1e-12;
    double fixation_tau = 0.5;      // fixations: gt >= tau * max(gt)
    bool kld_gt_given_pred = true;  // KL(GT || pred); flip for the other direction
};

/// Both maps normalized to unit mass (epsilon added to every pred cell
/// first); returns sum G * log(G / (P + eps) + eps).
double kld(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt = {});

/// Histogram intersection of the unit-mass maps, in [0, 1].
double sim(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt = {});

/// Mean z-scored prediction value over fixation pixels; 0 for a
/// zero-variance prediction.
double nss(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt = {});

// ---------------------------------------------------------------------------
// Report

/// Per-category metric table with an unweighted AVG row. Emission is
/// deterministic text with every float rendered at 4 decimals.
struct EvalReport {
    std::string task;
    std::vector<std::string> metric_names;
    std::map<std::string, std::map<std::string, double>> rows;
    std::map<std::string, double> average;
    std::size_t unparseable = 0;
    std::vector<std::string> notes;

    /// Computes the AVG row as the unweighted mean over category rows.
    void finalize();
    std::string to_json_text() const;
    std::string to_csv_text() const;
};

EvalReport report_from_ap(const ApResult& ap, const std::string& task_label);

} // namespace affvqa::evalkit
