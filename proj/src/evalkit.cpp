#include "affvqa/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace affvqa::evalkit {

std::vector<PredictionRecord> read_predictions_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad JSON");
        PredictionRecord rec;
        rec.sample_id = j.at("id").get<std::string>();
        rec.raw_text = j.value("output_text", "");
        rec.score = j.value("score", 1.0);
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

ParsedPrediction parse_prediction(const std::string& raw_text, TaskType task) {
    ParsedPrediction out;
    if (is_rec_task(task)) {
        auto parsed = parse_bbox(raw_text);
        if (parsed.box) out.box = parsed.box;
        else out.unparseable = true;
        return out;
    }
    if (task == TaskType::RegPhysical) {
        static const std::vector<std::pair<std::string, std::string>> tokens = {
            {"true", "True"},       {"false", "False"},
            {"transparent", "Transparent"}, {"translucent", "Translucent"},
            {"opaque", "Opaque"},
        };
        const std::string text = lower(raw_text);
        std::size_t best_pos = std::string::npos;
        std::string best;
        for (const auto& [needle, canonical] : tokens) {
            std::size_t pos = text.find(needle);
            if (pos != std::string::npos && pos < best_pos) {
                best_pos = pos;
                best = canonical;
            }
        }
        if (best.empty()) out.unparseable = true;
        else out.token = best;
        return out;
    }
    // REG tasks: the trimmed sentence is the answer.
    std::string sentence = trimmed(raw_text);
    if (sentence.empty()) out.unparseable = true;
    else out.token = sentence;
    return out;
}

// ---------------------------------------------------------------------------
// Average precision

std::vector<double> coco_iou_thresholds() {
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) out.push_back(0.5 + 0.05 * i);
    return out;
}

double ap_from_matches(const std::vector<bool>& is_tp, std::size_t gt_count,
                       int recall_points) {
    if (gt_count == 0) return 0.0;
    if (recall_points < 2) throw std::invalid_argument("ap_from_matches: recall_points < 2");
    std::size_t n = is_tp.size();
    std::vector<double> precision(n), recall(n);
    std::size_t tp = 0;
    for (std::size_t k = 0; k < n; ++k) {
        tp += is_tp[k] ? 1 : 0;
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
        recall[k] = static_cast<double>(tp) / static_cast<double>(gt_count);
    }
    // Interpolated precision: max precision among points with recall >= r.
    // Recall is non-decreasing in k, so the qualifying set is a suffix that
    // only grows as the level drops.
    double sum = 0.0;
    std::size_t idx = n;
    double running_max = 0.0;
    for (int r = recall_points - 1; r >= 0; --r) {
        double level = static_cast<double>(r) / static_cast<double>(recall_points - 1);
        while (idx > 0 && recall[idx - 1] >= level) {
            --idx;
            running_max = std::max(running_max, precision[idx]);
        }
        sum += running_max;
    }
    return sum / static_cast<double>(recall_points);
}

namespace {

double instance_iou(const DetectionInstance& a, const DetectionInstance& b) {
    if (a.mask && b.mask) return mask_iou(*a.mask, *b.mask);
    return iou(a.box, b.box);
}

} // namespace

ApResult average_precision(const std::vector<DetectionInstance>& ground_truth,
                           const std::vector<DetectionInstance>& predictions,
                           const ApOptions& options) {
    ApResult result;
    std::map<std::string, std::vector<const DetectionInstance*>> gt_by_cat, pred_by_cat;
    for (const auto& g : ground_truth) gt_by_cat[g.category].push_back(&g);
    for (const auto& p : predictions) pred_by_cat[p.category].push_back(&p);

    std::set<std::string> categories;
    for (const auto& [c, v] : gt_by_cat) categories.insert(c);
    for (const auto& [c, v] : pred_by_cat) categories.insert(c);

    double sum_mean = 0, sum_ap50 = 0;
    std::size_t counted = 0;
    for (const auto& category : categories) {
        const auto& gts = gt_by_cat[category];
        if (gts.empty()) {
            result.zero_gt_categories.push_back(category);
            continue;
        }
        auto preds = pred_by_cat[category];
        std::stable_sort(preds.begin(), preds.end(),
                         [](const DetectionInstance* a, const DetectionInstance* b) {
                             return a->score > b->score;
                         });
        std::map<std::string, std::vector<const DetectionInstance*>> gt_by_image;
        for (const auto* g : gts) gt_by_image[g->image].push_back(g);

        CategoryAp cat;
        cat.gt_count = gts.size();
        for (double threshold : options.thresholds) {
            std::map<std::string, std::vector<bool>> used;
            for (const auto& [img, v] : gt_by_image) used[img].assign(v.size(), false);
            std::vector<bool> is_tp;
            is_tp.reserve(preds.size());
            for (const auto* p : preds) {
                auto it = gt_by_image.find(p->image);
                int best = -1;
                double best_iou = 0.0;
                if (it != gt_by_image.end()) {
                    auto& flags = used[p->image];
                    for (std::size_t k = 0; k < it->second.size(); ++k) {
                        if (flags[k]) continue;
                        double v = instance_iou(*p, *it->second[k]);
                        if (v >= threshold && v > best_iou) {
                            best_iou = v;
                            best = static_cast<int>(k);
                        }
                    }
                }
                if (best >= 0) {
                    used[p->image][static_cast<std::size_t>(best)] = true;
                    is_tp.push_back(true);
                } else {
                    is_tp.push_back(false);
                }
            }
            cat.per_threshold[threshold] =
                ap_from_matches(is_tp, cat.gt_count, options.recall_points);
        }
        double total = 0;
        for (const auto& [t, v] : cat.per_threshold) total += v;
        cat.mean = total / static_cast<double>(cat.per_threshold.size());
        auto ap50_it = cat.per_threshold.find(0.5);
        cat.ap50 = ap50_it != cat.per_threshold.end() ? ap50_it->second
                                                      : cat.per_threshold.begin()->second;
        sum_mean += cat.mean;
        sum_ap50 += cat.ap50;
        ++counted;
        result.categories[category] = std::move(cat);
    }
    if (counted > 0) {
        result.mean_ap = sum_mean / static_cast<double>(counted);
        result.mean_ap50 = sum_ap50 / static_cast<double>(counted);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Physical accuracy

PhysicalAccuracy physical_accuracy(const std::vector<PhysicalGt>& ground_truth,
                                   const std::vector<PredictionRecord>& predictions) {
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) by_id[p.sample_id] = &p;

    PhysicalAccuracy out;
    std::map<std::string, std::size_t> correct;
    for (const auto& gt : ground_truth) {
        ++out.counts[gt.concept_label];
        auto it = by_id.find(gt.sample_id);
        if (it == by_id.end()) {
            ++out.unparseable;
            continue;
        }
        auto parsed = parse_prediction(it->second->raw_text, TaskType::RegPhysical);
        if (parsed.unparseable || !parsed.token) {
            ++out.unparseable;
            continue; // counts as wrong
        }
        std::string want = gt.answer;
        if (!want.empty() && want.back() == '.') want.pop_back();
        if (lower(*parsed.token) == lower(want)) ++correct[gt.concept_label];
    }
    double sum = 0;
    for (const auto& [concept_label, total] : out.counts) {
        double acc = total > 0 ? static_cast<double>(correct[concept_label]) /
                                     static_cast<double>(total)
                               : 0.0;
        out.per_concept[concept_label] = acc;
        sum += acc;
    }
    out.mean = out.counts.empty() ? 0.0 : sum / static_cast<double>(out.counts.size());
    return out;
}

// ---------------------------------------------------------------------------
// Heatmap metrics

bool Heatmap::valid() const {
    if (width < 1 || height < 1 ||
        values.size() != static_cast<std::size_t>(width) * height)
        return false;
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v); });
}

double Heatmap::max_value() const {
    double m = 0;
    for (double v : values) m = std::max(m, v);
    return m;
}

Heatmap heatmap_from_mask(const RleMask& mask) {
    auto raster = mask.to_raster();
    Heatmap map;
    map.width = mask.width;
    map.height = mask.height;
    map.values.assign(raster.size(), 0.0);
    for (std::size_t i = 0; i < raster.size(); ++i) map.values[i] = raster[i] ? 1.0 : 0.0;
    return map;
}

namespace {

void require_pair(const Heatmap& gt, const Heatmap& pred) {
    if (!gt.valid() || !pred.valid())
        throw std::invalid_argument("heatmap: invalid map");
    if (gt.width != pred.width || gt.height != pred.height)
        throw std::invalid_argument("heatmap: dimension mismatch");
}

std::vector<double> unit_mass(const std::vector<double>& values, double add) {
    double sum = 0;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (v < 0) throw std::invalid_argument("heatmap: negative mass");
        out[i] = v + add;
        sum += out[i];
    }
    if (sum <= 0) throw std::invalid_argument("heatmap: zero total mass");
    for (double& v : out) v /= sum;
    return out;
}

} // namespace

double kld(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt) {
    require_pair(gt, pred);
    const Heatmap& g_map = opt.kld_gt_given_pred ? gt : pred;
    const Heatmap& p_map = opt.kld_gt_given_pred ? pred : gt;
    auto g = unit_mass(g_map.values, 0.0);
    auto p = unit_mass(p_map.values, opt.epsilon);
    double total = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] > 0) total += g[i] * std::log(g[i] / (p[i] + opt.epsilon) + opt.epsilon);
    return total;
}

double sim(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt) {
    require_pair(gt, pred);
    auto g = unit_mass(gt.values, 0.0);
    auto p = unit_mass(pred.values, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) total += std::min(g[i], p[i]);
    return total;
}

double nss(const Heatmap& gt, const Heatmap& pred, const SaliencyOptions& opt) {
    require_pair(gt, pred);
    double gt_max = gt.max_value();
    if (gt_max <= 0) throw std::invalid_argument("nss: ground truth has no positive value");

    const std::size_t n = pred.values.size();
    double mean = 0;
    for (double v : pred.values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double v : pred.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n); // population variance
    if (var <= 0) return 0.0;
    double stddev = std::sqrt(var);

    double threshold = opt.fixation_tau * gt_max;
    double sum = 0;
    std::size_t fixations = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gt.values[i] >= threshold) {
            sum += (pred.values[i] - mean) / stddev;
            ++fixations;
        }
    }
    return fixations > 0 ? sum / static_cast<double>(fixations) : 0.0;
}

EvalReport report_from_ap(const ApResult& ap, const std::string& task_label) {
    EvalReport report;
    report.task = task_label;
    report.metric_names = {"AP", "AP50"};
    for (const auto& [category, cat] : ap.categories)
        report.rows[category] = {{"AP", cat.mean}, {"AP50", cat.ap50}};
    for (const auto& category : ap.zero_gt_categories)
        report.notes.push_back("category '" + category + "' has no ground truth; excluded");
    report.finalize();
    return report;
}

} // namespace affvqa::evalkit
