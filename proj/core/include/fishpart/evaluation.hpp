#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fishpart/mask_ops.hpp"

namespace fishpart {

struct DetectionRecord {
    std::string image_id;
    std::string cls;
    BoundingBox box;
    double confidence = 0.0;
};

struct GroundTruthRecord {
    std::string image_id;
    std::string cls;
    BoundingBox box;
    std::string identity_id;
    std::string side = "ocular";  // optional trailing column; heatmaps split on it
};

/// Intersection over union on continuous box geometry.
double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchResult {
    std::vector<std::size_t> true_positives;   // detection indices
    std::vector<std::size_t> false_positives;  // detection indices
    std::vector<std::size_t> false_negatives;  // ground-truth indices
    std::vector<long> matched_gt;              // per detection: matched ground truth or -1
};

/// Greedy matching within each (image, class): detections in descending
/// confidence (input order on ties) take the unmatched ground truth of
/// largest IoU, provided the IoU is strictly above `threshold`.
MatchResult match_detections(std::span<const DetectionRecord> detections, std::span<const GroundTruthRecord> truths,
                             double threshold = 0.5);

struct ScoredDetection {
    double confidence = 0.0;
    bool true_positive = false;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct ApResult {
    std::vector<PrPoint> curve;
    double ap = 0.0;
};

/// Cumulative precision/recall in descending confidence order and the area
/// under the monotone precision envelope.
ApResult pr_curve_and_ap(std::span<const ScoredDetection> scored, std::size_t ground_truth_count);

double mean_ap(std::span<const double> per_class_ap);

struct ClassReport {
    std::string cls;
    std::size_t ground_truths = 0;
    std::size_t detections = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    bool has_ap = false;  // false for classes without ground truth
    ApResult result;
};

struct EvalReport {
    double iou_threshold = 0.5;
    std::vector<ClassReport> classes;  // sorted by class name
    double map = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

EvalReport evaluate(std::span<const DetectionRecord> detections, std::span<const GroundTruthRecord> truths,
                    double threshold = 0.5);

/// Deterministic text rendering; identical reports render identically.
std::string format_report(const EvalReport& report);

struct Fold {
    std::vector<std::string> identities;
    std::vector<std::size_t> records;  // indices into the input
};

/// Identity-disjoint k-fold partition of the records.
std::vector<Fold> kfold_split(std::span<const GroundTruthRecord> records, int k, std::uint64_t seed);

// `image_id class cx cy w h confidence`
std::vector<DetectionRecord> parse_detections(std::istream& in, const std::string& source);
// `image_id class cx cy w h identity_id [side]`
std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, const std::string& source);
std::vector<DetectionRecord> read_detections(const std::filesystem::path& path);
std::vector<GroundTruthRecord> read_ground_truth(const std::filesystem::path& path);
void write_detection(std::ostream& out, const DetectionRecord& record);
void write_ground_truth(std::ostream& out, const GroundTruthRecord& record);

}  // namespace fishpart
