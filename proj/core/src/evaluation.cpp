#include "fishpart/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "fishpart/error.hpp"
#include "fishpart/random.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart {
namespace {

std::vector<std::size_t> by_descending_confidence(std::span<const DetectionRecord> detections) {
    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].confidence > detections[b].confidence;
    });
    return order;
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::max(0.0, std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0()));
    const double ih = std::max(0.0, std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0()));
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_detections(std::span<const DetectionRecord> detections, std::span<const GroundTruthRecord> truths,
                             double threshold) {
    using Key = std::pair<std::string, std::string>;
    std::map<Key, std::vector<std::size_t>> truths_by_key;
    for (std::size_t g = 0; g < truths.size(); ++g) truths_by_key[{truths[g].image_id, truths[g].cls}].push_back(g);

    MatchResult result;
    result.matched_gt.assign(detections.size(), -1);
    std::vector<bool> taken(truths.size(), false);
    for (std::size_t d : by_descending_confidence(detections)) {
        const auto it = truths_by_key.find({detections[d].image_id, detections[d].cls});
        long best = -1;
        double best_iou = 0.0;
        if (it != truths_by_key.end()) {
            for (std::size_t g : it->second) {
                if (taken[g]) continue;
                const double overlap = iou(detections[d].box, truths[g].box);
                if (best < 0 || overlap > best_iou) {
                    best = static_cast<long>(g);
                    best_iou = overlap;
                }
            }
        }
        if (best >= 0 && best_iou > threshold) {
            taken[static_cast<std::size_t>(best)] = true;
            result.matched_gt[d] = best;
            result.true_positives.push_back(d);
        } else {
            result.false_positives.push_back(d);
        }
    }
    std::sort(result.true_positives.begin(), result.true_positives.end());
    std::sort(result.false_positives.begin(), result.false_positives.end());
    for (std::size_t g = 0; g < truths.size(); ++g) {
        if (!taken[g]) result.false_negatives.push_back(g);
    }
    return result;
}

ApResult pr_curve_and_ap(std::span<const ScoredDetection> scored, std::size_t ground_truth_count) {
    if (ground_truth_count == 0) throw Error(ErrorCode::NoGroundTruth, "average precision needs ground truth");
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scored[a].confidence > scored[b].confidence; });

    ApResult out;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i : order) {
        if (scored[i].true_positive) ++tp;
        else ++fp;
        out.curve.push_back({static_cast<double>(tp) / static_cast<double>(ground_truth_count),
                             static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }

    // Envelope: precision at recall r is the best precision at any recall >= r.
    std::vector<double> envelope(out.curve.size());
    double best = 0.0;
    for (std::size_t i = out.curve.size(); i-- > 0;) {
        best = std::max(best, out.curve[i].precision);
        envelope[i] = best;
    }
    double previous_recall = 0.0;
    for (std::size_t i = 0; i < out.curve.size(); ++i) {
        out.ap += (out.curve[i].recall - previous_recall) * envelope[i];
        previous_recall = out.curve[i].recall;
    }
    return out;
}

double mean_ap(std::span<const double> per_class_ap) {
    if (per_class_ap.empty()) throw Error(ErrorCode::NoClasses, "no class with ground truth to average");
    return std::accumulate(per_class_ap.begin(), per_class_ap.end(), 0.0) / static_cast<double>(per_class_ap.size());
}

EvalReport evaluate(std::span<const DetectionRecord> detections, std::span<const GroundTruthRecord> truths,
                    double threshold) {
    const MatchResult match = match_detections(detections, truths, threshold);
    std::map<std::string, ClassReport> classes;
    std::map<std::string, std::vector<ScoredDetection>> scored;
    for (const auto& g : truths) {
        auto& c = classes[g.cls];
        c.cls = g.cls;
        ++c.ground_truths;
    }
    for (std::size_t d = 0; d < detections.size(); ++d) {
        auto& c = classes[detections[d].cls];
        c.cls = detections[d].cls;
        ++c.detections;
        const bool hit = match.matched_gt[d] >= 0;
        if (hit) ++c.tp;
        else ++c.fp;
        scored[detections[d].cls].push_back({detections[d].confidence, hit});
    }

    EvalReport report;
    report.iou_threshold = threshold;
    std::vector<double> aps;
    for (auto& [name, c] : classes) {
        c.fn = c.ground_truths - c.tp;
        if (c.ground_truths > 0) {
            c.result = pr_curve_and_ap(scored[name], c.ground_truths);
            c.has_ap = true;
            aps.push_back(c.result.ap);
        }
        report.tp += c.tp;
        report.fp += c.fp;
        report.fn += c.fn;
        report.classes.push_back(c);
    }
    report.map = mean_ap(aps);
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out << "iou_threshold " << format_number(report.iou_threshold) << '\n';
    for (const ClassReport& c : report.classes) {
        out << "class " << c.cls << " gt " << c.ground_truths << " det " << c.detections << " tp " << c.tp << " fp "
            << c.fp << " fn " << c.fn << " ap " << (c.has_ap ? format_fixed(c.result.ap, 10) : std::string("n/a"))
            << '\n';
    }
    for (const ClassReport& c : report.classes) {
        for (const PrPoint& p : c.result.curve) {
            out << "pr " << c.cls << ' ' << format_fixed(p.recall, 10) << ' ' << format_fixed(p.precision, 10) << '\n';
        }
    }
    out << "total tp " << report.tp << " fp " << report.fp << " fn " << report.fn << '\n';
    out << "map " << format_fixed(report.map, 10) << '\n';
    return out.str();
}

std::vector<Fold> kfold_split(std::span<const GroundTruthRecord> records, int k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold needs k >= 2");
    std::set<std::string> unique;
    for (const auto& r : records) unique.insert(r.identity_id);
    if (unique.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::TooFewIdentities, std::to_string(unique.size()) + " identities cannot fill " +
                                                     std::to_string(k) + " folds");
    }
    std::vector<std::string> identities(unique.begin(), unique.end());
    Rng rng(seed);
    for (std::size_t i = identities.size(); i > 1; --i) {
        std::swap(identities[i - 1], identities[rng.below(i)]);
    }

    std::vector<Fold> folds(static_cast<std::size_t>(k));
    std::map<std::string, std::size_t> fold_of;
    for (std::size_t i = 0; i < identities.size(); ++i) {
        const std::size_t f = i % static_cast<std::size_t>(k);
        folds[f].identities.push_back(identities[i]);
        fold_of[identities[i]] = f;
    }
    for (std::size_t r = 0; r < records.size(); ++r) folds[fold_of.at(records[r].identity_id)].records.push_back(r);
    return folds;
}

}  // namespace fishpart
