#pragma once

#include <array>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "rcube/fusion_loss.hpp"

namespace rcube {

struct Detection {
    std::size_t frame = 0;
    std::size_t range_bin = 0;
    std::size_t angle_bin = 0;
    TargetClass cls = TargetClass::pedestrian;
    double confidence = 0;
};

inline constexpr double kDetectionThreshold = 0.2;

// Peak picking on a confidence map [frames x range x angle x classes]: a
// cell is a detection when it exceeds the threshold and no 8-neighbour beats
// it. Plateaus of equal value yield one detection, at the lexicographically
// smallest (range, angle) cell. Results are ordered by descending
// confidence, ties broken by (frame, class, range, angle).
inline std::vector<Detection> extract_detections(const Tensor<double>& heat,
                                                 double threshold = kDetectionThreshold) {
    if (heat.rank() != 4) throw domain_error("confidence maps must be rank 4");
    const std::size_t frames = heat.dim(0), nr = heat.dim(1), na = heat.dim(2), nc = heat.dim(3);
    std::vector<Detection> out;
    for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t a = 0; a < na; ++a) {
                    const double v = heat(t, r, a, c);
                    if (v <= threshold) continue;
                    bool keep = true;
                    for (long long dr = -1; dr <= 1 && keep; ++dr)
                        for (long long da = -1; da <= 1 && keep; ++da) {
                            if (dr == 0 && da == 0) continue;
                            const long long rr = static_cast<long long>(r) + dr;
                            const long long aa = static_cast<long long>(a) + da;
                            if (rr < 0 || aa < 0 || rr >= static_cast<long long>(nr) ||
                                aa >= static_cast<long long>(na))
                                continue;
                            const double nv = heat(t, static_cast<std::size_t>(rr),
                                                   static_cast<std::size_t>(aa), c);
                            if (nv > v) keep = false;
                            // Equal-valued neighbour that precedes this cell
                            // owns the plateau.
                            if (nv == v && (rr < static_cast<long long>(r) ||
                                            (rr == static_cast<long long>(r) &&
                                             aa < static_cast<long long>(a))))
                                keep = false;
                        }
                    if (keep)
                        out.push_back({t, r, a, static_cast<TargetClass>(c), v});
                }
    std::stable_sort(out.begin(), out.end(), [](const Detection& x, const Detection& y) {
        if (x.confidence != y.confidence) return x.confidence > y.confidence;
        if (x.frame != y.frame) return x.frame < y.frame;
        if (x.cls != y.cls) return static_cast<int>(x.cls) < static_cast<int>(y.cls);
        if (x.range_bin != y.range_bin) return x.range_bin < y.range_bin;
        return x.angle_bin < y.angle_bin;
    });
    return out;
}

// Class-keyed matching distance (bins); 2x the label sigma per class.
struct MatchParams {
    std::array<double, kNumClasses> distance_threshold{4.0, 6.0, 10.0};
};

struct ClassCounts {
    std::size_t tp = 0, fp = 0, fn = 0;
};

struct MatchResult {
    std::array<ClassCounts, kNumClasses> per_class;
};

// Greedy one-to-one matching in descending confidence order. A detection
// claims the nearest unmatched ground-truth center of its class and frame
// within the class threshold (ties to the lowest center index); the rest are
// false positives, unclaimed centers false negatives.
inline MatchResult match_detections(const std::vector<Detection>& detections,
                                    const std::vector<GtCenter>& centers,
                                    const MatchParams& params = {}) {
    MatchResult res;
    std::vector<bool> claimed(centers.size(), false);
    for (const auto& det : detections) {
        const std::size_t ci = static_cast<std::size_t>(det.cls);
        long long best = -1;
        double best_d = 0;
        for (std::size_t g = 0; g < centers.size(); ++g) {
            if (claimed[g] || centers[g].cls != det.cls || centers[g].frame != det.frame) continue;
            const double dr = static_cast<double>(det.range_bin) - static_cast<double>(centers[g].range_bin);
            const double da = static_cast<double>(det.angle_bin) - static_cast<double>(centers[g].angle_bin);
            const double dist = std::sqrt(dr * dr + da * da);
            if (dist > params.distance_threshold[ci]) continue;
            if (best < 0 || dist < best_d) {
                best = static_cast<long long>(g);
                best_d = dist;
            }
        }
        if (best >= 0) {
            claimed[static_cast<std::size_t>(best)] = true;
            ++res.per_class[ci].tp;
        } else {
            ++res.per_class[ci].fp;
        }
    }
    for (std::size_t g = 0; g < centers.size(); ++g)
        if (!claimed[g]) ++res.per_class[static_cast<std::size_t>(centers[g].cls)].fn;
    return res;
}

// Precision and recall with the 0/0 -> 0 convention.
inline std::pair<double, double> precision_recall(const ClassCounts& c) {
    const double p = (c.tp + c.fp) == 0 ? 0.0
                                        : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double r = (c.tp + c.fn) == 0 ? 0.0
                                        : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {p, r};
}

struct AggregateMetrics {
    double ap = 0;  // mean over scenes of the per-scene class-mean precision
    double ar = 0;  // same for recall
};

// Scene scores average over the classes that actually appear in that scene
// (any ground truth or detection); scenes where nothing appears are skipped.
inline AggregateMetrics average_precision_recall(const std::vector<MatchResult>& scenes) {
    if (scenes.empty()) throw domain_error("need at least one scene to aggregate");
    double ap_sum = 0, ar_sum = 0;
    std::size_t counted = 0;
    for (const auto& scene : scenes) {
        double p_sum = 0, r_sum = 0;
        std::size_t classes = 0;
        for (const auto& counts : scene.per_class) {
            if (counts.tp + counts.fp + counts.fn == 0) continue;
            auto [p, r] = precision_recall(counts);
            p_sum += p;
            r_sum += r;
            ++classes;
        }
        if (classes == 0) continue;
        ap_sum += p_sum / static_cast<double>(classes);
        ar_sum += r_sum / static_cast<double>(classes);
        ++counted;
    }
    if (counted == 0) return {};
    return {ap_sum / static_cast<double>(counted), ar_sum / static_cast<double>(counted)};
}

inline nlohmann::json metrics_to_json(const std::vector<MatchResult>& scenes) {
    // Pool counts across scenes for the per-class table; AP/AR use the
    // scene-mean definition.
    std::array<ClassCounts, kNumClasses> pooled{};
    for (const auto& s : scenes)
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            pooled[c].tp += s.per_class[c].tp;
            pooled[c].fp += s.per_class[c].fp;
            pooled[c].fn += s.per_class[c].fn;
        }
    nlohmann::json per_class = nlohmann::json::object();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto [p, r] = precision_recall(pooled[c]);
        per_class[class_name(static_cast<TargetClass>(c))] = {
            {"tp", pooled[c].tp}, {"fp", pooled[c].fp}, {"fn", pooled[c].fn},
            {"precision", p},     {"recall", r},
        };
    }
    const auto agg = average_precision_recall(scenes);
    return nlohmann::json{{"per_class", per_class}, {"AP", agg.ap}, {"AR", agg.ar},
                          {"scenes", scenes.size()}};
}

inline std::string metrics_to_csv(const std::vector<MatchResult>& scenes) {
    std::array<ClassCounts, kNumClasses> pooled{};
    for (const auto& s : scenes)
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            pooled[c].tp += s.per_class[c].tp;
            pooled[c].fp += s.per_class[c].fp;
            pooled[c].fn += s.per_class[c].fn;
        }
    std::ostringstream os;
    os << "class,tp,fp,fn,precision,recall\n";
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto [p, r] = precision_recall(pooled[c]);
        os << class_name(static_cast<TargetClass>(c)) << ',' << pooled[c].tp << ',' << pooled[c].fp
           << ',' << pooled[c].fn << ',' << p << ',' << r << '\n';
    }
    const auto agg = average_precision_recall(scenes);
    os << "AP," << agg.ap << "\nAR," << agg.ar << '\n';
    return os.str();
}

}  // namespace rcube
