#pragma once

#include <vector>

#include "rcube/scene.hpp"
#include "rcube/tensor.hpp"

namespace rcube {

// Ground-truth object center on the label grid (bin coordinates).
struct GtCenter {
    std::size_t frame = 0;
    std::size_t range_bin = 0;
    std::size_t angle_bin = 0;
    TargetClass cls = TargetClass::pedestrian;
    double sigma = 0;  // Gaussian footprint in bins; <= 0 picks the class default
};

// Label footprint half-life per class, in bins.
inline double default_sigma(TargetClass c) {
    switch (c) {
        case TargetClass::pedestrian: return 2.0;
        case TargetClass::cyclist: return 3.0;
        case TargetClass::car: return 5.0;
    }
    return 2.0;
}

// Gaussian confidence map [frames x range x angle x classes]. Each center
// contributes exp(-(dr^2 + da^2) / (2*sigma^2)) on its class channel and
// overlapping centers merge by element-wise max, so every center cell holds
// exactly 1. Distances are measured in bin units.
inline Tensor<double> rasterize_labels(const std::vector<GtCenter>& centers, std::size_t frames,
                                       std::size_t range_bins, std::size_t angle_bins) {
    if (frames == 0 || range_bins == 0 || angle_bins == 0)
        throw domain_error("label grid dimensions must be positive");
    Tensor<double> y({frames, range_bins, angle_bins, kNumClasses});
    for (const auto& c : centers) {
        if (c.frame >= frames || c.range_bin >= range_bins || c.angle_bin >= angle_bins)
            throw domain_error("label center outside the grid");
        const double sigma = c.sigma > 0 ? c.sigma : default_sigma(c.cls);
        const double inv = 1.0 / (2.0 * sigma * sigma);
        const std::size_t ch = static_cast<std::size_t>(c.cls);
        for (std::size_t r = 0; r < range_bins; ++r) {
            const double dr = static_cast<double>(r) - static_cast<double>(c.range_bin);
            for (std::size_t a = 0; a < angle_bins; ++a) {
                const double da = static_cast<double>(a) - static_cast<double>(c.angle_bin);
                const double v = std::exp(-(dr * dr + da * da) * inv);
                double& cell = y(c.frame, r, a, ch);
                cell = std::max(cell, v);
            }
        }
    }
    return y;
}

struct LossParams {
    double alpha = 2.0;   // prediction focusing exponent
    double beta = 4.0;    // penalty reduction near centers
    double kappa = 4.0;   // extra weight on center and cross-class cells
    double gamma = 0.5;   // weight of the location-only term in the combined loss
    long long n_obj = 1;  // object count normalizer (clamped to >= 1)
};

inline constexpr double kLossClamp = 1e-7;

// Penalty-reduced focal loss over a confidence map, normalized by the object
// count. Three cell regimes:
//   truth == 1:                 kappa * (1-p)^alpha * log(p)
//   truth == 0 but some other   kappa * (1-Y)^beta * p^alpha * log(1-p)
//     class is positive here:
//   otherwise:                  (1-Y)^beta * p^alpha * log(1-p)
// Predictions are clamped away from {0,1} before the logs.
inline double focal_loss(const Tensor<double>& pred, const Tensor<double>& truth,
                         const LossParams& params) {
    if (!pred.same_shape(truth)) throw domain_error("prediction and truth shapes differ");
    if (pred.rank() != 4) throw domain_error("confidence maps must be rank 4");
    const std::size_t frames = pred.dim(0), nr = pred.dim(1), na = pred.dim(2), nc = pred.dim(3);

    double acc = 0;
    for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t a = 0; a < na; ++a) {
                bool any_positive = false;
                for (std::size_t c = 0; c < nc; ++c)
                    if (truth(t, r, a, c) > 0) { any_positive = true; break; }
                for (std::size_t c = 0; c < nc; ++c) {
                    const double y = truth(t, r, a, c);
                    if (y < 0 || y > 1) throw domain_error("truth values must lie in [0, 1]");
                    const double p = std::clamp(pred(t, r, a, c), kLossClamp, 1.0 - kLossClamp);
                    if (y == 1.0) {
                        acc += params.kappa * std::pow(1.0 - p, params.alpha) * std::log(p);
                    } else {
                        // Cross-class positives get the same kappa boost as centers.
                        const bool other_positive = any_positive && y == 0.0;
                        const double w = other_positive ? params.kappa : 1.0;
                        acc += w * std::pow(1.0 - y, params.beta) * std::pow(p, params.alpha) *
                               std::log(1.0 - p);
                    }
                }
            }
    const double n = static_cast<double>(std::max(params.n_obj, 1ll));
    return -acc / n;
}

// Two-term objective: the full map loss plus gamma times the loss of a
// second location-only prediction against the same truth.
inline double combined_loss(const Tensor<double>& pred, const Tensor<double>& pred_location_only,
                            const Tensor<double>& truth, const LossParams& params) {
    return focal_loss(pred, truth, params) + params.gamma * focal_loss(pred_location_only, truth, params);
}

// ---------------------------------------------------------------------------
// Feature fusion

enum class FeatureKind { ra, rv, va, fused };

// Network activations [channels x frames x axis1 x axis2] with a tag saying
// which pair of cube axes they live on.
struct FeatureTensor {
    FeatureKind kind = FeatureKind::ra;
    Tensor<double> values;
};

// Merge branch features onto the range-angle grid. The velocity-angle block
// is condensed along velocity by summing and replicated across range; the
// range-velocity block is condensed the same way and replicated across
// angle. Channels stack [ra | rv | va].
inline FeatureTensor fuse_features(const FeatureTensor& ra, const FeatureTensor& rv,
                                   const FeatureTensor& va) {
    if (ra.kind != FeatureKind::ra || rv.kind != FeatureKind::rv || va.kind != FeatureKind::va)
        throw domain_error("fuse_features expects ra, rv, va inputs in that order");
    if (ra.values.rank() != 4 || rv.values.rank() != 4 || va.values.rank() != 4)
        throw domain_error("feature tensors must be rank 4");
    const std::size_t frames = ra.values.dim(1);
    const std::size_t nr = ra.values.dim(2);
    const std::size_t na = ra.values.dim(3);
    const std::size_t nv = rv.values.dim(3);
    if (rv.values.dim(1) != frames || va.values.dim(1) != frames)
        throw domain_error("feature tensors disagree on frame count");
    if (rv.values.dim(2) != nr) throw domain_error("rv feature range axis mismatch");
    if (va.values.dim(2) != nv || rv.values.dim(3) != nv)
        throw domain_error("velocity axes of rv and va features disagree");
    if (va.values.dim(3) != na) throw domain_error("va feature angle axis mismatch");

    const std::size_t c_ra = ra.values.dim(0), c_rv = rv.values.dim(0), c_va = va.values.dim(0);
    FeatureTensor out;
    out.kind = FeatureKind::fused;
    out.values = Tensor<double>({c_ra + c_rv + c_va, frames, nr, na});

    for (std::size_t c = 0; c < c_ra; ++c)
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t a = 0; a < na; ++a)
                    out.values(c, t, r, a) = ra.values(c, t, r, a);

    // RV: sum out velocity per range, copy across the angle axis.
    for (std::size_t c = 0; c < c_rv; ++c)
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t r = 0; r < nr; ++r) {
                double acc = 0;
                for (std::size_t v = 0; v < nv; ++v) acc += rv.values(c, t, r, v);
                for (std::size_t a = 0; a < na; ++a) out.values(c_ra + c, t, r, a) = acc;
            }

    // VA: sum out velocity per angle, copy across the range axis.
    for (std::size_t c = 0; c < c_va; ++c)
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t a = 0; a < na; ++a) {
                double acc = 0;
                for (std::size_t v = 0; v < nv; ++v) acc += va.values(c, t, v, a);
                for (std::size_t r = 0; r < nr; ++r) out.values(c_ra + c_rv + c, t, r, a) = acc;
            }

    return out;
}

}  // namespace rcube
