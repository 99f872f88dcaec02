#pragma once

#include <bodyshape/anthropometry.hpp>
#include <bodyshape/classifier.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/inference.hpp>
#include <bodyshape/silhouette.hpp>

#include <mutex>
#include <optional>
#include <type_traits>

namespace bodyshape {

struct PipelineConfig {
    SilhouetteConfig silhouette;
    AnthroConfig anthro;
    ClassifierConfig classifier;

    void validate() const {
        anthro.validate();
        classifier.validate();
    }
};

struct PipelineResult {
    BodyShape shape = BodyShape::Rectangle;
    Measurements measurements;   ///< in the configured convention
    Measurements widths;         ///< frontal widths, always
    BodyLines lines;
    PxToCm scale;
    int mask_height_px = 0;
    PixelBox person_box;
    KeypointSet keypoints;
    RuleTrace trace;
    BinaryMask mask;
};

/// Everything downstream of the models: mask cleanup, scale, line placement,
/// measurement and classification.
inline PipelineResult measure_and_classify(const BinaryMask& mask, const KeypointSet& keypoints, HeightCm height,
                                           const PipelineConfig& cfg) {
    PipelineResult r;
    r.mask = mask;
    r.keypoints = keypoints;
    r.person_box = bounding_box(mask);
    r.mask_height_px = mask_height_px(mask);
    r.scale = px_to_cm(height, mask);
    r.lines = locate_lines(keypoints, mask, cfg.anthro);
    r.widths = frontal_widths(r.lines, r.scale);
    r.measurements = convert(r.widths, cfg.anthro.convention, cfg.anthro);
    r.trace = rule_trace(r.measurements, cfg.classifier);
    r.shape = r.trace.shape;
    return r;
}

/// Image + height in, body shape out. Backend calls are serialized when the
/// backend does not declare itself concurrent-safe; one Pipeline may be
/// shared across threads.
class Pipeline {
public:
    Pipeline(InferenceBackend& backend, PipelineConfig cfg) : backend_(backend), cfg_(std::move(cfg)) {
        cfg_.validate();
    }

    const PipelineConfig& config() const noexcept { return cfg_; }

    PipelineResult run(const RgbImage& image, HeightCm height) const {
        auto labels = gated([&] { return segment(image, backend_); });
        auto mask = clean_person_mask(labels, cfg_.silhouette);
        auto box = bounding_box(mask);
        auto keypoints =
            gated([&] { return estimate_keypoints(image, mask, box, backend_, cfg_.anthro.keypoint_threshold); });
        return measure_and_classify(mask, keypoints, height, cfg_);
    }

private:
    template <class Fn>
    std::invoke_result_t<Fn&> gated(Fn&& fn) const {
        if (backend_.concurrent_safe()) return fn();
        std::lock_guard lock(gate_);
        return fn();
    }

    InferenceBackend& backend_;
    PipelineConfig cfg_;
    mutable std::mutex gate_;
};

} // namespace bodyshape
