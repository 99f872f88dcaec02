#pragma once

#include <bodyshape/error.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/raster.hpp>

#include <cmath>
#include <exception>
#include <string>
#include <utility>

namespace bodyshape {

inline constexpr double kDefaultKeypointThreshold = 0.3;

/// A segmentation + pose model pair. Implementations either tolerate
/// concurrent calls (concurrent_safe() == true) or are serialized by the
/// caller.
class InferenceBackend {
public:
    virtual ~InferenceBackend() = default;

    /// Per-pixel VOC labels at the source resolution of `image`.
    virtual LabelMap segment(const RgbImage& image) = 0;

    /// 17 COCO keypoints in source coordinates. `person_mask` is the cleaned
    /// silhouette; backends that run a network infer on the
    /// background-subtracted image it defines.
    virtual KeypointSet estimate_keypoints(const RgbImage& image, const BinaryMask& person_mask,
                                           const PixelBox& person_box) = 0;

    virtual bool concurrent_safe() const { return false; }
};

/// Person pixels kept, everything else black.
inline RgbImage subtract_background(const RgbImage& image, const BinaryMask& mask) {
    if (mask.width() != image.width() || mask.height() != image.height()) {
        throw Error(ErrorKind::InvalidArgument, "mask and image sizes differ");
    }
    RgbImage out = image;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (!mask.at(x, y)) out.set(x, y, {0, 0, 0});
    return out;
}

namespace detail {

template <class Fn>
auto call_backend(Fn&& fn) {
    try {
        return fn();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::BackendFailure, e.what());
    }
}

} // namespace detail

inline LabelMap segment(const RgbImage& image, InferenceBackend& backend) {
    auto lm = detail::call_backend([&] { return backend.segment(image); });
    if (lm.width() != image.width() || lm.height() != image.height()) {
        throw Error(ErrorKind::BackendFailure, "label map is " + std::to_string(lm.width()) + "x" +
                                                   std::to_string(lm.height()) + ", image is " +
                                                   std::to_string(image.width()) + "x" + std::to_string(image.height()));
    }
    return lm;
}

/// Runs the pose backend and rejects poses whose shoulders or hips fall
/// below `threshold` confidence.
inline KeypointSet estimate_keypoints(const RgbImage& image, const BinaryMask& person_mask, const PixelBox& person_box,
                                      InferenceBackend& backend, double threshold = kDefaultKeypointThreshold) {
    auto kp = detail::call_backend([&] { return backend.estimate_keypoints(image, person_mask, person_box); });
    for (std::size_t i = 0; i < kNumKeypoints; ++i) {
        const auto& p = kp.points[i];
        if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= image.width() - 1 && p.y <= image.height() - 1) ||
            !(p.confidence >= 0.0 && p.confidence <= 1.0)) {
            throw Error(ErrorKind::BackendFailure,
                        "keypoint " + std::string(kJointNames[i]) + " outside image bounds or confidence range");
        }
    }
    for (auto j : kTorsoJoints) {
        if (kp[j].confidence < threshold) {
            throw Error(ErrorKind::LowConfidencePose, std::string(kJointNames[static_cast<std::size_t>(j)]) +
                                                          " confidence " + std::to_string(kp[j].confidence) +
                                                          " below " + std::to_string(threshold));
        }
    }
    return kp;
}

/// Returns planted outputs regardless of input; used with synthetic subjects.
class OracleBackend final : public InferenceBackend {
public:
    OracleBackend(LabelMap labels, KeypointSet keypoints) : labels_(std::move(labels)), keypoints_(keypoints) {}

    LabelMap segment(const RgbImage&) override { return labels_; }
    KeypointSet estimate_keypoints(const RgbImage&, const BinaryMask&, const PixelBox&) override { return keypoints_; }
    bool concurrent_safe() const override { return true; }

private:
    LabelMap labels_;
    KeypointSet keypoints_;
};

} // namespace bodyshape
