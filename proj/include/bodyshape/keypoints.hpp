#pragma once

#include <bodyshape/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace bodyshape {

inline constexpr std::size_t kNumKeypoints = 17;

/// COCO keypoint order.
enum class Joint : std::size_t {
    Nose = 0,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
};

inline constexpr std::array<std::string_view, kNumKeypoints> kJointNames = {
    "nose",           "left_eye",      "right_eye",  "left_ear",    "right_ear",  "left_shoulder",
    "right_shoulder", "left_elbow",    "right_elbow", "left_wrist", "right_wrist", "left_hip",
    "right_hip",      "left_knee",     "right_knee", "left_ankle",  "right_ankle"};

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;
    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct KeypointSet {
    std::array<Keypoint, kNumKeypoints> points{};

    const Keypoint& operator[](Joint j) const { return points[static_cast<std::size_t>(j)]; }
    Keypoint& operator[](Joint j) { return points[static_cast<std::size_t>(j)]; }

    friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

/// Joints the measurement lines are derived from.
inline constexpr std::array<Joint, 4> kTorsoJoints = {Joint::LeftShoulder, Joint::RightShoulder, Joint::LeftHip,
                                                      Joint::RightHip};

/// Maps (gx, gy) to (xx*gx + xy*gy + tx, yx*gx + yy*gy + ty).
struct Affine2D {
    double xx = 1.0, xy = 0.0, tx = 0.0;
    double yx = 0.0, yy = 1.0, ty = 0.0;

    double determinant() const noexcept { return xx * yy - xy * yx; }
    std::array<double, 2> apply(double gx, double gy) const noexcept {
        return {xx * gx + xy * gy + tx, yx * gx + yy * gy + ty};
    }
    friend bool operator==(const Affine2D&, const Affine2D&) = default;
};

/// 17 activation grids sharing one size, plus the grid-to-source transform.
class Heatmaps {
public:
    Heatmaps(int width, int height, std::array<std::vector<float>, kNumKeypoints> channels, Affine2D to_source = {})
        : width_(width), height_(height), channels_(std::move(channels)), to_source_(to_source) {
        if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidArgument, "heatmap grid must be non-empty");
        for (const auto& c : channels_) {
            if (c.size() != static_cast<std::size_t>(width) * height) {
                throw Error(ErrorKind::InvalidArgument, "heatmap channels must share dimensions");
            }
        }
        if (!(std::abs(to_source_.determinant()) > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "heatmap transform is not invertible");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<float>& channel(std::size_t k) const { return channels_[k]; }
    const Affine2D& to_source() const noexcept { return to_source_; }

private:
    int width_;
    int height_;
    std::array<std::vector<float>, kNumKeypoints> channels_;
    Affine2D to_source_;
};

/// Argmax with quarter-cell refinement. On each axis the location moves 0.25
/// toward the larger neighbor; the +1 neighbor is compared first and wins
/// ties. Border cells move toward their only neighbor. A flat channel
/// resolves to its first cell with confidence 0.
inline KeypointSet decode_heatmaps(const Heatmaps& hm) {
    const int w = hm.width(), h = hm.height();
    constexpr float kMissing = -std::numeric_limits<float>::infinity();
    KeypointSet out;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
        const auto& grid = hm.channel(k);
        auto at = [&](int x, int y) { return grid[static_cast<std::size_t>(y) * w + x]; };

        std::size_t best = 0;
        float lo = grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (grid[i] > grid[best]) best = i;
            lo = std::min(lo, grid[i]);
        }
        const int px = static_cast<int>(best % w);
        const int py = static_cast<int>(best / w);
        const float peak = grid[best];

        double gx = px, gy = py;
        if (w > 1) {
            float next = px + 1 < w ? at(px + 1, py) : kMissing;
            float prev = px > 0 ? at(px - 1, py) : kMissing;
            gx += next >= prev ? 0.25 : -0.25;
        }
        if (h > 1) {
            float next = py + 1 < h ? at(px, py + 1) : kMissing;
            float prev = py > 0 ? at(px, py - 1) : kMissing;
            gy += next >= prev ? 0.25 : -0.25;
        }
        auto [sx, sy] = hm.to_source().apply(gx, gy);
        const bool degenerate = !(peak > lo);
        out.points[k] = {sx, sy, degenerate ? 0.0 : std::clamp(static_cast<double>(peak), 0.0, 1.0)};
    }
    return out;
}

} // namespace bodyshape
