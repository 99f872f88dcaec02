#pragma once

#include <bodyshape/anthropometry.hpp>
#include <bodyshape/body_shape.hpp>
#include <bodyshape/classifier.hpp>
#include <bodyshape/error.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/raster.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bodyshape {

/// Geometry of an upright synthetic subject. Widths are torso widths in
/// pixels at the planted rows; arms hang as separate strips `arm_gap` pixels
/// away from the widest part of the torso and join it only at the shoulders.
struct SynthParams {
    int image_width = 600;
    int image_height = 1000;
    int top_row = 40;
    int stature_px = 900;
    double height_cm = 180.0;

    int bust_row = 292;
    int waist_row = 381;
    int hip_row = 504;
    int bust_width = 180;
    int waist_width = 150;
    int hip_width = 185;

    int shoulder_width = 200;
    int arm_width = 40;
    int arm_gap = 12;
    int head_radius = 54;
    int neck_width = 60;
    int leg_width = 70;
    int leg_gap = 16;
};

struct SynthSample {
    BinaryMask mask;
    KeypointSet keypoints;
    Measurements truth;   ///< frontal widths in cm
    BodyShape shape;
    PxToCm scale;
    int bust_row, waist_row, hip_row;
};

namespace detail {

/// Torso width at `row` by piecewise-linear interpolation of control points.
inline int torso_width(const std::vector<std::array<int, 2>>& ctrl, int row) {
    for (std::size_t i = 1; i < ctrl.size(); ++i) {
        auto [r0, w0] = ctrl[i - 1];
        auto [r1, w1] = ctrl[i];
        if (row <= r1) {
            if (r1 == r0) return w1;
            double t = static_cast<double>(row - r0) / (r1 - r0);
            return static_cast<int>(std::lround(w0 + t * (w1 - w0)));
        }
    }
    return ctrl.back()[1];
}

inline void fill_run(BinaryMask& m, int row, int left, int right) {
    for (int x = std::max(left, 0); x <= std::min(right, m.width() - 1); ++x) m.set(x, row);
}

} // namespace detail

/// Rasterizes the subject and plants shoulder/hip keypoints so that the
/// configured anatomical fractions map exactly onto the planted bust and
/// waist rows. Ground truth is the classifier's verdict on planted widths.
inline SynthSample synth_silhouette(const SynthParams& p, const AnthroConfig& anthro = {},
                                    const ClassifierConfig& classifier = {}) {
    auto infeasible = [](const std::string& why) { return Error(ErrorKind::InfeasibleParams, why); };
    anthro.validate();
    if (p.arm_gap < 1) throw infeasible("arms must be separated from the torso (arm_gap >= 1)");
    if (p.bust_width <= 0 || p.waist_width <= 0 || p.hip_width <= 0 || p.arm_width <= 0 || p.leg_width <= 0 ||
        p.shoulder_width <= 0 || p.head_radius <= 0 || p.neck_width <= 0 || p.stature_px <= 0) {
        throw infeasible("all widths must be positive");
    }
    if (!(p.bust_row < p.waist_row && p.waist_row < p.hip_row)) throw infeasible("rows must be bust < waist < hip");
    if (p.waist_width > p.bust_width || p.waist_width > p.hip_width) {
        throw infeasible("waist must not be wider than bust or hip");
    }

    // Invert the line-placement priors: bust and waist rows pin the span.
    const double span = (p.waist_row - p.bust_row) / (anthro.waist_fraction - anthro.bust_fraction);
    const double shoulder_y = p.bust_row - anthro.bust_fraction * span;
    const double hip_y = shoulder_y + span;
    const int shoulder_row = static_cast<int>(std::lround(shoulder_y));
    const int bottom = p.top_row + p.stature_px - 1;

    const int waist_half = static_cast<int>(std::lround(anthro.waist_search_halfwindow * span));
    const int hip_lo = static_cast<int>(std::lround(hip_y - anthro.hip_search_window_up * span));
    const int hip_hi = static_cast<int>(std::lround(hip_y + anthro.hip_search_window_down * span));
    if (p.waist_row - waist_half <= p.bust_row || p.waist_row + waist_half >= p.hip_row) {
        throw infeasible("waist search window leaves the bust-hip segment");
    }
    if (p.hip_row < hip_lo || p.hip_row > hip_hi) throw infeasible("hip row outside the hip search window");

    const int cap_rows = std::max(3, p.arm_width / 3);
    const int neck_top = p.top_row + p.head_radius;
    if (shoulder_row <= p.top_row + 2 * p.head_radius || shoulder_row + cap_rows >= p.bust_row) {
        throw infeasible("not enough room between head, shoulders and bust");
    }
    const int crotch_row = p.hip_row + std::max(4, static_cast<int>(std::lround(0.2 * span)));
    const int hand_row = crotch_row + std::max(4, static_cast<int>(std::lround(0.1 * span)));
    if (hand_row >= bottom - 4 || p.top_row < 0 || bottom >= p.image_height) {
        throw infeasible("stature does not fit the image");
    }
    const int crotch_width = std::max(p.waist_width, p.hip_width - std::max(2, p.hip_width / 12));
    if (2 * p.leg_width + p.leg_gap > crotch_width) throw infeasible("legs wider than the crotch");

    const std::vector<std::array<int, 2>> ctrl = {{shoulder_row, p.shoulder_width},
                                                  {p.bust_row, p.bust_width},
                                                  {p.waist_row, p.waist_width},
                                                  {p.hip_row, p.hip_width},
                                                  {crotch_row, crotch_width}};
    int max_width = 0;
    for (int r = shoulder_row; r <= crotch_row; ++r) max_width = std::max(max_width, detail::torso_width(ctrl, r));

    const int cx = p.image_width / 2;
    auto torso_left = [&](int w) { return cx - w / 2; };
    const int left_arm_inner = torso_left(max_width) - p.arm_gap - 1;
    const int left_arm_outer = left_arm_inner - p.arm_width + 1;
    const int right_arm_inner = torso_left(max_width) + max_width + p.arm_gap;
    const int right_arm_outer = right_arm_inner + p.arm_width - 1;
    if (left_arm_outer < 1 || right_arm_outer > p.image_width - 2) throw infeasible("arms do not fit the image");

    BinaryMask m(p.image_width, p.image_height);
    // Head and neck.
    const int head_cy = p.top_row + p.head_radius;
    for (int y = p.top_row; y <= head_cy + p.head_radius; ++y) {
        for (int x = cx - p.head_radius; x <= cx + p.head_radius; ++x) {
            const long dx = x - cx, dy = y - head_cy;
            if (dx * dx + dy * dy <= static_cast<long>(p.head_radius) * p.head_radius) m.set(x, y);
        }
    }
    for (int y = neck_top; y < shoulder_row; ++y) detail::fill_run(m, y, cx - p.neck_width / 2, cx - p.neck_width / 2 + p.neck_width - 1);
    // Torso.
    for (int y = shoulder_row; y <= crotch_row; ++y) {
        const int w = detail::torso_width(ctrl, y);
        detail::fill_run(m, y, torso_left(w), torso_left(w) + w - 1);
    }
    // Shoulder cap joining arms to torso, then the arms.
    for (int y = shoulder_row; y < shoulder_row + cap_rows; ++y) detail::fill_run(m, y, left_arm_outer, right_arm_outer);
    for (int y = shoulder_row; y <= hand_row; ++y) {
        detail::fill_run(m, y, left_arm_outer, left_arm_inner);
        detail::fill_run(m, y, right_arm_inner, right_arm_outer);
    }
    // Legs.
    const int left_leg_right = cx - (p.leg_gap + 1) / 2 - 1;
    const int right_leg_left = left_leg_right + p.leg_gap + 1;
    for (int y = crotch_row + 1; y <= bottom; ++y) {
        detail::fill_run(m, y, left_leg_right - p.leg_width + 1, left_leg_right);
        detail::fill_run(m, y, right_leg_left, right_leg_left + p.leg_width - 1);
    }

    KeypointSet kp;
    auto plant = [&](Joint j, double x, double y) { kp[j] = {x, y, 1.0}; };
    const double head_r = p.head_radius;
    plant(Joint::Nose, cx, head_cy);
    plant(Joint::LeftEye, cx + head_r / 3, head_cy - head_r / 4);
    plant(Joint::RightEye, cx - head_r / 3, head_cy - head_r / 4);
    plant(Joint::LeftEar, cx + 0.8 * head_r, head_cy);
    plant(Joint::RightEar, cx - 0.8 * head_r, head_cy);
    plant(Joint::LeftShoulder, torso_left(p.shoulder_width) + p.shoulder_width - 1, shoulder_y);
    plant(Joint::RightShoulder, torso_left(p.shoulder_width), shoulder_y);
    const double arm_right_cx = 0.5 * (right_arm_inner + right_arm_outer);
    const double arm_left_cx = 0.5 * (left_arm_inner + left_arm_outer);
    plant(Joint::LeftElbow, arm_right_cx, 0.5 * (shoulder_y + hip_y));
    plant(Joint::RightElbow, arm_left_cx, 0.5 * (shoulder_y + hip_y));
    plant(Joint::LeftWrist, arm_right_cx, hand_row - 2);
    plant(Joint::RightWrist, arm_left_cx, hand_row - 2);
    plant(Joint::LeftHip, cx + p.hip_width / 4.0, hip_y);
    plant(Joint::RightHip, cx - p.hip_width / 4.0, hip_y);
    const double leg_right_cx = right_leg_left + 0.5 * (p.leg_width - 1);
    const double leg_left_cx = left_leg_right - 0.5 * (p.leg_width - 1);
    plant(Joint::LeftKnee, leg_right_cx, 0.5 * (crotch_row + bottom));
    plant(Joint::RightKnee, leg_left_cx, 0.5 * (crotch_row + bottom));
    plant(Joint::LeftAnkle, leg_right_cx, bottom - 3);
    plant(Joint::RightAnkle, leg_left_cx, bottom - 3);

    const PxToCm scale{p.height_cm / p.stature_px};
    Measurements truth{p.bust_width * scale.scale, p.waist_width * scale.scale, p.hip_width * scale.scale,
                       Convention::FrontalWidth};
    return {std::move(m), kp, truth, classify(truth, classifier), scale, p.bust_row, p.waist_row, p.hip_row};
}

/// Draws parameters whose planted widths classify as `target`, with jittered
/// rows, widths and limb geometry.
inline SynthParams random_params(BodyShape target, std::mt19937_64& rng, const AnthroConfig& anthro = {},
                                 const ClassifierConfig& classifier = {}) {
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int attempt = 0; attempt < 100000; ++attempt) {
        SynthParams p;
        p.stature_px = uniform(820, 920);
        p.top_row = uniform(20, 1000 - p.stature_px - 20);
        p.height_cm = std::uniform_real_distribution<double>(150.0, 200.0)(rng);
        const int bust_offset = static_cast<int>(std::lround(p.stature_px * 0.28)) + uniform(-8, 8);
        p.bust_row = p.top_row + bust_offset;
        p.waist_row = p.bust_row + static_cast<int>(std::lround(p.stature_px * 0.1)) + uniform(-6, 6);
        const double span = (p.waist_row - p.bust_row) / (anthro.waist_fraction - anthro.bust_fraction);
        const double hip_y = p.bust_row - anthro.bust_fraction * span + span;
        p.hip_row = static_cast<int>(std::lround(hip_y + uniform(0, 8) * 0.01 * span));

        p.bust_width = uniform(150, 210);
        p.waist_width = p.bust_width - uniform(0, 75);
        p.hip_width = p.bust_width + uniform(-45, 45);
        if (p.waist_width > p.hip_width) continue;
        p.shoulder_width = std::max(p.bust_width, p.hip_width) + uniform(0, 20);
        p.arm_width = uniform(30, 45);
        p.arm_gap = uniform(4, 20);
        p.head_radius = uniform(45, 58);
        p.neck_width = uniform(50, 70);
        const int crotch = std::max(p.waist_width, p.hip_width - std::max(2, p.hip_width / 12));
        p.leg_gap = uniform(6, 20);
        p.leg_width = std::min(uniform(50, 75), (crotch - p.leg_gap) / 2);

        const PxToCm scale{p.height_cm / p.stature_px};
        Measurements truth{p.bust_width * scale.scale, p.waist_width * scale.scale, p.hip_width * scale.scale,
                           Convention::FrontalWidth};
        if (classify(truth, classifier) != target) continue;
        try {
            synth_silhouette(p, anthro, classifier);
        } catch (const Error&) {
            continue;
        }
        return p;
    }
    throw Error(ErrorKind::InfeasibleParams, "could not draw parameters for " + std::string(to_string(target)));
}

/// Label map carrying the VOC person class on the mask.
inline LabelMap mask_to_labelmap(const BinaryMask& m) {
    LabelMap lm(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(x, y)) lm.set(x, y, kVocPerson);
    return lm;
}

/// Corrupts a clean person label map the way a segmenter does in clutter:
/// non-person class blobs, small person-labelled speckles kept at least two
/// pixels away from the body, and small holes strictly inside the body.
inline LabelMap inject_background_noise(const LabelMap& clean, std::mt19937_64& rng, int speckles = 20,
                                        int holes = 6, int clutter = 12) {
    LabelMap lm = clean;
    const int w = lm.width(), h = lm.height();
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto person_near = [&](int x0, int y0, int x1, int y1) {
        for (int y = std::max(y0, 0); y <= std::min(y1, h - 1); ++y)
            for (int x = std::max(x0, 0); x <= std::min(x1, w - 1); ++x)
                if (clean.at(x, y) == kVocPerson) return true;
        return false;
    };
    for (int i = 0; i < clutter; ++i) {
        const int bw = uniform(5, 40), bh = uniform(5, 40);
        const int x0 = uniform(0, w - bw), y0 = uniform(0, h - bh);
        const auto cls = static_cast<std::uint8_t>(uniform(1, 20));
        if (cls == kVocPerson) continue;
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x)
                if (lm.at(x, y) != kVocPerson) lm.set(x, y, cls);
    }
    for (int i = 0; i < speckles; ++i) {
        const int bw = uniform(1, 12), bh = uniform(1, 12);
        const int x0 = uniform(0, w - bw), y0 = uniform(0, h - bh);
        if (person_near(x0 - 2, y0 - 2, x0 + bw + 1, y0 + bh + 1)) continue;
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) lm.set(x, y, kVocPerson);
    }
    for (int i = 0; i < holes; ++i) {
        const int bw = uniform(1, 6), bh = uniform(1, 6);
        const int x0 = uniform(1, w - bw - 1), y0 = uniform(1, h - bh - 1);
        // Only punch holes fully surrounded by person pixels.
        bool inside = true;
        for (int y = y0 - 1; y <= y0 + bh && inside; ++y)
            for (int x = x0 - 1; x <= x0 + bw && inside; ++x) inside = clean.at(x, y) == kVocPerson;
        if (!inside) continue;
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) lm.set(x, y, 0);
    }
    return lm;
}

/// Photo-like raster for a mask: flat-ish clothing colour on a noisy
/// background. Deterministic for a given generator state.
inline RgbImage render_subject(const BinaryMask& m, std::mt19937_64& rng) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(m.width()) * m.height() * 3);
    std::uniform_int_distribution<int> noise(0, 40);
    const std::array<int, 3> body = {170, 90, 60};
    const std::array<int, 3> bg = {60, 110, 150};
    std::size_t i = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const auto& base = m.at(x, y) ? body : bg;
            for (int c = 0; c < 3; ++c) px[i++] = static_cast<std::uint8_t>(std::clamp(base[c] + noise(rng) - 20, 0, 255));
        }
    }
    return RgbImage(m.width(), m.height(), std::move(px));
}

} // namespace bodyshape
