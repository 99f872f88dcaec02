#pragma once

#include <bodyshape/error.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/raster.hpp>
#include <bodyshape/silhouette.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace bodyshape {

enum class Convention { FrontalWidth, EstCircumference };

constexpr std::string_view to_string(Convention c) {
    return c == Convention::FrontalWidth ? "frontal_width" : "est_circumference";
}

inline std::optional<Convention> parse_convention(std::string_view s) {
    if (s == "frontal_width") return Convention::FrontalWidth;
    if (s == "est_circumference") return Convention::EstCircumference;
    return std::nullopt;
}

/// Anatomical priors for line placement. Fractions are of the shoulder-to-hip
/// keypoint span; aspects are depth/width ratios of the torso cross-section.
struct AnthroConfig {
    double bust_fraction = 0.31;
    double waist_fraction = 0.62;
    double waist_search_halfwindow = 0.10;
    double hip_search_window_up = 0.05;
    double hip_search_window_down = 0.15;
    double aspect_bust = 0.70;
    double aspect_waist = 0.75;
    double aspect_hip = 0.80;
    Convention convention = Convention::FrontalWidth;
    /// Minimum confidence for shoulder and hip keypoints.
    double keypoint_threshold = 0.3;

    void validate() const {
        auto fraction = [](double v) { return v > 0.0 && v < 1.0; };
        auto aspect = [](double v) { return v > 0.3 && v <= 1.0; };
        if (!fraction(bust_fraction) || !fraction(waist_fraction) || !fraction(waist_search_halfwindow) ||
            !fraction(hip_search_window_up) || !fraction(hip_search_window_down)) {
            throw Error(ErrorKind::InvalidConfig, "anthropometry fractions must lie in (0, 1)");
        }
        if (!(bust_fraction < waist_fraction)) {
            throw Error(ErrorKind::InvalidConfig, "bust_fraction must be below waist_fraction");
        }
        if (!aspect(aspect_bust) || !aspect(aspect_waist) || !aspect(aspect_hip)) {
            throw Error(ErrorKind::InvalidConfig, "aspect ratios must lie in (0.3, 1.0]");
        }
        if (!(keypoint_threshold >= 0.0 && keypoint_threshold <= 1.0)) {
            throw Error(ErrorKind::InvalidConfig, "keypoint_threshold must lie in [0, 1]");
        }
    }
};

struct PxToCm {
    double scale = 0.0; ///< centimetres per pixel
};

struct BodyLines {
    RowSpan bust;
    RowSpan waist;
    RowSpan hip;
    friend bool operator==(const BodyLines&, const BodyLines&) = default;
};

struct Measurements {
    double bust = 0.0;
    double waist = 0.0;
    double hip = 0.0;
    Convention convention = Convention::FrontalWidth;
    friend bool operator==(const Measurements&, const Measurements&) = default;
};

inline PxToCm px_to_cm(HeightCm height, const BinaryMask& mask) {
    return {height.value() / mask_height_px(mask)};
}

/// Ramanujan's first approximation of the perimeter of an ellipse whose
/// major axis is `width_cm` and minor axis is `aspect * width_cm`.
inline double ellipse_circumference(double width_cm, double aspect) {
    if (!(width_cm > 0.0) || !std::isfinite(width_cm)) {
        throw Error(ErrorKind::InvalidArgument, "width must be positive");
    }
    if (!(aspect > 0.3 && aspect <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "aspect must lie in (0.3, 1.0]");
    }
    const double a = width_cm / 2.0;
    const double b = aspect * a;
    return std::numbers::pi * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
}

namespace detail {

struct RowCandidate {
    RowSpan span;
    double distance;
};

/// Scans rows [lo, hi] and keeps the span whose width is preferred by
/// `better(a, b)`; ties go to the row nearest `center`, then the smaller row.
template <class Better>
std::optional<RowSpan> search_rows(const BinaryMask& mask, double centroid, int lo, int hi, double center,
                                   Better better) {
    lo = std::max(lo, 0);
    hi = std::min(hi, mask.height() - 1);
    std::optional<RowCandidate> best;
    for (int row = lo; row <= hi; ++row) {
        if (row_runs(mask, row).empty()) continue;
        RowCandidate c{central_row_span(mask, row, centroid), std::abs(row - center)};
        if (!best) {
            best = c;
            continue;
        }
        const int cw = c.span.width_px(), bw = best->span.width_px();
        if (better(cw, bw) || (cw == bw && c.distance < best->distance)) best = c;
    }
    if (!best) return std::nullopt;
    return best->span;
}

} // namespace detail

/// Places bust, waist and hip rows from the shoulder/hip keypoints:
/// bust at a fixed fraction of the span, waist at the narrowest central run
/// inside a window around its prior, hip at the widest central run in a
/// window around the hip joints.
inline BodyLines locate_lines(const KeypointSet& kp, const BinaryMask& mask, const AnthroConfig& cfg = {}) {
    cfg.validate();
    for (auto j : kTorsoJoints) {
        if (kp[j].confidence < cfg.keypoint_threshold) {
            throw Error(ErrorKind::LowConfidencePose,
                        std::string(kJointNames[static_cast<std::size_t>(j)]) + " confidence " +
                            std::to_string(kp[j].confidence) + " below threshold");
        }
    }
    const double shoulder = 0.5 * (kp[Joint::LeftShoulder].y + kp[Joint::RightShoulder].y);
    const double hip = 0.5 * (kp[Joint::LeftHip].y + kp[Joint::RightHip].y);
    if (!(shoulder < hip)) throw Error(ErrorKind::UpsideDown, "hip keypoints are not below the shoulders");
    const double span = hip - shoulder;
    const double centroid = centroid_column(mask);

    const int bust_row = static_cast<int>(std::lround(shoulder + cfg.bust_fraction * span));
    if (bust_row < 0 || bust_row >= mask.height() || row_runs(mask, bust_row).empty()) {
        throw Error(ErrorKind::LineOutsideMask, "bust row " + std::to_string(bust_row) + " misses the silhouette");
    }
    BodyLines lines;
    lines.bust = central_row_span(mask, bust_row, centroid);

    const int waist_center = static_cast<int>(std::lround(shoulder + cfg.waist_fraction * span));
    const int waist_half = static_cast<int>(std::lround(cfg.waist_search_halfwindow * span));
    auto waist = detail::search_rows(mask, centroid, waist_center - waist_half, waist_center + waist_half,
                                     waist_center, [](int a, int b) { return a < b; });
    if (!waist) throw Error(ErrorKind::LineOutsideMask, "waist window misses the silhouette");
    lines.waist = *waist;

    const int hip_lo = static_cast<int>(std::lround(hip - cfg.hip_search_window_up * span));
    const int hip_hi = static_cast<int>(std::lround(hip + cfg.hip_search_window_down * span));
    auto hip_span = detail::search_rows(mask, centroid, hip_lo, hip_hi, 0.5 * (hip_lo + hip_hi),
                                        [](int a, int b) { return a > b; });
    if (!hip_span) throw Error(ErrorKind::LineOutsideMask, "hip window misses the silhouette");
    lines.hip = *hip_span;

    if (!(lines.bust.row < lines.waist.row && lines.waist.row < lines.hip.row)) {
        throw Error(ErrorKind::LinesOutOfOrder, "bust/waist/hip rows " + std::to_string(lines.bust.row) + "/" +
                                                    std::to_string(lines.waist.row) + "/" +
                                                    std::to_string(lines.hip.row) + " are not ordered");
    }
    return lines;
}

/// Centimetre widths of the three lines, regardless of configured convention.
inline Measurements frontal_widths(const BodyLines& lines, PxToCm scale) {
    if (!(scale.scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
    for (const auto* s : {&lines.bust, &lines.waist, &lines.hip}) {
        if (s->width_px() <= 0) throw Error(ErrorKind::InvalidArgument, "line width must be positive");
    }
    return {lines.bust.width_px() * scale.scale, lines.waist.width_px() * scale.scale,
            lines.hip.width_px() * scale.scale, Convention::FrontalWidth};
}

/// Re-expresses frontal widths in `convention`.
inline Measurements convert(const Measurements& widths, Convention convention, const AnthroConfig& cfg) {
    if (convention == Convention::FrontalWidth) return widths;
    return {ellipse_circumference(widths.bust, cfg.aspect_bust),
            ellipse_circumference(widths.waist, cfg.aspect_waist),
            ellipse_circumference(widths.hip, cfg.aspect_hip), Convention::EstCircumference};
}

inline Measurements measure(const BodyLines& lines, PxToCm scale, const AnthroConfig& cfg = {}) {
    return convert(frontal_widths(lines, scale), cfg.convention, cfg);
}

} // namespace bodyshape
