#pragma once

#include <bodyshape/image_io.hpp>
#include <bodyshape/pipeline.hpp>

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>

namespace bodyshape {

/// Input image with the bust, waist and hip lines drawn across their spans
/// and labelled `<name>: <value> cm`.
inline RgbImage render_overlay(const RgbImage& image, const PipelineResult& r) {
    cv::Mat canvas = to_bgr_mat(image);
    const int thickness = std::max(1, image.height() / 400);
    const double font_scale = std::max(0.4, image.height() / 1200.0);
    struct Line {
        const char* name;
        const RowSpan& span;
        double value;
        cv::Scalar colour;
    };
    const Line lines[3] = {{"bust", r.lines.bust, r.measurements.bust, {60, 60, 230}},
                           {"waist", r.lines.waist, r.measurements.waist, {60, 200, 60}},
                           {"hip", r.lines.hip, r.measurements.hip, {230, 120, 40}}};
    for (const auto& l : lines) {
        cv::line(canvas, {l.span.left, l.span.row}, {l.span.right, l.span.row}, l.colour, thickness, cv::LINE_AA);
        char label[64];
        std::snprintf(label, sizeof(label), "%s: %.1f cm", l.name, l.value);
        int baseline = 0;
        auto size = cv::getTextSize(label, cv::FONT_HERSHEY_SIMPLEX, font_scale, thickness, &baseline);
        int x = std::min(l.span.right + 8, std::max(0, canvas.cols - size.width - 2));
        cv::putText(canvas, label, {x, std::max(size.height, l.span.row - 4)}, cv::FONT_HERSHEY_SIMPLEX, font_scale,
                    l.colour, thickness, cv::LINE_AA);
    }
    return from_bgr_mat(canvas);
}

inline void write_overlay(const RgbImage& image, const PipelineResult& r, const std::filesystem::path& path) {
    save_png(render_overlay(image, r), path);
}

} // namespace bodyshape
