#pragma once

#include <bodyshape/error.hpp>
#include <bodyshape/image_io.hpp>
#include <bodyshape/inference.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/raster.hpp>

#include <nlohmann/json.hpp>
#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace bodyshape {

struct ModelFile {
    std::filesystem::path path;
    std::string sha256;
};

/// `{"segmentation": {"path", "sha256"}, "keypoints": {"path", "sha256"}}`;
/// relative paths resolve against the manifest's directory.
struct ModelManifest {
    ModelFile segmentation;
    ModelFile keypoints;
};

inline ModelManifest read_model_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::BackendFailure, "cannot open model manifest " + path.string());
    ModelManifest m;
    try {
        auto doc = nlohmann::json::parse(in);
        auto entry = [&](const char* name) {
            const auto& e = doc.at(name);
            std::filesystem::path p = e.at("path").get<std::string>();
            if (p.is_relative()) p = path.parent_path() / p;
            return ModelFile{p.lexically_normal(), e.at("sha256").get<std::string>()};
        };
        m.segmentation = entry("segmentation");
        m.keypoints = entry("keypoints");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BackendFailure, "malformed model manifest " + path.string() + ": " + e.what());
    }
    return m;
}

/// Throws BackendFailure unless the file exists and matches its checksum.
inline void verify_model_file(const ModelFile& f) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(f.path, ec)) {
        throw Error(ErrorKind::BackendFailure, "model file " + f.path.string() + " is missing");
    }
    auto actual = file_sha256(f.path);
    std::string expected = f.sha256;
    std::transform(expected.begin(), expected.end(), expected.begin(), [](unsigned char c) { return std::tolower(c); });
    if (actual != expected) {
        throw Error(ErrorKind::BackendFailure,
                    "checksum mismatch for " + f.path.string() + ": expected " + expected + ", got " + actual);
    }
}

inline constexpr int kSegmentationLongSide = 513;
inline constexpr int kPoseInputWidth = 288;
inline constexpr int kPoseInputHeight = 384;
inline constexpr double kPoseBoxExpansion = 0.25;
inline constexpr std::array<float, 3> kImageNetMean = {0.485f, 0.456f, 0.406f};
inline constexpr std::array<float, 3> kImageNetStd = {0.229f, 0.224f, 0.225f};

/// Network input size for segmentation: longest side 513, aspect preserved.
inline cv::Size segmentation_input_size(int width, int height) {
    const double s = static_cast<double>(kSegmentationLongSide) / std::max(width, height);
    return {std::max(1, static_cast<int>(std::lround(width * s))), std::max(1, static_cast<int>(std::lround(height * s)))};
}

/// Source-image region fed to the pose network, in continuous pixel units.
struct CropWindow {
    double center_x = 0.0;
    double center_y = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Person box grown by 25% on each side, then padded to a 3:4 (w:h) aspect.
inline CropWindow pose_crop(const PixelBox& box) {
    CropWindow c;
    c.center_x = 0.5 * (box.left + box.right);
    c.center_y = 0.5 * (box.top + box.bottom);
    c.width = box.width() * (1.0 + 2.0 * kPoseBoxExpansion);
    c.height = box.height() * (1.0 + 2.0 * kPoseBoxExpansion);
    constexpr double aspect = static_cast<double>(kPoseInputWidth) / kPoseInputHeight;
    if (c.width > aspect * c.height) c.height = c.width / aspect;
    else c.width = aspect * c.height;
    return c;
}

/// Maps a cell of a `grid_w` x `grid_h` grid covering `crop` to source
/// pixel coordinates (cell centers onto pixel centers).
inline Affine2D grid_to_source(const CropWindow& crop, int grid_w, int grid_h) {
    const double sx = crop.width / grid_w;
    const double sy = crop.height / grid_h;
    const double x0 = crop.center_x - 0.5 * crop.width;
    const double y0 = crop.center_y - 0.5 * crop.height;
    return {sx, 0.0, x0 + 0.5 * sx, 0.0, sy, y0 + 0.5 * sy};
}

namespace detail {

/// NCHW float blob with ImageNet normalization from a BGR 8-bit image.
inline cv::Mat normalized_blob(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    rgb.convertTo(rgb, CV_32FC3, 1.0 / 255.0);
    cv::subtract(rgb, cv::Scalar(kImageNetMean[0], kImageNetMean[1], kImageNetMean[2]), rgb);
    cv::divide(rgb, cv::Scalar(kImageNetStd[0], kImageNetStd[1], kImageNetStd[2]), rgb);
    return cv::dnn::blobFromImage(rgb);
}

} // namespace detail

/// DeepLabV3 (VOC) segmentation + top-down HRNet (COCO) pose, both loaded
/// from checksum-verified ONNX files through OpenCV's DNN module.
class OnnxBackend final : public InferenceBackend {
public:
    explicit OnnxBackend(const ModelManifest& manifest) {
        verify_model_file(manifest.segmentation);
        verify_model_file(manifest.keypoints);
        try {
            segmentation_ = cv::dnn::readNetFromONNX(manifest.segmentation.path.string());
            pose_ = cv::dnn::readNetFromONNX(manifest.keypoints.path.string());
        } catch (const cv::Exception& e) {
            throw Error(ErrorKind::BackendFailure, std::string("cannot load model: ") + e.what());
        }
    }

    explicit OnnxBackend(const std::filesystem::path& manifest_path) : OnnxBackend(read_model_manifest(manifest_path)) {}

    LabelMap segment(const RgbImage& image) override {
        cv::Mat bgr = to_bgr_mat(image);
        cv::Mat resized;
        cv::resize(bgr, resized, segmentation_input_size(image.width(), image.height()), 0, 0, cv::INTER_LINEAR);
        segmentation_.setInput(detail::normalized_blob(resized));
        cv::Mat logits = segmentation_.forward();
        if (logits.dims != 4 || logits.size[1] != kVocNumClasses) {
            throw Error(ErrorKind::BackendFailure, "segmentation output must be [1, 21, H, W]");
        }
        const int h = logits.size[2], w = logits.size[3];
        cv::Mat small(h, w, CV_8UC1);
        const float* data = logits.ptr<float>();
        const std::size_t plane = static_cast<std::size_t>(h) * w;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                int best = 0;
                for (int c = 1; c < kVocNumClasses; ++c)
                    if (data[c * plane + i] > data[best * plane + i]) best = c;
                small.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(best);
            }
        }
        cv::Mat full;
        cv::resize(small, full, cv::Size(image.width(), image.height()), 0, 0, cv::INTER_NEAREST);
        return LabelMap(full.cols, full.rows, std::vector<std::uint8_t>(full.data, full.data + full.total()));
    }

    KeypointSet estimate_keypoints(const RgbImage& image, const BinaryMask& person_mask,
                                   const PixelBox& person_box) override {
        const auto crop = pose_crop(person_box);
        cv::Mat bgr = to_bgr_mat(subtract_background(image, person_mask));
        // Source -> network input: inverse of the crop's grid mapping at input resolution.
        const auto to_src = grid_to_source(crop, kPoseInputWidth, kPoseInputHeight);
        cv::Mat forward = (cv::Mat_<double>(2, 3) << 1.0 / to_src.xx, 0.0, -to_src.tx / to_src.xx, 0.0,
                           1.0 / to_src.yy, -to_src.ty / to_src.yy);
        cv::Mat input;
        cv::warpAffine(bgr, input, forward, cv::Size(kPoseInputWidth, kPoseInputHeight), cv::INTER_LINEAR,
                       cv::BORDER_CONSTANT, cv::Scalar(0, 0, 0));
        pose_.setInput(detail::normalized_blob(input));
        cv::Mat out = pose_.forward();
        if (out.dims != 4 || out.size[1] != static_cast<int>(kNumKeypoints)) {
            throw Error(ErrorKind::BackendFailure, "pose output must be [1, 17, H, W]");
        }
        const int h = out.size[2], w = out.size[3];
        const float* data = out.ptr<float>();
        std::array<std::vector<float>, kNumKeypoints> channels;
        for (std::size_t k = 0; k < kNumKeypoints; ++k) {
            const float* c = data + k * static_cast<std::size_t>(h) * w;
            channels[k].assign(c, c + static_cast<std::size_t>(h) * w);
            for (auto& v : channels[k]) v = std::max(v, 0.0f);
        }
        auto kp = decode_heatmaps(Heatmaps(w, h, std::move(channels), grid_to_source(crop, w, h)));
        for (auto& p : kp.points) {
            p.x = std::clamp(p.x, 0.0, image.width() - 1.0);
            p.y = std::clamp(p.y, 0.0, image.height() - 1.0);
        }
        return kp;
    }

private:
    cv::dnn::Net segmentation_;
    cv::dnn::Net pose_;
};

} // namespace bodyshape
