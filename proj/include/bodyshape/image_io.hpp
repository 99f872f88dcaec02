#pragma once

// OpenCV- and OpenSSL-backed file I/O. Link the `bodyshape::io` target.

#include <bodyshape/error.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/raster.hpp>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace bodyshape {

inline std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::InvalidArgument, "sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

/// Content key of a decoded image: sha256 of its row-major RGB bytes.
inline std::string image_digest(const RgbImage& image) { return sha256_hex(image.pixels()); }

inline cv::Mat to_bgr_mat(const RgbImage& image) {
    cv::Mat rgb(image.height(), image.width(), CV_8UC3, const_cast<std::uint8_t*>(image.pixels().data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

inline RgbImage from_bgr_mat(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    if (!rgb.isContinuous()) rgb = rgb.clone();
    std::vector<std::uint8_t> px(rgb.data, rgb.data + rgb.total() * 3);
    return RgbImage(rgb.cols, rgb.rows, std::move(px));
}

/// Decodes a PNG or JPEG. JPEG EXIF orientation is applied so the raster's
/// up direction is the subject's head.
inline RgbImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorKind::UnreadableFile, "no such file " + path.string());
    }
    std::array<unsigned char, 8> magic{};
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open " + path.string());
        in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    }
    const bool png = magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G';
    const bool jpeg = magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF;
    if (!png && !jpeg) throw Error(ErrorKind::UnsupportedFormat, path.string() + " is not a PNG or JPEG file");

    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw Error(ErrorKind::UnsupportedFormat, path.string() + ": " + e.what());
    }
    if (bgr.empty()) throw Error(ErrorKind::UnsupportedFormat, "cannot decode " + path.string());
    return from_bgr_mat(bgr);
}

inline void write_checked(const std::filesystem::path& path, const cv::Mat& mat, const std::vector<int>& params = {}) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat, params);
    } catch (const cv::Exception& e) {
        throw Error(ErrorKind::UnreadableFile, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorKind::UnreadableFile, "cannot write " + path.string());
}

inline void save_png(const RgbImage& image, const std::filesystem::path& path) { write_checked(path, to_bgr_mat(image)); }

/// 8-bit single-channel PNG holding class indices.
inline void write_labelmap_png(const LabelMap& lm, const std::filesystem::path& path) {
    cv::Mat m(lm.height(), lm.width(), CV_8UC1, const_cast<std::uint8_t*>(lm.labels().data()));
    write_checked(path, m);
}

inline LabelMap read_labelmap_png(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw Error(ErrorKind::UnreadableFile, "cannot decode label map " + path.string());
    if (m.type() != CV_8UC1) throw Error(ErrorKind::UnsupportedFormat, path.string() + " is not 8-bit single channel");
    if (!m.isContinuous()) m = m.clone();
    return LabelMap(m.cols, m.rows, std::vector<std::uint8_t>(m.data, m.data + m.total()));
}

/// 1-bit PNG.
inline void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
    cv::Mat m(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) m.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    write_checked(path, m, {cv::IMWRITE_PNG_BILEVEL, 1});
}

inline BinaryMask read_mask_png(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw Error(ErrorKind::UnreadableFile, "cannot decode mask " + path.string());
    BinaryMask mask(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x)
            if (m.at<std::uint8_t>(y, x) >= 128) mask.set(x, y);
    return mask;
}

} // namespace bodyshape
