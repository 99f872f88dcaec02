#pragma once

#include <bodyshape/error.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bodyshape {

inline constexpr int kMinImageSide = 64;

/// Decoded 8-bit RGB raster, row-major, three bytes per pixel.
class RgbImage {
public:
    RgbImage() = default;

    RgbImage(int width, int height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (width < kMinImageSide || height < kMinImageSide) {
            throw Error(ErrorKind::ImageTooSmall,
                        std::to_string(width) + "x" + std::to_string(height) + " is below the " +
                            std::to_string(kMinImageSide) + " px minimum");
        }
        if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
            throw Error(ErrorKind::InvalidArgument, "pixel buffer does not match image dimensions");
        }
    }

    /// Uniformly filled image.
    static RgbImage filled(int width, int height, std::array<std::uint8_t, 3> rgb) {
        std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
        for (std::size_t i = 0; i < px.size(); i += 3) {
            px[i] = rgb[0];
            px[i + 1] = rgb[1];
            px[i + 2] = rgb[2];
        }
        return RgbImage(width, height, std::move(px));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    std::array<std::uint8_t, 3> at(int x, int y) const {
        const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }

    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        pixels_[i] = rgb[0];
        pixels_[i + 1] = rgb[1];
        pixels_[i + 2] = rgb[2];
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

inline constexpr double kMinHeightCm = 100.0;
inline constexpr double kMaxHeightCm = 230.0;

/// Subject stature in centimetres, always within [100, 230].
class HeightCm {
public:
    double value() const noexcept { return value_; }
    friend bool operator==(const HeightCm&, const HeightCm&) = default;

private:
    explicit HeightCm(double v) : value_(v) {}
    double value_;
    friend HeightCm validate_height(double raw);
};

/// Values outside the range usually mean metres or inches were supplied.
inline HeightCm validate_height(double raw) {
    if (!std::isfinite(raw) || raw < kMinHeightCm || raw > kMaxHeightCm) {
        throw Error(ErrorKind::HeightOutOfRange,
                    "height " + std::to_string(raw) + " cm is outside [100, 230]; expected centimetres");
    }
    return HeightCm(raw);
}

} // namespace bodyshape
