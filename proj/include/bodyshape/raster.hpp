#pragma once

#include <bodyshape/error.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bodyshape {

inline constexpr std::uint8_t kVocPerson = 15;
inline constexpr std::uint8_t kVocNumClasses = 21;

/// Per-pixel PASCAL VOC class indices at source-image resolution.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height), labels_(static_cast<std::size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidArgument, "label map must be non-empty");
    }
    LabelMap(int width, int height, std::vector<std::uint8_t> labels)
        : width_(width), height_(height), labels_(std::move(labels)) {
        if (width <= 0 || height <= 0 || labels_.size() != static_cast<std::size_t>(width) * height) {
            throw Error(ErrorKind::InvalidArgument, "label buffer does not match dimensions");
        }
        for (auto l : labels_) {
            if (l >= kVocNumClasses) {
                throw Error(ErrorKind::InvalidArgument, "label " + std::to_string(l) + " outside [0, 20]");
            }
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::uint8_t at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, std::uint8_t label) { labels_[static_cast<std::size_t>(y) * width_ + x] = label; }
    std::span<const std::uint8_t> labels() const noexcept { return labels_; }

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// Person/background silhouette; stored one byte per pixel (0 or 1).
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
        if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidArgument, "mask must be non-empty");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Inclusive pixel rectangle.
struct PixelBox {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    int width() const noexcept { return right - left + 1; }
    int height() const noexcept { return bottom - top + 1; }
    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

} // namespace bodyshape
