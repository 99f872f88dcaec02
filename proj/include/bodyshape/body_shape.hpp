#pragma once

#include <bodyshape/error.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace bodyshape {

enum class BodyShape { Rectangle, Triangle, InvertedTriangle, Spoon, Hourglass };

inline constexpr std::size_t kNumShapes = 5;

inline constexpr std::array<BodyShape, kNumShapes> kAllShapes = {
    BodyShape::Rectangle, BodyShape::Triangle, BodyShape::InvertedTriangle, BodyShape::Spoon,
    BodyShape::Hourglass};

constexpr std::size_t index_of(BodyShape s) { return static_cast<std::size_t>(s); }

/// Canonical label, used verbatim in every serialized output.
constexpr std::string_view to_string(BodyShape s) {
    switch (s) {
    case BodyShape::Rectangle: return "Rectangle";
    case BodyShape::Triangle: return "Triangle";
    case BodyShape::InvertedTriangle: return "InvertedTriangle";
    case BodyShape::Spoon: return "Spoon";
    case BodyShape::Hourglass: return "Hourglass";
    }
    return "Rectangle";
}

/// Exact match against the canonical labels only.
inline std::optional<BodyShape> parse_shape(std::string_view label) {
    for (auto s : kAllShapes) {
        if (to_string(s) == label) return s;
    }
    return std::nullopt;
}

} // namespace bodyshape
