#pragma once

#include <bodyshape/error.hpp>
#include <bodyshape/raster.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace bodyshape {

/// Contiguous run of person pixels on one row.
struct RowSpan {
    int row = 0;
    int left = 0;
    int right = 0;

    int width_px() const noexcept { return right - left + 1; }
    friend bool operator==(const RowSpan&, const RowSpan&) = default;
};

struct SilhouetteConfig {
    /// Morphological opening with a 3x3 cross before component selection.
    bool smooth = false;
};

/// True exactly where the label is the VOC person class.
inline BinaryMask binarize_person(const LabelMap& lm) {
    BinaryMask m(lm.width(), lm.height());
    bool any = false;
    for (int y = 0; y < lm.height(); ++y) {
        for (int x = 0; x < lm.width(); ++x) {
            if (lm.at(x, y) == kVocPerson) {
                m.set(x, y);
                any = true;
            }
        }
    }
    if (!any) throw Error(ErrorKind::NoPersonDetected, "label map contains no person pixels");
    return m;
}

namespace detail {

/// 4-connected flood fill over pixels where `value(x, y) == target`, writing
/// `id` into `labels`. Returns the number of pixels visited.
template <class Pred>
std::size_t flood4(int w, int h, int sx, int sy, int id, std::vector<int>& labels, Pred&& member) {
    std::vector<std::pair<int, int>> stack{{sx, sy}};
    labels[static_cast<std::size_t>(sy) * w + sx] = id;
    std::size_t size = 0;
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        ++size;
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
            if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
            auto& slot = labels[static_cast<std::size_t>(ny[k]) * w + nx[k]];
            if (slot != 0 || !member(nx[k], ny[k])) continue;
            slot = id;
            stack.emplace_back(nx[k], ny[k]);
        }
    }
    return size;
}

} // namespace detail

/// Keeps only the largest 4-connected component. Components are discovered
/// in raster order, so on equal size the one whose first pixel is topmost
/// (then leftmost) wins.
inline BinaryMask largest_component(const BinaryMask& m) {
    const int w = m.width(), h = m.height();
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    int next_id = 0, best_id = 0;
    std::size_t best_size = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0) continue;
            auto size = detail::flood4(w, h, x, y, ++next_id, labels, [&](int px, int py) { return m.at(px, py); });
            if (size > best_size) {
                best_size = size;
                best_id = next_id;
            }
        }
    }
    if (best_id == 0) throw Error(ErrorKind::EmptyMask, "mask has no true pixels");
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (labels[static_cast<std::size_t>(y) * w + x] == best_id) out.set(x, y);
    return out;
}

/// Sets every false region that is not 4-connected to the border.
inline BinaryMask fill_holes(const BinaryMask& m) {
    const int w = m.width(), h = m.height();
    std::vector<int> outside(static_cast<std::size_t>(w) * h, 0);
    auto background = [&](int x, int y) { return !m.at(x, y); };
    auto seed = [&](int x, int y) {
        if (!m.at(x, y) && outside[static_cast<std::size_t>(y) * w + x] == 0)
            detail::flood4(w, h, x, y, 1, outside, background);
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (m.at(x, y) || outside[static_cast<std::size_t>(y) * w + x] == 0) out.set(x, y);
    return out;
}

/// Erosion followed by dilation with a 3x3 cross. Out-of-image pixels count
/// as background for the erosion.
inline BinaryMask open_cross(const BinaryMask& m) {
    const int w = m.width(), h = m.height();
    const int dx[5] = {0, -1, 1, 0, 0};
    const int dy[5] = {0, 0, 0, -1, 1};
    BinaryMask eroded(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool keep = true;
            for (int k = 0; k < 5 && keep; ++k) keep = m.in_bounds(x + dx[k], y + dy[k]) && m.at(x + dx[k], y + dy[k]);
            if (keep) eroded.set(x, y);
        }
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!eroded.at(x, y)) continue;
            for (int k = 0; k < 5; ++k)
                if (m.in_bounds(x + dx[k], y + dy[k])) out.set(x + dx[k], y + dy[k]);
        }
    }
    return out;
}

/// binarize -> (optional opening) -> largest component -> hole filling.
inline BinaryMask clean_person_mask(const LabelMap& lm, const SilhouetteConfig& cfg = {}) {
    auto mask = binarize_person(lm);
    if (cfg.smooth) {
        mask = open_cross(mask);
        if (mask.count() == 0) throw Error(ErrorKind::NoPersonDetected, "person region vanished after opening");
    }
    return fill_holes(largest_component(mask));
}

/// Tight bounding box of the true pixels.
inline PixelBox bounding_box(const BinaryMask& m) {
    PixelBox box{m.width(), m.height(), -1, -1};
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            box.left = std::min(box.left, x);
            box.right = std::max(box.right, x);
            box.top = std::min(box.top, y);
            box.bottom = std::max(box.bottom, y);
        }
    }
    if (box.right < 0) throw Error(ErrorKind::EmptyMask, "mask has no true pixels");
    return box;
}

/// Head-to-feet extent: bottommost true row - topmost true row + 1.
inline int mask_height_px(const BinaryMask& m) {
    int top = -1, bottom = -1;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y)) {
                if (top < 0) top = y;
                bottom = y;
                break;
            }
        }
    }
    if (top < 0) throw Error(ErrorKind::EmptyMask, "mask has no true pixels");
    return bottom - top + 1;
}

/// Mean column of all true pixels.
inline double centroid_column(const BinaryMask& m) {
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y)) {
                sum += x;
                ++n;
            }
        }
    }
    if (n == 0) throw Error(ErrorKind::EmptyMask, "mask has no true pixels");
    return sum / static_cast<double>(n);
}

/// Maximal runs of true pixels on `row`, left to right.
inline std::vector<RowSpan> row_runs(const BinaryMask& m, int row) {
    std::vector<RowSpan> runs;
    int x = 0;
    while (x < m.width()) {
        if (!m.at(x, row)) {
            ++x;
            continue;
        }
        int start = x;
        while (x < m.width() && m.at(x, row)) ++x;
        runs.push_back({row, start, x - 1});
    }
    return runs;
}

/// Selects the run containing `centroid_x`, otherwise the run whose center is
/// nearest to it (leftmost on ties).
inline RowSpan central_row_span(const BinaryMask& m, int row, double centroid_x) {
    if (row < 0 || row >= m.height()) {
        throw Error(ErrorKind::EmptyRow, "row " + std::to_string(row) + " outside mask");
    }
    auto runs = row_runs(m, row);
    if (runs.empty()) throw Error(ErrorKind::EmptyRow, "row " + std::to_string(row) + " has no person pixels");
    for (const auto& r : runs) {
        if (r.left <= centroid_x && centroid_x <= r.right) return r;
    }
    const RowSpan* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
        double d = std::abs(0.5 * (r.left + r.right) - centroid_x);
        if (d < best_dist) {
            best_dist = d;
            best = &r;
        }
    }
    return *best;
}

inline RowSpan central_row_span(const BinaryMask& m, int row) {
    return central_row_span(m, row, centroid_column(m));
}

} // namespace bodyshape
