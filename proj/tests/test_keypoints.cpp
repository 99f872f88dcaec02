#include <bodyshape/keypoints.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace bodyshape;

namespace {

Heatmaps uniform_grid(int w, int h, float fill, Affine2D t = {}) {
    std::array<std::vector<float>, kNumKeypoints> ch;
    for (auto& c : ch) c.assign(static_cast<std::size_t>(w) * h, fill);
    return Heatmaps(w, h, std::move(ch), t);
}

Heatmaps with_channel0(int w, int h, std::vector<float> grid, Affine2D t = {}) {
    std::array<std::vector<float>, kNumKeypoints> ch;
    for (auto& c : ch) c = grid;
    return Heatmaps(w, h, std::move(ch), t);
}

} // namespace

TEST(DecodeHeatmaps, ImpulseWithFlatNeighborsShiftsTowardPlusSide) {
    std::vector<float> g(32 * 24, 0.0f);
    g[12 * 32 + 10] = 0.8f;
    auto kp = decode_heatmaps(with_channel0(32, 24, g));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 10.25);
    EXPECT_DOUBLE_EQ(kp.points[0].y, 12.25);
    EXPECT_NEAR(kp.points[0].confidence, 0.8, 1e-7);
}

TEST(DecodeHeatmaps, ShiftTowardLargerNeighbor) {
    std::vector<float> g(16 * 16, 0.0f);
    g[8 * 16 + 8] = 5.0f;
    g[8 * 16 + 9] = 4.0f;
    g[8 * 16 + 7] = 1.0f;
    auto kp = decode_heatmaps(with_channel0(16, 16, g));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 8.25);
    EXPECT_DOUBLE_EQ(kp.points[0].confidence, 1.0); // clamped
}

TEST(DecodeHeatmaps, ShiftTowardMinusSide) {
    std::vector<float> g(16 * 16, 0.0f);
    g[8 * 16 + 8] = 0.9f;
    g[8 * 16 + 7] = 0.5f;  // left
    g[7 * 16 + 8] = 0.5f;  // up
    auto kp = decode_heatmaps(with_channel0(16, 16, g));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 7.75);
    EXPECT_DOUBLE_EQ(kp.points[0].y, 7.75);
}

TEST(DecodeHeatmaps, BorderPeakMovesInward) {
    std::vector<float> g(8 * 8, 0.0f);
    g[7 * 8 + 7] = 1.0f;
    auto kp = decode_heatmaps(with_channel0(8, 8, g));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 6.75);
    EXPECT_DOUBLE_EQ(kp.points[0].y, 6.75);
}

TEST(DecodeHeatmaps, UniformGridIsDegenerate) {
    auto kp = decode_heatmaps(uniform_grid(10, 10, 0.7f));
    for (const auto& p : kp.points) {
        EXPECT_EQ(p.confidence, 0.0);
        EXPECT_DOUBLE_EQ(p.x, 0.25);
        EXPECT_DOUBLE_EQ(p.y, 0.25);
    }
}

TEST(DecodeHeatmaps, FirstOccurrenceTieBreak) {
    std::vector<float> g(10 * 10, 0.0f);
    g[3 * 10 + 6] = 1.0f;
    g[5 * 10 + 2] = 1.0f;
    auto kp = decode_heatmaps(with_channel0(10, 10, g));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 6.25);
    EXPECT_DOUBLE_EQ(kp.points[0].y, 3.25);
}

TEST(DecodeHeatmaps, AffineMapsToSource) {
    std::vector<float> g(16 * 16, 0.0f);
    g[8 * 16 + 8] = 5.0f;
    g[8 * 16 + 9] = 4.0f;
    g[9 * 16 + 8] = 4.0f;
    Affine2D t{4.0, 0.0, 100.0, 0.0, 4.0, 50.0};
    auto kp = decode_heatmaps(with_channel0(16, 16, g, t));
    EXPECT_DOUBLE_EQ(kp.points[0].x, 100.0 + 4.0 * 8.25);
    EXPECT_DOUBLE_EQ(kp.points[0].y, 50.0 + 4.0 * 8.25);
}

TEST(DecodeHeatmaps, RejectsBadInputs) {
    std::array<std::vector<float>, kNumKeypoints> ch;
    for (auto& c : ch) c.assign(12, 0.0f);
    ch[3].assign(11, 0.0f);
    EXPECT_THROW(Heatmaps(4, 3, ch, {}), Error);
    for (auto& c : ch) c.assign(12, 0.0f);
    EXPECT_THROW(Heatmaps(4, 3, ch, Affine2D{1, 2, 0, 2, 4, 0}), Error); // singular
}

TEST(DecodeHeatmaps, ScalingInvariantAndInBounds) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> act(0.0f, 1.0f);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 4 + trial % 20, h = 3 + trial % 17;
        std::array<std::vector<float>, kNumKeypoints> a, b;
        const double c = scale(rng);
        for (std::size_t k = 0; k < kNumKeypoints; ++k) {
            for (int i = 0; i < w * h; ++i) {
                float v = act(rng);
                a[k].push_back(v);
                b[k].push_back(static_cast<float>(v * c));
            }
        }
        Affine2D t{2.0, 0.0, 5.0, 0.0, 3.0, 7.0};
        auto ka = decode_heatmaps(Heatmaps(w, h, a, t));
        auto kb = decode_heatmaps(Heatmaps(w, h, b, t));
        for (std::size_t k = 0; k < kNumKeypoints; ++k) {
            EXPECT_EQ(ka.points[k].x, kb.points[k].x);
            EXPECT_EQ(ka.points[k].y, kb.points[k].y);
            EXPECT_GE(ka.points[k].x, 5.0);
            EXPECT_LE(ka.points[k].x, 5.0 + 2.0 * (w - 1));
            EXPECT_GE(ka.points[k].y, 7.0);
            EXPECT_LE(ka.points[k].y, 7.0 + 3.0 * (h - 1));
        }
    }
}
