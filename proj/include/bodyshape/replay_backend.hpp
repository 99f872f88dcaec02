#pragma once

#include <bodyshape/error.hpp>
#include <bodyshape/image_io.hpp>
#include <bodyshape/inference.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/raster.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

namespace bodyshape {

/// keypoints.json: an array of 17 `[x, y, confidence]` triples in COCO order.
inline KeypointSet read_keypoints_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BackendFailure, path.string() + ": " + e.what());
    }
    if (!doc.is_array() || doc.size() != kNumKeypoints) {
        throw Error(ErrorKind::BackendFailure, path.string() + ": expected an array of 17 keypoints");
    }
    KeypointSet kp;
    for (std::size_t i = 0; i < kNumKeypoints; ++i) {
        const auto& e = doc[i];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number()) {
            throw Error(ErrorKind::BackendFailure, path.string() + ": keypoint " + std::to_string(i) + " malformed");
        }
        kp.points[i] = {e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
    }
    return kp;
}

inline void write_keypoints_json(const KeypointSet& kp, const std::filesystem::path& path) {
    auto doc = nlohmann::json::array();
    for (const auto& p : kp.points) doc.push_back({p.x, p.y, p.confidence});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::UnreadableFile, "cannot write " + path.string());
    out << doc.dump() << '\n';
}

/// Replays recorded model outputs.
///
/// A fixture is a directory holding `labelmap.png` and `keypoints.json`. The
/// root may itself be a fixture, in which case it answers for every image.
/// Otherwise each subdirectory fixture is keyed by the content digest of its
/// source image (see image_digest): the text of `image.sha256` when present,
/// else the directory name.
class ReplayBackend final : public InferenceBackend {
public:
    explicit ReplayBackend(std::filesystem::path root) : root_(std::move(root)) {
        std::error_code ec;
        if (!std::filesystem::is_directory(root_, ec)) {
            throw Error(ErrorKind::BackendFailure, "replay directory " + root_.string() + " does not exist");
        }
        if (is_fixture(root_)) {
            single_ = root_;
            return;
        }
        for (const auto& entry : std::filesystem::directory_iterator(root_)) {
            if (!entry.is_directory() || !is_fixture(entry.path())) continue;
            std::string key = entry.path().filename().string();
            if (auto tag = entry.path() / "image.sha256"; std::filesystem::exists(tag)) {
                std::ifstream in(tag);
                in >> key;
            }
            by_digest_[key] = entry.path();
        }
        if (by_digest_.empty()) throw Error(ErrorKind::BackendFailure, "no replay fixtures under " + root_.string());
    }

    LabelMap segment(const RgbImage& image) override { return read_labelmap_png(fixture_for(image) / "labelmap.png"); }

    KeypointSet estimate_keypoints(const RgbImage& image, const BinaryMask&, const PixelBox&) override {
        return read_keypoints_json(fixture_for(image) / "keypoints.json");
    }

    bool concurrent_safe() const override { return true; }

    std::size_t size() const { return single_ ? 1 : by_digest_.size(); }

private:
    static bool is_fixture(const std::filesystem::path& dir) {
        return std::filesystem::exists(dir / "labelmap.png") && std::filesystem::exists(dir / "keypoints.json");
    }

    std::filesystem::path fixture_for(const RgbImage& image) const {
        if (single_) return *single_;
        const auto digest = image_digest(image);
        auto it = by_digest_.find(digest);
        if (it == by_digest_.end()) {
            throw Error(ErrorKind::BackendFailure, "no replay fixture for image digest " + digest);
        }
        return it->second;
    }

    std::filesystem::path root_;
    std::optional<std::filesystem::path> single_;
    std::map<std::string, std::filesystem::path> by_digest_;
};

/// Writes a fixture directory replayable by ReplayBackend.
inline void write_fixture(const std::filesystem::path& dir, const RgbImage& source, const LabelMap& labels,
                          const KeypointSet& keypoints) {
    std::filesystem::create_directories(dir);
    write_labelmap_png(labels, dir / "labelmap.png");
    write_keypoints_json(keypoints, dir / "keypoints.json");
    std::ofstream(dir / "image.sha256") << image_digest(source) << '\n';
}

} // namespace bodyshape
