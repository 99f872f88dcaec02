#pragma once

#include <bodyshape/evaluation.hpp>
#include <bodyshape/pipeline.hpp>
#include <bodyshape/version.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace bodyshape {

using ojson = nlohmann::ordered_json;

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

/// Config file layout; every key is optional:
/// {
///   "silhouette":    {"smooth": bool},
///   "anthropometry": {"bust_fraction", "waist_fraction", "waist_search_halfwindow",
///                     "hip_search_window_up", "hip_search_window_down",
///                     "aspect_bust", "aspect_waist", "aspect_hip",
///                     "convention", "keypoint_threshold"},
///   "classifier":    {"t_hourglass_bh", "t_shape_diff", "t_bw_drop", "t_hw_drop",
///                     "t_spoon_hb", "t_spoon_hw", "width_factor"}
/// }
inline PipelineConfig parse_pipeline_config(const nlohmann::json& j) {
    PipelineConfig cfg;
    try {
        if (j.contains("silhouette")) detail::read_if(j["silhouette"], "smooth", cfg.silhouette.smooth);
        if (j.contains("anthropometry")) {
            const auto& a = j["anthropometry"];
            auto& c = cfg.anthro;
            detail::read_if(a, "bust_fraction", c.bust_fraction);
            detail::read_if(a, "waist_fraction", c.waist_fraction);
            detail::read_if(a, "waist_search_halfwindow", c.waist_search_halfwindow);
            detail::read_if(a, "hip_search_window_up", c.hip_search_window_up);
            detail::read_if(a, "hip_search_window_down", c.hip_search_window_down);
            detail::read_if(a, "aspect_bust", c.aspect_bust);
            detail::read_if(a, "aspect_waist", c.aspect_waist);
            detail::read_if(a, "aspect_hip", c.aspect_hip);
            detail::read_if(a, "keypoint_threshold", c.keypoint_threshold);
            if (a.contains("convention")) {
                auto conv = parse_convention(a["convention"].get<std::string>());
                if (!conv) throw Error(ErrorKind::InvalidConfig, "unknown convention");
                c.convention = *conv;
            }
        }
        if (j.contains("classifier")) {
            const auto& k = j["classifier"];
            auto& c = cfg.classifier;
            detail::read_if(k, "t_hourglass_bh", c.t_hourglass_bh);
            detail::read_if(k, "t_shape_diff", c.t_shape_diff);
            detail::read_if(k, "t_bw_drop", c.t_bw_drop);
            detail::read_if(k, "t_hw_drop", c.t_hw_drop);
            detail::read_if(k, "t_spoon_hb", c.t_spoon_hb);
            detail::read_if(k, "t_spoon_hw", c.t_spoon_hw);
            detail::read_if(k, "width_factor", c.width_factor);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, e.what());
    }
    cfg.validate();
    return cfg;
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open config " + path.string());
    try {
        return parse_pipeline_config(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
    }
}

inline ojson to_json(const Measurements& m) {
    return {{"bust", m.bust}, {"waist", m.waist}, {"hip", m.hip}, {"convention", to_string(m.convention)}};
}

inline ojson to_json(const RowSpan& s) {
    return {{"row", s.row}, {"left", s.left}, {"right", s.right}, {"width_px", s.width_px()}};
}

inline ojson to_json(const RuleTrace& t) {
    ojson steps = ojson::array();
    for (const auto& s : t.steps) {
        ojson cmp = ojson::array();
        for (const auto& c : s.comparisons) {
            cmp.push_back({{"quantity", c.quantity}, {"value", c.value}, {"op", c.op}, {"threshold", c.threshold},
                           {"holds", c.holds}});
        }
        steps.push_back({{"rule", s.rule}, {"matched", s.matched}, {"comparisons", std::move(cmp)}});
    }
    return {{"steps", std::move(steps)}, {"shape", to_string(t.shape)}};
}

/// Describes which models produced a result.
struct BackendInfo {
    std::string kind; ///< "onnx" or "replay"
    std::string segmentation_sha256;
    std::string keypoints_sha256;
};

inline ojson classify_output_json(const PipelineResult& r, const BackendInfo& backend) {
    ojson kp = ojson::array();
    for (std::size_t i = 0; i < kNumKeypoints; ++i) {
        const auto& p = r.keypoints.points[i];
        kp.push_back({{"name", kJointNames[i]}, {"x", p.x}, {"y", p.y}, {"confidence", p.confidence}});
    }
    ojson models = {{"backend", backend.kind}};
    if (backend.kind == "onnx") {
        models["segmentation_sha256"] = backend.segmentation_sha256;
        models["keypoints_sha256"] = backend.keypoints_sha256;
    }
    return {{"shape", to_string(r.shape)},
            {"measurements_cm", to_json(r.measurements)},
            {"widths_cm", to_json(r.widths)},
            {"lines", {{"bust", to_json(r.lines.bust)}, {"waist", to_json(r.lines.waist)}, {"hip", to_json(r.lines.hip)}}},
            {"scale_cm_per_px", r.scale.scale},
            {"mask_height_px", r.mask_height_px},
            {"keypoints", std::move(kp)},
            {"rule_trace", to_json(r.trace)},
            {"models", std::move(models)},
            {"tool_version", kVersion}};
}

inline ojson error_json(std::string_view kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}, {"tool_version", kVersion}};
}

inline ojson to_json(const ErrorStats& s) { return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}}; }

/// Report JSON. Record image paths are written relative to `base` when given.
inline ojson report_json(const EvalReport& r, const std::filesystem::path& base = {}) {
    ojson confusion = ojson::array();
    for (const auto& row : r.confusion) confusion.push_back(row);
    ojson per_class = ojson::object();
    ojson distribution = ojson::object();
    ojson unanswered = ojson::object();
    for (auto s : kAllShapes) {
        const auto& pc = r.per_class[index_of(s)];
        per_class[std::string(to_string(s))] = {{"support", pc.support}, {"precision", pc.precision}, {"recall", pc.recall}};
        distribution[std::string(to_string(s))] = r.class_distribution[index_of(s)];
        unanswered[std::string(to_string(s))] = r.unanswered[index_of(s)];
    }
    ojson labels = ojson::array();
    for (auto s : kAllShapes) labels.push_back(to_string(s));

    auto errors = [](const std::array<ErrorStats, 3>& e) {
        return ojson{{"bust", to_json(e[0])}, {"waist", to_json(e[1])}, {"hip", to_json(e[2])}};
    };
    ojson per_sex = ojson::object();
    for (const auto& [sex, g] : r.per_sex) {
        per_sex[sex] = {{"n_total", g.n_total}, {"n_correct", g.n_correct}, {"accuracy_pct", g.accuracy_pct}};
    }
    ojson fit = nullptr;
    if (r.convention_fit) {
        fit = {{"n", r.convention_fit->n},
               {"mae_frontal_width", r.convention_fit->mae_frontal_width},
               {"mae_est_circumference", r.convention_fit->mae_est_circumference},
               {"better", to_string(r.convention_fit->better)}};
    }
    ojson records = ojson::array();
    for (const auto& o : r.records) {
        auto image = base.empty() ? o.image : o.image.lexically_relative(base);
        ojson rec = {{"image", image.generic_string()},
                     {"truth", o.truth ? ojson(to_string(*o.truth)) : ojson(nullptr)}};
        if (o.prediction) {
            rec["predicted"] = to_string(o.prediction->shape);
            rec["measurements_cm"] = to_json(o.prediction->measurements);
        } else {
            rec["predicted"] = nullptr;
            rec["error"] = {{"kind", o.error_kind}, {"message", o.error_message}};
        }
        records.push_back(std::move(rec));
    }
    return {{"n_records", r.n_records},
            {"n_total", r.n_total},
            {"n_correct", r.n_correct},
            {"n_failures", r.n_failures},
            {"accuracy_pct", r.accuracy_pct},
            {"labels", std::move(labels)},
            {"confusion", std::move(confusion)},
            {"unanswered", std::move(unanswered)},
            {"per_class", std::move(per_class)},
            {"class_distribution", std::move(distribution)},
            {"per_sex", std::move(per_sex)},
            {"measurement_error_cm", {{"correct", errors(r.errors_correct)}, {"incorrect", errors(r.errors_incorrect)}}},
            {"convention_fit", std::move(fit)},
            {"metadata",
             {{"std_kind", to_string(r.std_kind)},
              {"failures_count_as_incorrect", r.failures_count_as_incorrect},
              {"tool_version", kVersion}}},
            {"records", std::move(records)}};
}

} // namespace bodyshape
