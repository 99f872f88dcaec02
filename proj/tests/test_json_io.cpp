#include <bodyshape/json_io.hpp>
#include <bodyshape/synth.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace bodyshape;
using testutil::kind_of;

TEST(PipelineConfigJson, EmptyObjectGivesDefaults) {
    auto cfg = parse_pipeline_config(nlohmann::json::object());
    EXPECT_FALSE(cfg.silhouette.smooth);
    EXPECT_DOUBLE_EQ(cfg.anthro.bust_fraction, 0.31);
    EXPECT_DOUBLE_EQ(cfg.classifier.t_shape_diff, 9.14);
    EXPECT_EQ(cfg.anthro.convention, Convention::FrontalWidth);
}

TEST(PipelineConfigJson, OverridesAreApplied) {
    auto cfg = parse_pipeline_config(nlohmann::json::parse(R"({
        "silhouette": {"smooth": true},
        "anthropometry": {"waist_fraction": 0.6, "convention": "est_circumference", "keypoint_threshold": 0.5},
        "classifier": {"t_spoon_hb": 4.0, "width_factor": 0.5}
    })"));
    EXPECT_TRUE(cfg.silhouette.smooth);
    EXPECT_DOUBLE_EQ(cfg.anthro.waist_fraction, 0.6);
    EXPECT_EQ(cfg.anthro.convention, Convention::EstCircumference);
    EXPECT_DOUBLE_EQ(cfg.anthro.keypoint_threshold, 0.5);
    EXPECT_DOUBLE_EQ(cfg.classifier.t_spoon_hb, 4.0);
    EXPECT_DOUBLE_EQ(cfg.classifier.effective(Convention::FrontalWidth).t_spoon_hb, 2.0);
}

TEST(PipelineConfigJson, InvalidValuesRejected) {
    auto kind_for = [](const char* text) {
        return kind_of([&] { parse_pipeline_config(nlohmann::json::parse(text)); });
    };
    EXPECT_EQ(kind_for(R"({"anthropometry": {"bust_fraction": 0.7}})"), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_for(R"({"anthropometry": {"aspect_hip": 0.2}})"), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_for(R"({"anthropometry": {"convention": "girth"}})"), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_for(R"({"classifier": {"t_bw_drop": -1}})"), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_for(R"({"classifier": {"t_bw_drop": "wide"}})"), ErrorKind::InvalidConfig);
}

TEST(PipelineConfigJson, FileErrors) {
    testutil::TempDir dir;
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_EQ(kind_of([&] { load_pipeline_config(dir / "bad.json"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([&] { load_pipeline_config(dir / "none.json"); }), ErrorKind::UnreadableFile);
}

TEST(ClassifyJson, FieldsAndCanonicalShape) {
    auto s = synth_silhouette(SynthParams{});
    auto r = measure_and_classify(s.mask, s.keypoints, validate_height(180.0), {});
    auto doc = classify_output_json(r, {"replay", {}, {}});
    std::vector<std::string> keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"shape", "measurements_cm", "widths_cm", "lines", "scale_cm_per_px",
                                              "mask_height_px", "keypoints", "rule_trace", "models", "tool_version"}));
    EXPECT_TRUE(parse_shape(doc["shape"].get<std::string>()).has_value());
    EXPECT_EQ(doc["keypoints"].size(), kNumKeypoints);
    EXPECT_EQ(doc["keypoints"][11]["name"], "left_hip");
    EXPECT_EQ(doc["rule_trace"]["shape"], doc["shape"]);
    EXPECT_EQ(doc["lines"]["bust"]["row"], s.bust_row);
}

TEST(ErrorJson, Layout) {
    auto doc = error_json("NoPersonDetected", "empty");
    EXPECT_EQ(doc["error"]["kind"], "NoPersonDetected");
    EXPECT_EQ(doc["tool_version"], kVersion);
}
