#include <bodyshape/evaluation.hpp>
#include <bodyshape/json_io.hpp>
#include <bodyshape/pipeline.hpp>
#include <bodyshape/synth.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace bodyshape;
using testutil::kind_of;

namespace {

SubjectRecord record(const std::string& name, std::optional<BodyShape> truth,
                     std::optional<MeasurementTruth> m = std::nullopt, std::optional<Sex> sex = std::nullopt) {
    return {name, validate_height(170.0), truth, m, sex};
}

Prediction predict_as(BodyShape s, double bust = 90.0, double waist = 70.0, double hip = 95.0) {
    return {s, {bust, waist, hip, Convention::FrontalWidth}, std::nullopt};
}

RecordOutcome outcome(const SubjectRecord& r, std::optional<Prediction> p) {
    RecordOutcome o{r.image_path, r.true_shape, r.sex, p, {}, {}};
    if (!p) {
        o.error_kind = "NoPersonDetected";
        o.error_message = "none";
    }
    return o;
}

BodyShape other_than(BodyShape s) { return s == BodyShape::Rectangle ? BodyShape::Spoon : BodyShape::Rectangle; }

} // namespace

TEST(Synth, HourglassWidthsRecoveredByPipeline) {
    SynthParams p;
    p.height_cm = 180.0;
    p.stature_px = 900;  // 0.2 cm/px
    p.bust_width = 300;
    p.waist_width = 200;
    p.hip_width = 310;
    p.shoulder_width = 320;
    auto s = synth_silhouette(p);
    EXPECT_EQ(s.shape, BodyShape::Hourglass);
    EXPECT_DOUBLE_EQ(s.scale.scale, 0.2);

    auto r = measure_and_classify(s.mask, s.keypoints, validate_height(p.height_cm), {});
    EXPECT_NEAR(r.lines.bust.width_px(), 300, 2);
    EXPECT_NEAR(r.lines.waist.width_px(), 200, 2);
    EXPECT_NEAR(r.lines.hip.width_px(), 310, 2);
    EXPECT_NEAR(r.widths.bust, 60.0, 0.4);
    EXPECT_EQ(r.shape, BodyShape::Hourglass);
}

TEST(Synth, EqualWidthsAreRectangleEndToEnd) {
    SynthParams p;
    p.bust_width = p.waist_width = p.hip_width = 180;
    auto s = synth_silhouette(p);
    EXPECT_EQ(s.shape, BodyShape::Rectangle);
    OracleBackend backend(mask_to_labelmap(s.mask), s.keypoints);
    Pipeline pipeline(backend, {});
    std::mt19937_64 rng(1);
    EXPECT_EQ(pipeline.run(render_subject(s.mask, rng), validate_height(p.height_cm)).shape, BodyShape::Rectangle);
}

TEST(Synth, ArmTouchingTorsoIsInfeasible) {
    SynthParams p;
    p.arm_gap = 0;
    EXPECT_EQ(kind_of([&] { synth_silhouette(p); }), ErrorKind::InfeasibleParams);
    p = {};
    p.waist_width = 200;  // wider than bust
    EXPECT_EQ(kind_of([&] { synth_silhouette(p); }), ErrorKind::InfeasibleParams);
    p = {};
    p.waist_row = p.bust_row;
    EXPECT_EQ(kind_of([&] { synth_silhouette(p); }), ErrorKind::InfeasibleParams);
}

TEST(Synth, PlantedRowsWidthsAndOracleClass) {
    std::mt19937_64 rng(2024);
    for (auto shape : kAllShapes) {
        for (int i = 0; i < 4; ++i) {
            auto p = random_params(shape, rng);
            auto s = synth_silhouette(p);
            EXPECT_EQ(central_row_span(s.mask, p.bust_row).width_px(), p.bust_width);
            EXPECT_EQ(central_row_span(s.mask, p.waist_row).width_px(), p.waist_width);
            EXPECT_EQ(central_row_span(s.mask, p.hip_row).width_px(), p.hip_width);
            const auto t = oracle::from_inches(0.40);
            EXPECT_EQ(oracle::classify(s.truth.bust, s.truth.waist, s.truth.hip, t), static_cast<int>(index_of(shape)));
            EXPECT_EQ(oracle::count_components(s.mask, true, false), 1);
            EXPECT_EQ(oracle::count_holes(s.mask), 0);
        }
    }
}

TEST(Evaluate, SevenRecordsFiveCorrect) {
    std::vector<SubjectRecord> recs;
    std::map<std::string, Prediction> preds;
    for (int i = 0; i < 7; ++i) {
        const auto truth = kAllShapes[i % 5];
        recs.push_back(record("r" + std::to_string(i), truth));
        preds.emplace("r" + std::to_string(i), predict_as(i < 5 ? truth : other_than(truth)));
    }
    auto report = evaluate(recs, [&](const SubjectRecord& r) { return preds.at(r.image_path.string()); });
    EXPECT_EQ(report.n_total, 7u);
    EXPECT_EQ(report.n_correct, 5u);
    EXPECT_NEAR(report.accuracy_pct, 71.4, 0.05);
    EXPECT_DOUBLE_EQ(report.accuracy_pct, 100.0 * 5 / 7);
}

TEST(Evaluate, PerfectPredictionsGiveDiagonalMatrix) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 4);
    std::vector<SubjectRecord> recs;
    for (int i = 0; i < 60; ++i) recs.push_back(record("s" + std::to_string(i), kAllShapes[pick(rng)]));
    auto report = evaluate(recs, [](const SubjectRecord& r) { return predict_as(*r.true_shape); });
    EXPECT_DOUBLE_EQ(report.accuracy_pct, 100.0);
    std::size_t hist = 0;
    for (std::size_t t = 0; t < kNumShapes; ++t) {
        for (std::size_t p = 0; p < kNumShapes; ++p) {
            if (t != p) EXPECT_EQ(report.confusion[t][p], 0u);
        }
        hist += report.class_distribution[t];
        if (report.per_class[t].support) {
            EXPECT_DOUBLE_EQ(report.per_class[t].precision, 1.0);
            EXPECT_DOUBLE_EQ(report.per_class[t].recall, 1.0);
        }
    }
    EXPECT_EQ(hist, report.n_total);
}

TEST(Evaluate, FailuresCountAsIncorrectByDefault) {
    std::vector<SubjectRecord> recs = {record("a", BodyShape::Spoon), record("b", BodyShape::Spoon),
                                       record("c", BodyShape::Hourglass), record("d", std::nullopt)};
    auto predict = [](const SubjectRecord& r) -> Prediction {
        if (r.image_path == "b") throw Error(ErrorKind::NoPersonDetected, "blank");
        if (r.image_path == "d") throw Error(ErrorKind::UnreadableFile, "gone");
        return predict_as(r.true_shape.value_or(BodyShape::Rectangle));
    };
    auto report = evaluate(recs, predict);
    EXPECT_EQ(report.n_records, 4u);
    EXPECT_EQ(report.n_failures, 2u);
    EXPECT_EQ(report.n_total, 3u);  // the unlabeled record is outside the denominator
    EXPECT_EQ(report.n_correct, 2u);
    EXPECT_EQ(report.unanswered[index_of(BodyShape::Spoon)], 1u);
    // Row sums plus unanswered reproduce ground-truth counts.
    for (std::size_t t = 0; t < kNumShapes; ++t) {
        std::size_t row = report.unanswered[t];
        for (auto v : report.confusion[t]) row += v;
        EXPECT_EQ(row, report.per_class[t].support);
    }
    EXPECT_EQ(report.records[1].error_kind, "NoPersonDetected");

    EvalOptions lenient;
    lenient.failures_count_as_incorrect = false;
    auto excl = evaluate(recs, predict, lenient);
    EXPECT_EQ(excl.n_total, 2u);
    EXPECT_DOUBLE_EQ(excl.accuracy_pct, 100.0);
}

TEST(Evaluate, SerialAndParallelAgree) {
    std::vector<SubjectRecord> recs;
    for (int i = 0; i < 101; ++i) {
        recs.push_back(record("p" + std::to_string(i), kAllShapes[(i * 7) % 5],
                              MeasurementTruth{90.0 + i % 7, 70.0 + i % 5, 95.0 + i % 3},
                              i % 2 ? Sex::Male : Sex::Female));
    }
    auto predict = [](const SubjectRecord& r) -> Prediction {
        const int i = std::stoi(r.image_path.string().substr(1));
        if (i % 13 == 0) throw Error(ErrorKind::LowConfidencePose, "hip");
        return predict_as(kAllShapes[(i * 3) % 5], 88.0 + i % 11, 71.0, 94.0 + i % 4);
    };
    EvalOptions serial, parallel;
    parallel.threads = 4;
    const auto a = report_json(evaluate(recs, predict, serial)).dump();
    const auto b = report_json(evaluate(recs, predict, parallel)).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, report_json(evaluate(recs, predict, serial)).dump());
}

TEST(Evaluate, PerSexAccuracyAndFilter) {
    std::vector<SubjectRecord> recs = {record("m1", BodyShape::Spoon, std::nullopt, Sex::Male),
                                       record("m2", BodyShape::Spoon, std::nullopt, Sex::Male),
                                       record("f1", BodyShape::Spoon, std::nullopt, Sex::Female),
                                       record("f2", BodyShape::Spoon, std::nullopt, Sex::Female)};
    auto predict = [](const SubjectRecord& r) {
        return predict_as(r.image_path == "f2" ? BodyShape::Triangle : BodyShape::Spoon);
    };
    auto report = evaluate(recs, predict);
    EXPECT_DOUBLE_EQ(report.per_sex.at("male").accuracy_pct, 100.0);
    EXPECT_DOUBLE_EQ(report.per_sex.at("female").accuracy_pct, 50.0);
    auto males = filter_by_sex(recs, Sex::Male);
    EXPECT_EQ(males.size(), 2u);
    EXPECT_DOUBLE_EQ(evaluate(males, predict).accuracy_pct, 100.0);
}

TEST(Evaluate, EmptyDataset) {
    EXPECT_EQ(kind_of([] { evaluate({}, [](const SubjectRecord&) { return predict_as(BodyShape::Spoon); }); }),
              ErrorKind::EmptyDataset);
}

TEST(ErrorStats, PopulationAndSample) {
    auto pop = error_stats({1.0, 3.0}, StdKind::Population);
    EXPECT_DOUBLE_EQ(pop.mean, 2.0);
    EXPECT_DOUBLE_EQ(pop.std, 1.0);
    auto smp = error_stats({1.0, 3.0}, StdKind::Sample);
    EXPECT_DOUBLE_EQ(smp.std, std::sqrt(2.0));
    auto one = error_stats({4.2}, StdKind::Sample);
    EXPECT_DOUBLE_EQ(one.mean, 4.2);
    EXPECT_DOUBLE_EQ(one.std, 0.0);
}

TEST(ErrorTable, ReproducesPublishedLayout) {
    // Two records per classification outcome at mean -/+ std give exactly
    // that mean and population std.
    const double ok[3][2] = {{2.29, 1.73}, {3.95, 3.03}, {2.85, 1.72}};
    const double bad[3][2] = {{6.51, 4.69}, {5.08, 3.90}, {5.29, 4.48}};
    const MeasurementTruth truth{100.0, 80.0, 105.0};
    std::vector<SubjectRecord> recs;
    std::vector<RecordOutcome> outs;
    for (int sign : {-1, 1}) {
        for (bool correct : {true, false}) {
            const auto& e = correct ? ok : bad;
            auto r = record("x", BodyShape::Hourglass, truth);
            auto p = predict_as(correct ? BodyShape::Hourglass : BodyShape::Spoon, truth.bust + e[0][0] + sign * e[0][1],
                                truth.waist - (e[1][0] + sign * e[1][1]), truth.hip + e[2][0] + sign * e[2][1]);
            recs.push_back(r);
            outs.push_back(outcome(r, p));
        }
    }
    auto report = aggregate(outs, recs);
    const std::string table = error_table(report);
    EXPECT_EQ(table, "Measurement  Correct           Incorrect\n"
                     "Bust         2.29 ± 1.73       6.51 ± 4.69\n"
                     "Waist        3.95 ± 3.03       5.08 ± 3.90\n"
                     "Hip          2.85 ± 1.72       5.29 ± 4.48\n");
}

TEST(ErrorTable, SingleRecordAndMissingGroundTruth) {
    auto r = record("x", BodyShape::Spoon, MeasurementTruth{100, 80, 105});
    auto report = aggregate({outcome(r, predict_as(BodyShape::Spoon, 101, 80, 105))}, {r});
    EXPECT_DOUBLE_EQ(report.errors_correct[0].std, 0.0);
    EXPECT_NE(error_table(report).find("1.00 ± 0.00"), std::string::npos);
    EXPECT_NE(error_table(report).find("n/a"), std::string::npos);

    auto bare = record("y", BodyShape::Spoon);
    auto no_truth = aggregate({outcome(bare, predict_as(BodyShape::Spoon))}, {bare});
    EXPECT_EQ(kind_of([&] { error_table(no_truth); }), ErrorKind::NoMeasurementGroundTruth);
}

TEST(ConventionFit, PrefersTheConventionCloserToTruth) {
    auto r = record("x", BodyShape::Spoon, MeasurementTruth{60, 45, 62});
    Prediction p = predict_as(BodyShape::Spoon, 60, 45, 62);
    p.widths = p.measurements;
    auto report = aggregate({outcome(r, p)}, {r});
    ASSERT_TRUE(report.convention_fit);
    EXPECT_EQ(report.convention_fit->better, Convention::FrontalWidth);
    EXPECT_DOUBLE_EQ(report.convention_fit->mae_frontal_width, 0.0);
}

TEST(Robustness, CompareRunsBound) {
    auto a = predict_as(BodyShape::Spoon, 90, 70, 95);
    EXPECT_TRUE(compare_runs(a, predict_as(BodyShape::Spoon, 93, 70, 95)).passed);
    EXPECT_FALSE(compare_runs(a, predict_as(BodyShape::Spoon, 93.01, 70, 95)).passed);
    EXPECT_FALSE(compare_runs(a, predict_as(BodyShape::Hourglass, 90, 70, 95)).passed);
    EXPECT_TRUE(compare_runs(a, predict_as(BodyShape::Spoon, 94, 70, 95), 4.0).passed);
}

TEST(Robustness, SameSubjectDifferentSurroundings) {
    std::mt19937_64 rng(77);
    for (int pair = 0; pair < 10; ++pair) {
        auto p = random_params(kAllShapes[pair % 5], rng);
        auto s = synth_silhouette(p);
        const auto clean = mask_to_labelmap(s.mask);
        std::array<Prediction, 2> runs;
        for (int env = 0; env < 2; ++env) {
            OracleBackend backend(inject_background_noise(clean, rng), s.keypoints);
            Pipeline pipeline(backend, {});
            auto r = pipeline.run(render_subject(s.mask, rng), validate_height(p.height_cm));
            runs[env] = {r.shape, r.measurements, r.widths};
        }
        auto check = compare_runs(runs[0], runs[1]);
        EXPECT_TRUE(check.passed) << "pair " << pair << " delta " << check.max_delta_cm;
    }
}
