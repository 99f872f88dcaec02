#pragma once

#include <bodyshape/anthropometry.hpp>
#include <bodyshape/body_shape.hpp>
#include <bodyshape/error.hpp>
#include <bodyshape/manifest.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace bodyshape {

/// What an end-to-end run yields for one subject.
struct Prediction {
    BodyShape shape = BodyShape::Rectangle;
    Measurements measurements;
    std::optional<Measurements> widths; ///< frontal widths, when available
};

using PredictFn = std::function<Prediction(const SubjectRecord&)>;

enum class StdKind { Population, Sample };

constexpr std::string_view to_string(StdKind k) { return k == StdKind::Population ? "population" : "sample"; }

struct EvalOptions {
    /// Pipeline errors on labelled records count as wrong answers; when false
    /// they leave the accuracy denominator instead.
    bool failures_count_as_incorrect = true;
    StdKind std_kind = StdKind::Population;
    unsigned threads = 1;
    /// Aspects used when comparing both measurement conventions to ground truth.
    AnthroConfig anthro;
};

struct RecordOutcome {
    std::filesystem::path image;
    std::optional<BodyShape> truth;
    std::optional<Sex> sex;
    std::optional<Prediction> prediction;
    std::string error_kind;
    std::string error_message;

    bool failed() const { return !prediction.has_value(); }
    bool correct() const { return prediction && truth && prediction->shape == *truth; }
};

struct ErrorStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
};

struct ClassMetrics {
    std::size_t support = 0; ///< ground-truth count, failures included
    double precision = 0.0;
    double recall = 0.0;
};

struct GroupAccuracy {
    std::size_t n_total = 0;
    std::size_t n_correct = 0;
    double accuracy_pct = 0.0;
};

/// Mean absolute error of each convention against tape ground truth.
struct ConventionFit {
    std::size_t n = 0;
    double mae_frontal_width = 0.0;
    double mae_est_circumference = 0.0;
    Convention better = Convention::FrontalWidth;
};

struct EvalReport {
    std::size_t n_records = 0;  ///< every record processed
    std::size_t n_total = 0;    ///< accuracy denominator
    std::size_t n_correct = 0;
    std::size_t n_failures = 0;
    double accuracy_pct = 0.0;
    /// Rows: ground truth, columns: prediction. Failed records are not in
    /// the matrix; they are tallied per true class in `unanswered`.
    std::array<std::array<std::size_t, kNumShapes>, kNumShapes> confusion{};
    std::array<std::size_t, kNumShapes> unanswered{};
    std::array<ClassMetrics, kNumShapes> per_class{};
    std::array<std::size_t, kNumShapes> class_distribution{};
    /// Indexed bust, waist, hip.
    std::array<ErrorStats, 3> errors_correct{};
    std::array<ErrorStats, 3> errors_incorrect{};
    std::size_t n_with_measurements = 0;
    std::map<std::string, GroupAccuracy> per_sex;
    std::optional<ConventionFit> convention_fit;
    StdKind std_kind = StdKind::Population;
    bool failures_count_as_incorrect = true;
    std::vector<RecordOutcome> records;
};

inline ErrorStats error_stats(const std::vector<double>& values, StdKind kind) {
    ErrorStats s;
    s.n = values.size();
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n == 1) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double denom = kind == StdKind::Population ? static_cast<double>(s.n) : static_cast<double>(s.n - 1);
    s.std = std::sqrt(ss / denom);
    return s;
}

namespace detail {

inline RecordOutcome run_one(const SubjectRecord& rec, const PredictFn& predict) {
    RecordOutcome o{rec.image_path, rec.true_shape, rec.sex, std::nullopt, {}, {}};
    try {
        o.prediction = predict(rec);
    } catch (const Error& e) {
        o.error_kind = std::string(to_string(e.kind()));
        o.error_message = e.what();
    } catch (const std::exception& e) {
        o.error_kind = "InternalError";
        o.error_message = e.what();
    }
    return o;
}

} // namespace detail

/// Aggregates already-computed outcomes. Order of `outcomes` is preserved in
/// the report; metrics do not depend on it.
inline EvalReport aggregate(std::vector<RecordOutcome> outcomes, const std::vector<SubjectRecord>& records,
                            const EvalOptions& opt = {}) {
    EvalReport r;
    r.std_kind = opt.std_kind;
    r.failures_count_as_incorrect = opt.failures_count_as_incorrect;
    r.n_records = outcomes.size();

    std::array<std::vector<double>, 3> err_ok, err_bad;
    double fit_frontal = 0.0, fit_circ = 0.0;
    std::size_t fit_n = 0;

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const auto& rec = records[i];
        if (o.failed()) ++r.n_failures;
        if (!o.truth) continue;

        const auto t = index_of(*o.truth);
        if (o.failed()) {
            ++r.unanswered[t];
            if (!opt.failures_count_as_incorrect) continue;
        } else {
            ++r.confusion[t][index_of(o.prediction->shape)];
        }
        ++r.class_distribution[t];
        ++r.n_total;
        if (o.correct()) ++r.n_correct;
        if (o.sex) {
            auto& g = r.per_sex[std::string(to_string(*o.sex))];
            ++g.n_total;
            if (o.correct()) ++g.n_correct;
        }

        if (rec.truth && o.prediction) {
            ++r.n_with_measurements;
            const auto& m = o.prediction->measurements;
            const double diffs[3] = {std::abs(m.bust - rec.truth->bust), std::abs(m.waist - rec.truth->waist),
                                     std::abs(m.hip - rec.truth->hip)};
            for (int k = 0; k < 3; ++k) (o.correct() ? err_ok : err_bad)[k].push_back(diffs[k]);
            if (o.prediction->widths) {
                const auto& w = *o.prediction->widths;
                const auto c = convert(w, Convention::EstCircumference, opt.anthro);
                fit_frontal += std::abs(w.bust - rec.truth->bust) + std::abs(w.waist - rec.truth->waist) +
                               std::abs(w.hip - rec.truth->hip);
                fit_circ += std::abs(c.bust - rec.truth->bust) + std::abs(c.waist - rec.truth->waist) +
                            std::abs(c.hip - rec.truth->hip);
                fit_n += 3;
            }
        }
    }

    r.accuracy_pct = r.n_total ? 100.0 * static_cast<double>(r.n_correct) / static_cast<double>(r.n_total) : 0.0;
    for (auto& [_, g] : r.per_sex) {
        g.accuracy_pct = g.n_total ? 100.0 * static_cast<double>(g.n_correct) / static_cast<double>(g.n_total) : 0.0;
    }
    for (std::size_t c = 0; c < kNumShapes; ++c) {
        std::size_t predicted = 0, truth = 0;
        for (std::size_t k = 0; k < kNumShapes; ++k) {
            predicted += r.confusion[k][c];
            truth += r.confusion[c][k];
        }
        truth += r.unanswered[c];
        auto& pc = r.per_class[c];
        pc.support = truth;
        pc.precision = predicted ? static_cast<double>(r.confusion[c][c]) / static_cast<double>(predicted) : 0.0;
        pc.recall = truth ? static_cast<double>(r.confusion[c][c]) / static_cast<double>(truth) : 0.0;
    }
    for (int k = 0; k < 3; ++k) {
        r.errors_correct[k] = error_stats(err_ok[k], opt.std_kind);
        r.errors_incorrect[k] = error_stats(err_bad[k], opt.std_kind);
    }
    if (fit_n > 0) {
        ConventionFit f;
        f.n = fit_n / 3;
        f.mae_frontal_width = fit_frontal / static_cast<double>(fit_n);
        f.mae_est_circumference = fit_circ / static_cast<double>(fit_n);
        f.better = f.mae_est_circumference < f.mae_frontal_width ? Convention::EstCircumference
                                                                : Convention::FrontalWidth;
        r.convention_fit = f;
    }
    r.records = std::move(outcomes);
    return r;
}

/// Runs `predict` on every record (optionally on several threads) and
/// aggregates accuracy, confusion, per-class, per-sex and measurement-error
/// statistics. Per-record failures are captured, never propagated.
inline EvalReport evaluate(const std::vector<SubjectRecord>& records, const PredictFn& predict,
                           const EvalOptions& opt = {}) {
    if (records.empty()) throw Error(ErrorKind::EmptyDataset, "no records to evaluate");
    std::vector<RecordOutcome> outcomes(records.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(records.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < records.size(); ++i) outcomes[i] = detail::run_one(records[i], predict);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < records.size(); i = next++)
                    outcomes[i] = detail::run_one(records[i], predict);
            });
        }
        for (auto& th : pool) th.join();
    }
    return aggregate(std::move(outcomes), records, opt);
}

inline std::vector<SubjectRecord> filter_by_sex(const std::vector<SubjectRecord>& records, Sex sex) {
    std::vector<SubjectRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const SubjectRecord& r) { return r.sex == sex; });
    return out;
}

namespace detail {

inline std::string mean_pm_std(const ErrorStats& s) {
    if (s.n == 0) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", s.mean, s.std);
    return buf;
}

inline std::string pad(std::string s, std::size_t width) {
    // Count code points so the +/- sign does not skew alignment.
    std::size_t cps = 0;
    for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
    if (cps < width) s.append(width - cps, ' ');
    return s;
}

} // namespace detail

/// Absolute measurement error (cm) as `mean ± std`, split by whether the
/// record was classified correctly.
inline std::string error_table(const EvalReport& r) {
    if (r.n_with_measurements == 0) {
        throw Error(ErrorKind::NoMeasurementGroundTruth, "no evaluated record carries measurement ground truth");
    }
    using detail::pad;
    std::ostringstream out;
    out << pad("Measurement", 13) << pad("Correct", 18) << "Incorrect\n";
    const char* names[3] = {"Bust", "Waist", "Hip"};
    for (int k = 0; k < 3; ++k) {
        out << pad(names[k], 13) << pad(detail::mean_pm_std(r.errors_correct[k]), 18)
            << detail::mean_pm_std(r.errors_incorrect[k]) << '\n';
    }
    return out.str();
}

inline std::string confusion_table(const EvalReport& r) {
    using detail::pad;
    std::ostringstream out;
    out << pad("truth \\ pred", 18);
    for (auto s : kAllShapes) out << pad(std::string(to_string(s)), 18);
    out << "failed\n";
    for (auto t : kAllShapes) {
        out << pad(std::string(to_string(t)), 18);
        for (auto p : kAllShapes) out << pad(std::to_string(r.confusion[index_of(t)][index_of(p)]), 18);
        out << r.unanswered[index_of(t)] << '\n';
    }
    return out.str();
}

/// `shape,count,percent` rows for plotting the class distribution.
inline std::string class_distribution_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "shape,count,percent\n";
    for (auto s : kAllShapes) {
        const auto n = r.class_distribution[index_of(s)];
        char pct[32];
        std::snprintf(pct, sizeof(pct), "%.2f", r.n_total ? 100.0 * static_cast<double>(n) / r.n_total : 0.0);
        out << to_string(s) << ',' << n << ',' << pct << '\n';
    }
    return out.str();
}

struct RobustnessCheck {
    bool same_shape = false;
    double max_delta_cm = 0.0;
    bool passed = false;
};

/// Two runs on the same subject in different surroundings should agree on
/// the class and stay within `bound_cm` on every measurement.
inline RobustnessCheck compare_runs(const Prediction& a, const Prediction& b, double bound_cm = 3.0) {
    RobustnessCheck c;
    c.same_shape = a.shape == b.shape;
    c.max_delta_cm = std::max({std::abs(a.measurements.bust - b.measurements.bust),
                               std::abs(a.measurements.waist - b.measurements.waist),
                               std::abs(a.measurements.hip - b.measurements.hip)});
    c.passed = c.same_shape && c.max_delta_cm <= bound_cm;
    return c;
}

} // namespace bodyshape
