#pragma once

#include <bodyshape/anthropometry.hpp>
#include <bodyshape/body_shape.hpp>
#include <bodyshape/error.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace bodyshape {

/// Thresholds in centimetres, expressed for circumference measurements.
/// Frontal-width inputs are compared against thresholds scaled by
/// `width_factor`.
struct ClassifierConfig {
    double t_hourglass_bh = 2.54;
    double t_shape_diff = 9.14;
    double t_bw_drop = 22.86;
    double t_hw_drop = 25.40;
    double t_spoon_hb = 5.08;
    double t_spoon_hw = 17.78;
    double width_factor = 0.40;

    void validate() const {
        for (double t : {t_hourglass_bh, t_shape_diff, t_bw_drop, t_hw_drop, t_spoon_hb, t_spoon_hw, width_factor}) {
            if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidConfig, "thresholds must be positive");
        }
        if (!(t_spoon_hw < t_hw_drop)) throw Error(ErrorKind::InvalidConfig, "t_spoon_hw must be below t_hw_drop");
        if (!(t_spoon_hb < t_shape_diff)) {
            throw Error(ErrorKind::InvalidConfig, "t_spoon_hb must be below t_shape_diff");
        }
    }

    /// Thresholds actually compared for measurements in `convention`.
    ClassifierConfig effective(Convention convention) const {
        if (convention == Convention::EstCircumference) return *this;
        ClassifierConfig c = *this;
        for (double* t : {&c.t_hourglass_bh, &c.t_shape_diff, &c.t_bw_drop, &c.t_hw_drop, &c.t_spoon_hb,
                          &c.t_spoon_hw}) {
            *t *= width_factor;
        }
        return c;
    }
};

/// One threshold test inside a rule, e.g. `hip-waist >= 17.78`.
struct Comparison {
    std::string quantity;
    double value = 0.0;
    std::string op;
    double threshold = 0.0;
    bool holds = false;
};

struct RuleStep {
    std::string rule;
    bool matched = false;
    std::vector<Comparison> comparisons;
};

struct RuleTrace {
    std::vector<RuleStep> steps;
    BodyShape shape = BodyShape::Rectangle;
};

namespace detail {

inline void check_positive(const Measurements& m) {
    for (double v : {m.bust, m.waist, m.hip}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::NonPositiveMeasurement, "bust, waist and hip must be positive");
        }
    }
}

inline Comparison compare(std::string quantity, double value, std::string op, double threshold) {
    bool holds = op == "<=" ? value <= threshold
               : op == "<"  ? value < threshold
               : op == ">=" ? value >= threshold
                            : value > threshold;
    return {std::move(quantity), value, std::move(op), threshold, holds};
}

} // namespace detail

/// Ordered rules, first match wins:
///   Hourglass, Spoon, Triangle, InvertedTriangle, then Rectangle.
/// Every rule depends only on pairwise differences of the measurements.
inline BodyShape classify(const Measurements& m, const ClassifierConfig& cfg = {}) {
    detail::check_positive(m);
    const auto t = cfg.effective(m.convention);
    const double bh = m.bust - m.hip, hb = m.hip - m.bust;
    const double bw = m.bust - m.waist, hw = m.hip - m.waist;

    if (bh <= t.t_hourglass_bh && hb < t.t_shape_diff && (bw >= t.t_bw_drop || hw >= t.t_hw_drop))
        return BodyShape::Hourglass;
    if (hb > t.t_spoon_hb && hw >= t.t_spoon_hw) return BodyShape::Spoon;
    if (hb >= t.t_shape_diff && hw < t.t_bw_drop) return BodyShape::Triangle;
    if (bh >= t.t_shape_diff && bw < t.t_bw_drop) return BodyShape::InvertedTriangle;
    return BodyShape::Rectangle;
}

/// Same walk as classify, recording every rule evaluated up to the first
/// match. The Rectangle fallback appears as a final always-matching step.
inline RuleTrace rule_trace(const Measurements& m, const ClassifierConfig& cfg = {}) {
    detail::check_positive(m);
    const auto t = cfg.effective(m.convention);
    const double bh = m.bust - m.hip, hb = m.hip - m.bust;
    const double bw = m.bust - m.waist, hw = m.hip - m.waist;
    using detail::compare;

    RuleTrace trace;
    auto step = [&](BodyShape shape, std::vector<Comparison> cmp, bool matched) {
        trace.steps.push_back({std::string(to_string(shape)), matched, std::move(cmp)});
        if (matched) trace.shape = shape;
        return matched;
    };

    {
        auto c = std::vector{compare("bust-hip", bh, "<=", t.t_hourglass_bh),
                             compare("hip-bust", hb, "<", t.t_shape_diff),
                             compare("bust-waist", bw, ">=", t.t_bw_drop),
                             compare("hip-waist", hw, ">=", t.t_hw_drop)};
        bool ok = c[0].holds && c[1].holds && (c[2].holds || c[3].holds);
        if (step(BodyShape::Hourglass, std::move(c), ok)) return trace;
    }
    {
        auto c = std::vector{compare("hip-bust", hb, ">", t.t_spoon_hb), compare("hip-waist", hw, ">=", t.t_spoon_hw)};
        bool ok = c[0].holds && c[1].holds;
        if (step(BodyShape::Spoon, std::move(c), ok)) return trace;
    }
    {
        auto c = std::vector{compare("hip-bust", hb, ">=", t.t_shape_diff), compare("hip-waist", hw, "<", t.t_bw_drop)};
        bool ok = c[0].holds && c[1].holds;
        if (step(BodyShape::Triangle, std::move(c), ok)) return trace;
    }
    {
        auto c = std::vector{compare("bust-hip", bh, ">=", t.t_shape_diff), compare("bust-waist", bw, "<", t.t_bw_drop)};
        bool ok = c[0].holds && c[1].holds;
        if (step(BodyShape::InvertedTriangle, std::move(c), ok)) return trace;
    }
    step(BodyShape::Rectangle, {}, true);
    return trace;
}

} // namespace bodyshape
