#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bodyshape {

enum class ErrorKind {
    UnreadableFile,
    UnsupportedFormat,
    ImageTooSmall,
    HeightOutOfRange,
    MalformedManifest,
    InvalidArgument,
    InvalidConfig,
    BackendFailure,
    NoPersonDetected,
    LowConfidencePose,
    EmptyMask,
    EmptyRow,
    UpsideDown,
    LineOutsideMask,
    LinesOutOfOrder,
    NonPositiveMeasurement,
    InfeasibleParams,
    EmptyDataset,
    NoMeasurementGroundTruth,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::UnreadableFile: return "UnreadableFile";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::HeightOutOfRange: return "HeightOutOfRange";
    case ErrorKind::MalformedManifest: return "MalformedManifest";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::BackendFailure: return "BackendFailure";
    case ErrorKind::NoPersonDetected: return "NoPersonDetected";
    case ErrorKind::LowConfidencePose: return "LowConfidencePose";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::EmptyRow: return "EmptyRow";
    case ErrorKind::UpsideDown: return "UpsideDown";
    case ErrorKind::LineOutsideMask: return "LineOutsideMask";
    case ErrorKind::LinesOutOfOrder: return "LinesOutOfOrder";
    case ErrorKind::NonPositiveMeasurement: return "NonPositiveMeasurement";
    case ErrorKind::InfeasibleParams: return "InfeasibleParams";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::NoMeasurementGroundTruth: return "NoMeasurementGroundTruth";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI, the evaluation harness) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace bodyshape
