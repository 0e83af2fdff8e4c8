#pragma once

#include <stdexcept>
#include <string>

namespace morphcloud {

// Error codes are grouped by how the CLI maps them to exit codes:
// usage/input problems -> exit 2, numerical/pipeline failures -> exit 3.
enum class Errc {
    // usage / input
    MissingFile,
    MalformedPly,
    MissingColor,
    EmptyCloud,
    WrongLandmarkCount,
    OutOfBounds,
    MalformedCsv,
    DimensionMismatch,
    CountMismatch,
    UnpairedAttempts,
    LeakedSplit,
    InvalidArgument,
    IoError,
    SingleClass,
    // numerical / pipeline
    ZeroRadius,
    CollinearPoints,
    DegenerateTriangle,
    MeshMismatch,
    MaskCoversImage,
    ImageTooSmall,
    TooFewMatches,
    SingularSystem,
    EmptyMorph,
    EmptyResult,
    NumericFailure,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::MissingFile: return "MissingFile";
        case Errc::MalformedPly: return "MalformedPly";
        case Errc::MissingColor: return "MissingColor";
        case Errc::EmptyCloud: return "EmptyCloud";
        case Errc::WrongLandmarkCount: return "WrongLandmarkCount";
        case Errc::OutOfBounds: return "OutOfBounds";
        case Errc::MalformedCsv: return "MalformedCsv";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::CountMismatch: return "CountMismatch";
        case Errc::UnpairedAttempts: return "UnpairedAttempts";
        case Errc::LeakedSplit: return "LeakedSplit";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::IoError: return "IoError";
        case Errc::ZeroRadius: return "ZeroRadius";
        case Errc::CollinearPoints: return "CollinearPoints";
        case Errc::DegenerateTriangle: return "DegenerateTriangle";
        case Errc::MeshMismatch: return "MeshMismatch";
        case Errc::MaskCoversImage: return "MaskCoversImage";
        case Errc::ImageTooSmall: return "ImageTooSmall";
        case Errc::TooFewMatches: return "TooFewMatches";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::EmptyMorph: return "EmptyMorph";
        case Errc::EmptyResult: return "EmptyResult";
        case Errc::SingleClass: return "SingleClass";
        case Errc::NumericFailure: return "NumericFailure";
    }
    return "UnknownError";
}

inline bool errc_is_usage(Errc c) {
    switch (c) {
        case Errc::MissingFile:
        case Errc::MalformedPly:
        case Errc::MissingColor:
        case Errc::EmptyCloud:
        case Errc::WrongLandmarkCount:
        case Errc::OutOfBounds:
        case Errc::MalformedCsv:
        case Errc::DimensionMismatch:
        case Errc::CountMismatch:
        case Errc::UnpairedAttempts:
        case Errc::LeakedSplit:
        case Errc::InvalidArgument:
        case Errc::IoError:
        case Errc::SingleClass:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }
    int exit_code() const { return errc_is_usage(code_) ? 2 : 3; }

private:
    Errc code_;
};

} // namespace morphcloud
