#include "foilforge/error.hpp"

namespace foilforge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::FileIo: return "FileIo";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::NonMonotonicSurface: return "NonMonotonicSurface";
    case ErrorCode::InvalidContour: return "InvalidContour";
    case ErrorCode::InvalidAirfoil: return "InvalidAirfoil";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NumericalDivergence: return "NumericalDivergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllSamplesFailed: return "AllSamplesFailed";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::EmptyTrainSplit: return "EmptyTrainSplit";
    case ErrorCode::EmptyTestSplit: return "EmptyTestSplit";
    case ErrorCode::ConstantTruth: return "ConstantTruth";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) {
    switch (code) {
    case ErrorCode::SingularSystem:
    case ErrorCode::NonFiniteResult:
    case ErrorCode::PoleProximity:
    case ErrorCode::NumericalDivergence:
    case ErrorCode::AllSamplesFailed:
        return true;
    default:
        return false;
    }
}

static std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) {
        out += "(line " + std::to_string(*line) + ")";
    }
    out += ": ";
    out += message;
    return out;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

} // namespace foilforge
