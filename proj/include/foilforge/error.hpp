#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace foilforge {

enum class ErrorCode : std::uint8_t {
    // input parsing / file formats
    MalformedLine,
    TooFewPoints,
    NonFinite,
    InsufficientPoints,
    BadMagic,
    VersionMismatch,
    TruncatedFile,
    ChecksumMismatch,
    SpecMismatch,
    FileIo,
    // geometry
    DegenerateChord,
    SelfIntersecting,
    NonMonotonicSurface,
    InvalidContour,
    InvalidAirfoil,
    // numerics
    SingularSystem,
    NonFiniteResult,
    PoleProximity,
    NumericalDivergence,
    ShapeMismatch,
    // pipeline
    InvalidArgument,
    EmptyCorpus,
    AllSamplesFailed,
    TooFewSamples,
    CaseMismatch,
    EmptyTrainSplit,
    EmptyTestSplit,
    ConstantTruth,
};

std::string_view to_string(ErrorCode code);

/// True for codes raised by solver or training arithmetic rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// 1-based source line for text-format errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace foilforge
