#pragma once

#include <stdexcept>
#include <string>

namespace ucvf {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- ingestion ---
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line, int field)
        : Error(what), line_number(line), field(field) {}
    std::size_t line_number;
    int field;  // column index, -1 when the error spans the whole line
};
struct MalformedLineError : ParseError {
    using ParseError::ParseError;
};
struct InvalidCoordinateError : ParseError {
    using ParseError::ParseError;
};
struct InvalidDateError : ParseError {
    using ParseError::ParseError;
};
struct IoError : Error {
    using Error::Error;
};
struct HierarchyError : Error {
    using Error::Error;
};
struct NoDataError : Error {
    using Error::Error;
};

// --- entropy / influence ---
struct EmptySampleError : Error {
    using Error::Error;
};
struct ZeroEntropyError : Error {
    using Error::Error;
};
struct EmptyDatasetError : Error {
    using Error::Error;
};

// --- features / applicability ---
struct MissingHomeError : Error {
    using Error::Error;
};
struct MissingRecordError : Error {
    using Error::Error;
};

// --- model ---
struct InvalidConfigError : Error {
    using Error::Error;
};
struct ShapeMismatchError : Error {
    using Error::Error;
};
struct EmptyBatchError : Error {
    using Error::Error;
};
struct DivergenceError : Error {
    using Error::Error;
};
struct BadKError : Error {
    using Error::Error;
};

// --- evaluation / synth ---
struct LengthMismatchError : Error {
    using Error::Error;
};
struct InvalidSpecError : Error {
    using Error::Error;
};

// --- pipeline / cli ---
struct ConfigError : Error {
    using Error::Error;
};
struct MissingArtifactError : Error {
    using Error::Error;
};

}  // namespace ucvf
