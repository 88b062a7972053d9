#pragma once

#include <stdexcept>
#include <string>

namespace evonf {

/* Base class for everything this library throws. */
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/* fuzzy_core */
struct UnsupportedFisKind : Error {
    explicit UnsupportedFisKind(const std::string& msg) : Error(msg) {}
};
struct MalformedRule : Error {
    explicit MalformedRule(const std::string& msg) : Error(msg) {}
};
struct EmptyDataset : Error {
    explicit EmptyDataset(const std::string& msg) : Error(msg) {}
};

/* rulegen */
struct InvalidCount : Error {
    explicit InvalidCount(const std::string& msg) : Error(msg) {}
};

/* genome */
struct AngleOutOfRange : Error {
    explicit AngleOutOfRange(const std::string& msg) : Error(msg) {}
};
struct NoActiveRules : Error {
    explicit NoActiveRules(const std::string& msg) : Error(msg) {}
};
struct NotRepresentable : Error {
    explicit NotRepresentable(const std::string& msg) : Error(msg) {}
};

/* evolution */
struct SpecMismatch : Error {
    explicit SpecMismatch(const std::string& msg) : Error(msg) {}
};
struct EvolveError : Error {
    explicit EvolveError(const std::string& msg) : Error(msg) {}
};

/* gradient */
struct NonDifferentiablePoint : Error {
    explicit NonDifferentiablePoint(const std::string& msg) : Error(msg) {}
};
struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& msg) : Error(msg) {}
};

/* datasets */
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};
struct MissingColumn : Error {
    explicit MissingColumn(const std::string& msg) : Error(msg) {}
};
struct InsufficientLength : Error {
    explicit InsufficientLength(const std::string& msg) : Error(msg) {}
};
struct ConstantColumn : Error {
    explicit ConstantColumn(const std::string& msg) : Error(msg) {}
};
struct DegenerateSplit : Error {
    explicit DegenerateSplit(const std::string& msg) : Error(msg) {}
};

/* generic argument validation */
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

} // namespace evonf
