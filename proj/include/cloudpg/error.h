#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloudpg {

enum class ErrorCode {
    Io,
    Schema,
    UnresolvedReference,
    InheritanceCycle,
    DuplicateClass,
    DuplicateMapping,
    UnknownClass,
    UnknownMapping,
    DisallowedProperty,
    DanglingEndpoint,
    UnregisteredEdgeType,
    DuplicateFunction,
    DuplicateResource,
    AmbiguousMatch,
    GraphFrozen,
    Syntax,
    UnboundVariable,
};

const char* to_string(ErrorCode code);

// All analysis errors carry a code and the identifier they are about, so
// callers can report "which class / resource / ref" without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& message);

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace cloudpg
