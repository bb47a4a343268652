#include "cloudpg/error.h"

namespace cloudpg {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "io";
        case ErrorCode::Schema: return "schema";
        case ErrorCode::UnresolvedReference: return "unresolved-reference";
        case ErrorCode::InheritanceCycle: return "inheritance-cycle";
        case ErrorCode::DuplicateClass: return "duplicate-class";
        case ErrorCode::DuplicateMapping: return "duplicate-mapping";
        case ErrorCode::UnknownClass: return "unknown-class";
        case ErrorCode::UnknownMapping: return "unknown-mapping";
        case ErrorCode::DisallowedProperty: return "disallowed-property";
        case ErrorCode::DanglingEndpoint: return "dangling-endpoint";
        case ErrorCode::UnregisteredEdgeType: return "unregistered-edge-type";
        case ErrorCode::DuplicateFunction: return "duplicate-function";
        case ErrorCode::DuplicateResource: return "duplicate-resource";
        case ErrorCode::AmbiguousMatch: return "ambiguous-match";
        case ErrorCode::GraphFrozen: return "graph-frozen";
        case ErrorCode::Syntax: return "syntax";
        case ErrorCode::UnboundVariable: return "unbound-variable";
    }
    return "unknown";
}

Error::Error(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : Error(ErrorCode::Syntax, std::to_string(offset),
            message + " at offset " + std::to_string(offset)),
      offset_(offset) {}

}  // namespace cloudpg
