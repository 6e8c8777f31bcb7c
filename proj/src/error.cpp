#include "starstar/error.hpp"

namespace starstar {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingRef: return "DanglingRef";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyPerspective: return "EmptyPerspective";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Timeout: return "Timeout";
    }
    return "Unknown";
}

std::string SourceLocation::str() const {
    std::string s = "line " + std::to_string(line);
    if (column != 0) {
        s += ", column " + std::to_string(column);
    }
    return s;
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::optional<SourceLocation>& where) {
    std::string s(to_string(code));
    s += ": ";
    s += message;
    if (where) {
        s += " (" + where->str() + ")";
    }
    return s;
}

} // namespace

Error::Error(ErrorCode code, std::string message, std::optional<SourceLocation> where)
    : std::runtime_error(compose(code, message, where)),
      code_(code),
      detail_(std::move(message)),
      where_(where) {}

} // namespace starstar
