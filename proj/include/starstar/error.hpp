#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace starstar {

enum class ErrorCode {
    ParseError,
    SchemaError,
    DuplicateId,
    DanglingRef,
    NotFound,
    OutOfRange,
    EmptyPerspective,
    Undefined,
    InvalidArgument,
    Timeout,
};

std::string_view to_string(ErrorCode code) noexcept;

// Position inside an input document. Line and column are 1-based; column is
// zero when only the line is known (JSONL).
struct SourceLocation {
    std::size_t line = 0;
    std::size_t column = 0;

    std::string str() const;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message,
          std::optional<SourceLocation> where = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::optional<SourceLocation>& where() const noexcept { return where_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::optional<SourceLocation> where_;
};

} // namespace starstar
