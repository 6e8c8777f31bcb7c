#pragma once
// Reading and writing event data files.
//
// XOC subset:
//   <log>
//     <events>
//       <event id="e1" activity="A" timestamp="100">      (integer or ISO-8601)
//         <objects><object ref="o1"/></objects>
//         <attributes><string key="k" value="v"/></attributes>   (optional;
//             also <int>, <float>, <boolean>)
//       </event>
//     </events>
//     <objects><object id="o1" class="order"/></objects>
//   </log>
// Unknown elements and attributes are skipped with a warning.
//
// JSONL: one record per line,
//   {"kind":"object","id":"o1","class":"order"}
//   {"kind":"event","id":"e1","activity":"A","timestamp":100,"objects":["o1"],"attrs":{}}
// Object and event records may appear in any order.

#include "starstar/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace starstar {

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const noexcept { return errors.empty(); }
};

// Errors: structural_errors(). Warnings: objects related to no event, events
// related to no object, repeated (event, object) pairs.
ValidationReport validate(const LogData& data);
ValidationReport validate(const DbEventLog& log);

// Syntax and schema checks only; throws ParseError / SchemaError. Warnings
// about skipped content are appended to `warnings` when given.
LogData read_xoc(std::string_view document, std::vector<Issue>* warnings = nullptr);
LogData read_jsonl(std::string_view stream, std::vector<Issue>* warnings = nullptr);

// Read + validate. Throws the first validation error (DuplicateId,
// DanglingRef, SchemaError). `report` receives every warning.
DbEventLog parse_xoc(std::string_view document, ValidationReport* report = nullptr);
DbEventLog parse_jsonl(std::string_view stream, ValidationReport* report = nullptr);

std::string write_xoc(const DbEventLog& log);
std::string write_jsonl(const DbEventLog& log);

enum class InputFormat { Xoc, Jsonl };

std::optional<InputFormat> format_from_name(std::string_view name);
std::optional<InputFormat> format_from_extension(const std::filesystem::path& path);
// Leading '<' means XOC, anything else JSONL.
InputFormat sniff_format(std::string_view content);

DbEventLog parse_log(std::string_view content, InputFormat format,
                     ValidationReport* report = nullptr);

std::string read_file(const std::filesystem::path& path);

} // namespace starstar
