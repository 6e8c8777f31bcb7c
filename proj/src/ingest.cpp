#include "starstar/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace starstar {

ValidationReport validate(const LogData& data) {
    ValidationReport report;
    report.errors = structural_errors(data);

    std::unordered_set<EventId> events_with_objects;
    std::unordered_set<ObjectId> objects_with_events;
    std::set<EventObjectPair> seen;
    for (const auto& pair : data.eo) {
        events_with_objects.insert(pair.event);
        objects_with_events.insert(pair.object);
        if (!seen.insert(pair).second) {
            report.warnings.push_back({"DuplicateRef",
                                       "event '" + pair.event.str() + "' references object '" +
                                           pair.object.str() + "' more than once",
                                       "event " + pair.event.str()});
        }
    }
    for (const auto& o : data.objects) {
        if (!o.id.empty() && !objects_with_events.contains(o.id)) {
            report.warnings.push_back({"EventlessObject",
                                       "object '" + o.id.str() + "' is related to no event",
                                       "object " + o.id.str()});
        }
    }
    for (const auto& e : data.events) {
        if (!e.id.empty() && !events_with_objects.contains(e.id)) {
            report.warnings.push_back({"ObjectlessEvent",
                                       "event '" + e.id.str() + "' is related to no object",
                                       "event " + e.id.str()});
        }
    }
    return report;
}

ValidationReport validate(const DbEventLog& log) {
    return validate(log.records());
}

std::optional<InputFormat> format_from_name(std::string_view name) {
    if (name == "xoc" || name == "xml") {
        return InputFormat::Xoc;
    }
    if (name == "jsonl" || name == "ndjson") {
        return InputFormat::Jsonl;
    }
    return std::nullopt;
}

std::optional<InputFormat> format_from_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext.empty()) {
        return std::nullopt;
    }
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return format_from_name(std::string_view(ext).substr(1));
}

InputFormat sniff_format(std::string_view content) {
    auto first = content.find_first_not_of(" \t\r\n");
    // UTF-8 byte order mark
    if (content.substr(0, 3) == "\xEF\xBB\xBF") {
        first = content.find_first_not_of(" \t\r\n", 3);
    }
    if (first != std::string_view::npos && content[first] == '<') {
        return InputFormat::Xoc;
    }
    return InputFormat::Jsonl;
}

DbEventLog parse_log(std::string_view content, InputFormat format, ValidationReport* report) {
    return format == InputFormat::Xoc ? parse_xoc(content, report)
                                      : parse_jsonl(content, report);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace starstar
