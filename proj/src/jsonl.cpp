#include "starstar/ingest.hpp"
#include "starstar/timefmt.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace starstar {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct LineContext {
    std::size_t line;
    std::vector<Issue>* warnings;

    [[noreturn]] void schema(std::string message) const {
        throw Error(ErrorCode::SchemaError, std::move(message), SourceLocation{line, 0});
    }

    void warn(std::string code, std::string message) const {
        if (warnings != nullptr) {
            warnings->push_back({std::move(code), std::move(message), SourceLocation{line, 0}.str()});
        }
    }

    std::string text(const json& record, const char* key) const {
        auto it = record.find(key);
        if (it == record.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
            schema(std::string("record needs a non-empty string '") + key + "'");
        }
        return it->get<std::string>();
    }

    void unknown_keys(const json& record, std::initializer_list<std::string_view> known) const {
        for (const auto& [key, _] : record.items()) {
            bool recognised = false;
            for (auto k : known) {
                recognised = recognised || k == key;
            }
            if (!recognised) {
                warn("UnknownField", "ignored field '" + key + "'");
            }
        }
    }
};

AttributeValue to_attribute(const LineContext& ctx, const std::string& key, const json& v) {
    switch (v.type()) {
    case json::value_t::string: return v.get<std::string>();
    case json::value_t::boolean: return v.get<bool>();
    case json::value_t::number_integer: return v.get<std::int64_t>();
    case json::value_t::number_unsigned: return static_cast<std::int64_t>(v.get<std::uint64_t>());
    case json::value_t::number_float: return v.get<double>();
    default: ctx.schema("attribute '" + key + "' must be a string, number or boolean");
    }
}

void read_event(const LineContext& ctx, const json& record, LogData& data) {
    ctx.unknown_keys(record, {"kind", "id", "activity", "timestamp", "objects", "attrs"});
    EventRecord event;
    event.id = EventId(ctx.text(record, "id"));
    event.activity = Activity(ctx.text(record, "activity"));

    auto ts = record.find("timestamp");
    if (ts == record.end()) {
        ctx.schema("event '" + event.id.str() + "' has no timestamp");
    }
    if (ts->is_number_integer()) {
        event.timestamp = ts->get<Timestamp>();
    } else if (ts->is_string()) {
        event.timestamp = parse_timestamp(ts->get<std::string>());
    }
    if (!event.timestamp) {
        ctx.schema("event '" + event.id.str() + "' has an unreadable timestamp");
    }

    if (auto objects = record.find("objects"); objects != record.end()) {
        if (!objects->is_array()) {
            ctx.schema("'objects' must be an array of object ids");
        }
        for (const auto& ref : *objects) {
            if (!ref.is_string() || ref.get_ref<const std::string&>().empty()) {
                ctx.schema("'objects' must be an array of object ids");
            }
            data.eo.push_back({event.id, ObjectId(ref.get<std::string>())});
        }
    }
    if (auto attrs = record.find("attrs"); attrs != record.end()) {
        if (!attrs->is_object()) {
            ctx.schema("'attrs' must be an object");
        }
        for (const auto& [key, value] : attrs->items()) {
            event.attributes[key] = to_attribute(ctx, key, value);
        }
    }
    data.events.push_back(std::move(event));
}

ordered_json attribute_json(const AttributeValue& v) {
    return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

} // namespace

LogData read_jsonl(std::string_view stream, std::vector<Issue>* warnings) {
    LogData data;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < stream.size()) {
        auto end = stream.find('\n', start);
        if (end == std::string_view::npos) {
            end = stream.size();
        }
        auto line = stream.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }

        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, e.what(), SourceLocation{line_no, 0});
        }
        LineContext ctx{line_no, warnings};
        if (!record.is_object()) {
            ctx.schema("record must be a JSON object");
        }
        auto kind = record.find("kind");
        if (kind == record.end() || !kind->is_string()) {
            ctx.schema("record has no 'kind'");
        }
        const auto& k = kind->get_ref<const std::string&>();
        if (k == "object") {
            ctx.unknown_keys(record, {"kind", "id", "class"});
            data.objects.push_back(
                {ObjectId(ctx.text(record, "id")), ObjectClass(ctx.text(record, "class"))});
        } else if (k == "event") {
            read_event(ctx, record, data);
        } else {
            ctx.schema("unknown record kind '" + k + "'");
        }
    }
    return data;
}

DbEventLog parse_jsonl(std::string_view stream, ValidationReport* report) {
    std::vector<Issue> warnings;
    auto data = read_jsonl(stream, &warnings);
    auto checked = validate(data);
    if (report != nullptr) {
        report->warnings.insert(report->warnings.end(), warnings.begin(), warnings.end());
        report->warnings.insert(report->warnings.end(), checked.warnings.begin(),
                                checked.warnings.end());
        report->errors = checked.errors;
    }
    return DbEventLog(std::move(data));
}

std::string write_jsonl(const DbEventLog& log) {
    std::ostringstream os;
    for (const auto& o : log.objects()) {
        ordered_json record;
        record["kind"] = "object";
        record["id"] = o.id.str();
        record["class"] = o.object_class.str();
        os << record.dump() << '\n';
    }
    for (std::size_t i = 0; i < log.events().size(); ++i) {
        const auto& e = log.events()[i];
        ordered_json record;
        record["kind"] = "event";
        record["id"] = e.id.str();
        record["activity"] = e.activity.str();
        record["timestamp"] = e.timestamp;
        auto& objects = record["objects"] = ordered_json::array();
        for (auto o : log.objects_of(i)) {
            objects.push_back(log.objects()[o].id.str());
        }
        if (!e.attributes.empty()) {
            auto& attrs = record["attrs"] = ordered_json::object();
            for (const auto& [key, value] : e.attributes) {
                attrs[key] = attribute_json(value);
            }
        }
        os << record.dump() << '\n';
    }
    return os.str();
}

} // namespace starstar
