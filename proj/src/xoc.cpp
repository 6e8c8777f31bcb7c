#include "starstar/ingest.hpp"
#include "starstar/timefmt.hpp"

#include <expat.h>

#include <charconv>
#include <memory>
#include <set>
#include <sstream>

namespace starstar {

namespace {

enum class Scope {
    Document,
    Log,
    Events,
    Event,
    EventObjects,
    EventAttributes,
    Objects,
    Leaf,
};

struct XocReader {
    XML_Parser parser = nullptr;
    LogData data;
    std::vector<Issue>* warnings = nullptr;

    std::vector<Scope> scopes{Scope::Document};
    std::size_t skip_depth = 0;
    bool saw_root = false;
    std::optional<Error> failure;

    SourceLocation here() const {
        return {static_cast<std::size_t>(XML_GetCurrentLineNumber(parser)),
                static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser)) + 1};
    }

    void fail(ErrorCode code, std::string message) {
        if (!failure) {
            failure.emplace(code, std::move(message), here());
        }
        XML_StopParser(parser, XML_FALSE);
    }

    void warn(std::string code, std::string message) {
        if (warnings != nullptr) {
            warnings->push_back({std::move(code), std::move(message), here().str()});
        }
    }

    // Collects the element's attributes, warning about names outside `known`.
    std::map<std::string, std::string> attributes(std::string_view element, const XML_Char** atts,
                                                  std::initializer_list<std::string_view> known) {
        std::map<std::string, std::string> out;
        for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
            std::string_view name = atts[i];
            bool recognised = false;
            for (auto k : known) {
                recognised = recognised || k == name;
            }
            if (recognised) {
                out.emplace(name, atts[i + 1]);
            } else {
                warn("UnknownAttribute", "ignored attribute '" + std::string(name) + "' on <" +
                                             std::string(element) + ">");
            }
        }
        return out;
    }

    std::optional<std::string> required(const std::map<std::string, std::string>& atts,
                                        const std::string& name, std::string_view element) {
        auto it = atts.find(name);
        if (it == atts.end() || it->second.empty()) {
            fail(ErrorCode::SchemaError,
                 "<" + std::string(element) + "> requires attribute '" + name + "'");
            return std::nullopt;
        }
        return it->second;
    }

    void skip(std::string_view element) {
        warn("UnknownElement", "ignored element <" + std::string(element) + ">");
        skip_depth = 1;
    }

    void start(std::string_view name, const XML_Char** atts) {
        if (failure) {
            return;
        }
        if (skip_depth > 0) {
            ++skip_depth;
            return;
        }
        switch (scopes.back()) {
        case Scope::Document:
            if (name != "log") {
                fail(ErrorCode::SchemaError, "root element must be <log>, found <" +
                                                 std::string(name) + ">");
                return;
            }
            saw_root = true;
            attributes(name, atts, {"xmlns"});
            scopes.push_back(Scope::Log);
            return;
        case Scope::Log:
            if (name == "events") {
                scopes.push_back(Scope::Events);
            } else if (name == "objects") {
                scopes.push_back(Scope::Objects);
            } else {
                skip(name);
            }
            return;
        case Scope::Events:
            if (name == "event") {
                start_event(name, atts);
            } else {
                skip(name);
            }
            return;
        case Scope::Event:
            if (name == "objects") {
                scopes.push_back(Scope::EventObjects);
            } else if (name == "attributes") {
                scopes.push_back(Scope::EventAttributes);
            } else {
                skip(name);
            }
            return;
        case Scope::EventObjects:
            if (name == "object") {
                auto a = attributes(name, atts, {"ref"});
                if (auto ref = required(a, "ref", name)) {
                    data.eo.push_back({data.events.back().id, ObjectId(*ref)});
                    scopes.push_back(Scope::Leaf);
                }
            } else {
                skip(name);
            }
            return;
        case Scope::EventAttributes:
            start_attribute(name, atts);
            return;
        case Scope::Objects:
            if (name == "object") {
                auto a = attributes(name, atts, {"id", "class"});
                auto id = required(a, "id", name);
                if (!id) return;
                auto cls = required(a, "class", name);
                if (!cls) return;
                data.objects.push_back({ObjectId(*id), ObjectClass(*cls)});
                scopes.push_back(Scope::Leaf);
            } else {
                skip(name);
            }
            return;
        case Scope::Leaf:
            skip(name);
            return;
        }
    }

    void start_event(std::string_view name, const XML_Char** atts) {
        auto a = attributes(name, atts, {"id", "activity", "timestamp"});
        auto id = required(a, "id", name);
        if (!id) return;
        auto activity = required(a, "activity", name);
        if (!activity) return;
        auto ts_text = required(a, "timestamp", name);
        if (!ts_text) return;
        auto ts = parse_timestamp(*ts_text);
        if (!ts) {
            fail(ErrorCode::SchemaError, "unreadable timestamp '" + *ts_text + "'");
            return;
        }
        data.events.push_back({EventId(*id), Activity(*activity), *ts, {}});
        scopes.push_back(Scope::Event);
    }

    void start_attribute(std::string_view type, const XML_Char** atts) {
        if (type != "string" && type != "int" && type != "float" && type != "boolean") {
            skip(type);
            return;
        }
        auto a = attributes(type, atts, {"key", "value"});
        auto key = required(a, "key", type);
        if (!key) return;
        std::string text = a.count("value") ? a["value"] : std::string();
        AttributeValue value = text;
        if (type == "int") {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) {
                fail(ErrorCode::SchemaError, "attribute '" + *key + "' is not an integer");
                return;
            }
            value = v;
        } else if (type == "float") {
            double v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) {
                fail(ErrorCode::SchemaError, "attribute '" + *key + "' is not a number");
                return;
            }
            value = v;
        } else if (type == "boolean") {
            if (text != "true" && text != "false") {
                fail(ErrorCode::SchemaError, "attribute '" + *key + "' is not a boolean");
                return;
            }
            value = text == "true";
        }
        data.events.back().attributes[*key] = std::move(value);
        scopes.push_back(Scope::Leaf);
    }

    void end() {
        if (failure) {
            return;
        }
        if (skip_depth > 0) {
            --skip_depth;
            return;
        }
        scopes.pop_back();
    }
};

extern "C" void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    static_cast<XocReader*>(user)->start(name, atts);
}

extern "C" void on_end(void* user, const XML_Char*) {
    static_cast<XocReader*>(user)->end();
}

struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

void escape_into(std::ostringstream& os, std::string_view s) {
    for (char c : s) {
        switch (c) {
        case '&': os << "&amp;"; break;
        case '<': os << "&lt;"; break;
        case '>': os << "&gt;"; break;
        case '"': os << "&quot;"; break;
        case '\'': os << "&apos;"; break;
        case '\n': os << "&#10;"; break;
        case '\r': os << "&#13;"; break;
        case '\t': os << "&#9;"; break;
        default: os << c;
        }
    }
}

std::string xml_escape(std::string_view s) {
    std::ostringstream os;
    escape_into(os, s);
    return os.str();
}

std::string shortest(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

} // namespace

LogData read_xoc(std::string_view document, std::vector<Issue>* warnings) {
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
    XocReader reader;
    reader.parser = parser.get();
    reader.warnings = warnings;
    XML_SetUserData(parser.get(), &reader);
    XML_SetElementHandler(parser.get(), on_start, on_end);

    auto status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()),
                            XML_TRUE);
    if (reader.failure) {
        throw *reader.failure;
    }
    if (status != XML_STATUS_OK) {
        throw Error(ErrorCode::ParseError, XML_ErrorString(XML_GetErrorCode(parser.get())),
                    reader.here());
    }
    if (!reader.saw_root) {
        throw Error(ErrorCode::SchemaError, "document has no <log> element");
    }
    return std::move(reader.data);
}

DbEventLog parse_xoc(std::string_view document, ValidationReport* report) {
    std::vector<Issue> warnings;
    auto data = read_xoc(document, &warnings);
    auto checked = validate(data);
    if (report != nullptr) {
        report->warnings.insert(report->warnings.end(), warnings.begin(), warnings.end());
        report->warnings.insert(report->warnings.end(), checked.warnings.begin(),
                                checked.warnings.end());
        report->errors = checked.errors;
    }
    return DbEventLog(std::move(data));
}

std::string write_xoc(const DbEventLog& log) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log>\n  <events>\n";
    for (std::size_t i = 0; i < log.events().size(); ++i) {
        const auto& e = log.events()[i];
        os << "    <event id=\"" << xml_escape(e.id.str()) << "\" activity=\""
           << xml_escape(e.activity.str()) << "\" timestamp=\"" << e.timestamp << "\">\n";
        os << "      <objects>";
        for (auto o : log.objects_of(i)) {
            os << "<object ref=\"" << xml_escape(log.objects()[o].id.str()) << "\"/>";
        }
        os << "</objects>\n";
        if (!e.attributes.empty()) {
            os << "      <attributes>";
            for (const auto& [key, value] : e.attributes) {
                std::string type;
                std::string text;
                if (auto s = std::get_if<std::string>(&value)) {
                    type = "string";
                    text = *s;
                } else if (auto n = std::get_if<std::int64_t>(&value)) {
                    type = "int";
                    text = std::to_string(*n);
                } else if (auto d = std::get_if<double>(&value)) {
                    type = "float";
                    text = shortest(*d);
                } else {
                    type = "boolean";
                    text = std::get<bool>(value) ? "true" : "false";
                }
                os << "<" << type << " key=\"" << xml_escape(key) << "\" value=\""
                   << xml_escape(text) << "\"/>";
            }
            os << "</attributes>\n";
        }
        os << "    </event>\n";
    }
    os << "  </events>\n  <objects>\n";
    for (const auto& o : log.objects()) {
        os << "    <object id=\"" << xml_escape(o.id.str()) << "\" class=\""
           << xml_escape(o.object_class.str()) << "\"/>\n";
    }
    os << "  </objects>\n</log>\n";
    return os.str();
}

} // namespace starstar
