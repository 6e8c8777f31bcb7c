#include "oracle/random_log.hpp"
#include "starstar/ingest.hpp"
#include "starstar/timefmt.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace starstar;
using test_support::fixture;
using test_support::l1;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Undefined;
}

} // namespace

TEST_CASE("XOC fixture parses to L1") {
    ValidationReport report;
    auto log = parse_xoc(read_file(fixture("l1.xoc")), &report);
    CHECK(log == l1());
    CHECK(report.ok());
    CHECK(report.warnings.empty());
}

TEST_CASE("JSONL fixture parses to L1") {
    auto log = parse_jsonl(read_file(fixture("l1.jsonl")));
    CHECK(log == l1());
}

TEST_CASE("XOC and JSONL agree on L1") {
    CHECK(parse_xoc(read_file(fixture("l1.xoc"))) == parse_jsonl(read_file(fixture("l1.jsonl"))));
}

TEST_CASE("empty inputs") {
    CHECK(parse_xoc("<log/>").empty());
    CHECK(parse_xoc("<log><events/><objects/></log>").empty());
    CHECK(parse_jsonl("").empty());
    CHECK(parse_jsonl("\n\n").empty());
}

TEST_CASE("XOC errors") {
    CHECK(code_of([] {
              parse_xoc(R"(<log><events><event id="e1" activity="A" timestamp="1">
                <objects><object ref="oX"/></objects></event></events></log>)");
          }) == ErrorCode::DanglingRef);

    CHECK(code_of([] { parse_xoc(R"(<log><events><event id="e1" timestamp="1"/></events></log>)"); }) ==
          ErrorCode::SchemaError);
    CHECK(code_of([] { parse_xoc(R"(<log><events><event id="e1" activity="A"/></events></log>)"); }) ==
          ErrorCode::SchemaError);
    CHECK(code_of([] {
              parse_xoc(R"(<log><events><event id="e1" activity="A" timestamp="soon"/></events></log>)");
          }) == ErrorCode::SchemaError);
    CHECK(code_of([] {
              parse_xoc(R"(<log><events>
                <event id="e1" activity="A" timestamp="1"/>
                <event id="e1" activity="B" timestamp="2"/></events></log>)");
          }) == ErrorCode::DuplicateId);
    CHECK(code_of([] { parse_xoc("<other/>"); }) == ErrorCode::SchemaError);
}

TEST_CASE("malformed XML reports line and column") {
    try {
        parse_xoc("<log>\n  <events>\n    <event id=\"e1\"\n</log>");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        REQUIRE(e.where().has_value());
        CHECK(e.where()->line == 4);
        CHECK(e.where()->column >= 1);
    }
}

TEST_CASE("XOC accepts ISO-8601 timestamps and ignores unknown content with warnings") {
    ValidationReport report;
    auto log = parse_xoc(R"(<log>
  <meta version="2"/>
  <events>
    <event id="e1" activity="A" timestamp="2019-01-01T10:00:00.250Z" lifecycle="start">
      <objects><object ref="o1"/></objects>
      <model><snapshot/></model>
    </event>
  </events>
  <objects><object id="o1" class="order"/></objects>
</log>)",
                         &report);
    REQUIRE(log.events().size() == 1);
    CHECK(log.events()[0].timestamp == 1546336800250);
    CHECK(report.ok());
    std::vector<std::string> codes;
    for (const auto& w : report.warnings) codes.push_back(w.code);
    CHECK(std::count(codes.begin(), codes.end(), "UnknownElement") == 2);
    CHECK(std::count(codes.begin(), codes.end(), "UnknownAttribute") == 1);
}

TEST_CASE("JSONL errors") {
    try {
        parse_jsonl("{\"kind\":\"object\",\"id\":\"o1\",\"class\":\"c\"}\n{not json}\n");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        REQUIRE(e.where().has_value());
        CHECK(e.where()->line == 2);
    }
    CHECK(code_of([] { parse_jsonl(R"({"kind":"evnt","id":"e1"})"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_jsonl(R"({"id":"e1"})"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_jsonl(R"([1,2])"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_jsonl(R"({"kind":"event","id":"e1","activity":"A"})"); }) ==
          ErrorCode::SchemaError);
    CHECK(code_of([] {
              parse_jsonl(R"({"kind":"event","id":"e1","activity":"A","timestamp":1,"objects":["oX"]})");
          }) == ErrorCode::DanglingRef);
    CHECK(code_of([] {
              parse_jsonl("{\"kind\":\"object\",\"id\":\"o1\",\"class\":\"c\"}\n"
                          "{\"kind\":\"object\",\"id\":\"o1\",\"class\":\"d\"}\n");
          }) == ErrorCode::DuplicateId);
    CHECK(code_of([] {
              parse_jsonl(R"({"kind":"event","id":"e1","activity":"A","timestamp":1,"attrs":{"x":[1]}})");
          }) == ErrorCode::SchemaError);
}

TEST_CASE("JSONL timestamps may be ISO-8601 strings") {
    auto log = parse_jsonl(R"({"kind":"event","id":"e1","activity":"A","timestamp":"1970-01-01T00:00:01Z"})");
    CHECK(log.events()[0].timestamp == 1000);
}

TEST_CASE("validate") {
    SUBCASE("L1 is clean") {
        auto report = validate(test_support::l1_records());
        CHECK(report.errors.empty());
        CHECK(report.warnings.empty());
        CHECK(validate(l1()).warnings.empty());
    }
    SUBCASE("eventless object warns") {
        auto d = test_support::l1_records();
        d.objects.push_back({ObjectId("o3"), ObjectClass("order")});
        auto report = validate(d);
        CHECK(report.errors.empty());
        REQUIRE(report.warnings.size() == 1);
        CHECK(report.warnings[0].code == "EventlessObject");
    }
    SUBCASE("duplicated event is one error") {
        auto d = test_support::l1_records();
        d.events.push_back(d.events[1]);
        auto report = validate(d);
        REQUIRE(report.errors.size() == 1);
        CHECK(report.errors[0].code == "DuplicateId");
    }
    SUBCASE("objectless event and missing timestamp") {
        auto d = test_support::l1_records();
        d.events.push_back({EventId("e5"), Activity("D"), std::nullopt, {}});
        auto report = validate(d);
        REQUIRE(report.errors.size() == 1);
        CHECK(report.errors[0].code == "SchemaError");
        REQUIRE(report.warnings.size() == 1);
        CHECK(report.warnings[0].code == "ObjectlessEvent");
    }
}

namespace {

LogData with_attributes(LogData d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 4);
    for (auto& e : d.events) {
        switch (pick(rng)) {
        case 0: e.attributes["resource"] = std::string("clerk \"A\" & <co>"); break;
        case 1: e.attributes["amount"] = std::int64_t{-42}; break;
        case 2: e.attributes["ratio"] = 0.1 + 0.2; break;
        case 3: e.attributes["urgent"] = true; break;
        default: break;
        }
    }
    return d;
}

} // namespace

TEST_CASE("serialise then parse is the identity for both formats") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        DbEventLog log(with_attributes(oracle::random_log(rng), rng));
        auto via_xoc = parse_xoc(write_xoc(log));
        auto via_jsonl = parse_jsonl(write_jsonl(log));
        CHECK(via_xoc == log);
        CHECK(via_jsonl == log);
        CHECK(write_jsonl(via_xoc) == write_jsonl(log));
    }
}

TEST_CASE("JSONL record order does not matter") {
    auto text = read_file(fixture("l1.jsonl"));
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    std::sort(lines.begin(), lines.end());
    int permutations = 0;
    do {
        std::string joined;
        for (const auto& l : lines) joined += l + "\n";
        CHECK(parse_jsonl(joined) == l1());
    } while (std::next_permutation(lines.begin(), lines.end()) && ++permutations < 120);
}

TEST_CASE("format detection") {
    CHECK(format_from_extension("a/b/log.xoc") == InputFormat::Xoc);
    CHECK(format_from_extension("log.XML") == InputFormat::Xoc);
    CHECK(format_from_extension("log.jsonl") == InputFormat::Jsonl);
    CHECK_FALSE(format_from_extension("log.txt").has_value());
    CHECK(sniff_format("  <log/>") == InputFormat::Xoc);
    CHECK(sniff_format("{\"kind\":\"object\"}") == InputFormat::Jsonl);
}

TEST_CASE("ISO-8601 conversion") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601("1970-01-02") == 86'400'000);
    CHECK(parse_iso8601("2019-01-01T12:00:00+02:00") == parse_iso8601("2019-01-01T10:00:00Z"));
    CHECK(parse_iso8601("2019-01-01 10:00:00.5") == 1546336800500);
    CHECK_FALSE(parse_iso8601("2019-13-01").has_value());
    CHECK_FALSE(parse_iso8601("yesterday").has_value());
    CHECK(format_iso8601(100) == "1970-01-01T00:00:00.100Z");
    CHECK(format_iso8601(-1) == "1969-12-31T23:59:59.999Z");
    for (Timestamp t : {Timestamp{0}, Timestamp{1546336800250}, Timestamp{-86'400'001}}) {
        CHECK(parse_iso8601(format_iso8601(t)) == t);
    }
    CHECK(parse_timestamp("1234") == 1234);
    CHECK(parse_timestamp("-5") == -5);
}
