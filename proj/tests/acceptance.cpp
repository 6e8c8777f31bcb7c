// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include "oracle/brute_force.hpp"
#include "oracle/random_log.hpp"
#include "starstar/bench.hpp"
#include "starstar/export.hpp"
#include "starstar/filtering.hpp"
#include "starstar/ingest.hpp"
#include "starstar/projection.hpp"
#include "starstar/service.hpp"
#include "test_support.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <functional>
#include <iostream>
#include <thread>

using namespace starstar;
using nlohmann::json;
using test_support::relative_error;

namespace {

constexpr double kTolerance = 1e-9;

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)) {}

    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) failures_.push_back(what);
    }

    bool report(std::ostream& os) const {
        if (failures_.empty()) {
            os << fmt::format("PASS  {} ({} checks)\n", name_, checks_);
            return true;
        }
        os << fmt::format("FAIL  {}: {}", name_, failures_.front());
        if (failures_.size() > 1) os << fmt::format(" (+{} more)", failures_.size() - 1);
        os << '\n';
        return false;
    }

private:
    std::string name_;
    std::size_t checks_ = 0;
    std::vector<std::string> failures_;
};

std::set<std::string> strings(const std::vector<EventId>& ids) {
    std::set<std::string> out;
    for (const auto& id : ids) out.insert(id.str());
    return out;
}

std::set<EventId> id_set(const std::set<std::string>& s) {
    std::set<EventId> out;
    for (const auto& x : s) out.emplace(x);
    return out;
}

// Every definition against the brute-force oracle on one log.
void compare_with_oracle(Criterion& c, const LogData& data, const std::string& label) {
    auto ref = oracle::from_records(data);
    DbEventLog log(data);

    for (const auto& o : ref.objects) {
        ObjectId id(o.id);
        auto g = oracle::g(ref, o.id);
        c.expect(strings(related_events(log, id)) == g, label + ": g(" + o.id + ")");
        c.expect(relative_error(object_weight(log, id), oracle::w(ref, o.id)) <= kTolerance,
                 label + ": w(" + o.id + ")");
        for (std::size_t k = 1; k <= g.size(); ++k) {
            c.expect(kth_event(log, id, k).str() == oracle::kth(ref, o.id, k),
                     fmt::format("{}: kth({}, {})", label, o.id, k));
        }
    }

    auto e2e = build_e2e(log);
    auto fe = oracle::f_e(ref);
    c.expect(fe.size() == e2e.edges().size(), label + ": E2E edge count");
    for (std::size_t i = 0; i < std::min(fe.size(), e2e.edges().size()); ++i) {
        const auto& f = e2e.edges()[i];
        c.expect(f.object.str() == fe[i].object && f.index == fe[i].index &&
                     f.source.str() == fe[i].in && f.target.str() == fe[i].out,
                 fmt::format("{}: E2E edge {} endpoints", label, i));
        c.expect(relative_error(f.weight, fe[i].weight) <= kTolerance &&
                     relative_error(f.perf, fe[i].perf) <= kTolerance,
                 fmt::format("{}: E2E edge {} attributes", label, i));
    }

    auto a2a = build_a2a(log, e2e);
    c.expect(a2a == build_a2a(log), label + ": direct A2A build");
    auto fa = oracle::f_a(ref);
    std::map<std::string, double> max_weight;
    for (const auto& [key, v] : fa) {
        max_weight[std::get<0>(key)] = std::max(max_weight[std::get<0>(key)], v.weight);
    }
    c.expect(fa.size() == a2a.edges().size(), label + ": A2A edge count");
    for (const auto& edge : a2a.edges()) {
        auto it = fa.find({edge.key.object_class.str(), edge.key.source.str(), edge.key.target.str()});
        if (it == fa.end()) {
            c.expect(false, label + ": unexpected A2A edge");
            continue;
        }
        const auto& ref_edge = it->second;
        c.expect(edge.count == ref_edge.count, label + ": A2A count");
        c.expect(relative_error(edge.weight, ref_edge.weight) <= kTolerance, label + ": A2A weight");
        c.expect(relative_error(edge.perf, ref_edge.perf) <= kTolerance, label + ": A2A perf");
        c.expect(relative_error(edge.weight_norm,
                                ref_edge.weight / max_weight[edge.key.object_class.str()]) <=
                     kTolerance,
                 label + ": A2A weightNorm");
    }

    // sim over all pairs of object event sets, empty pairs excluded
    for (const auto& a : ref.objects) {
        for (const auto& b : ref.objects) {
            auto ga = oracle::g(ref, a.id);
            auto gb = oracle::g(ref, b.id);
            if (ga.empty() && gb.empty()) continue;
            c.expect(relative_error(similarity(id_set(ga), id_set(gb)), oracle::sim(ga, gb)) <=
                         kTolerance,
                     label + ": sim");
        }
    }

    std::set<std::string> classes;
    for (const auto& o : ref.objects) classes.insert(o.cls);
    for (const auto& cls : classes) {
        for (double omega : {0.05, 0.2, 0.5, 1.0}) {
            for (std::size_t window : {0, 1, 2}) {
                auto expected = oracle::cases(ref, cls, omega, window);
                auto where = fmt::format("{}: cases({}, {}, {})", label, cls, omega, window);
                if (expected.empty()) {
                    bool threw = false;
                    try {
                        case_notion(log, {ObjectClass(cls), omega, window});
                    } catch (const Error& e) {
                        threw = e.code() == ErrorCode::EmptyPerspective;
                    }
                    c.expect(threw, where + " should be EmptyPerspective");
                    continue;
                }
                auto actual = case_notion(log, {ObjectClass(cls), omega, window});
                c.expect(actual.size() == expected.size(), where + " count");
                for (const auto& k : actual) {
                    auto it = expected.find(k.source_object->str());
                    c.expect(it != expected.end() && strings(k.events) == it->second, where);
                    c.expect(k.id.str() == "c:" + k.source_object->str(), where + " id");
                }
            }
        }
    }
}

void oracle_equivalence(Criterion& c) {
    compare_with_oracle(c, test_support::l1_records(), "L1");
    std::mt19937_64 rng(20240501);
    for (int i = 0; i < 200; ++i) {
        compare_with_oracle(c, oracle::random_log(rng), fmt::format("random #{}", i));
    }
}

void l1_golden(Criterion& c) {
    auto log = test_support::l1();
    auto e2e = build_e2e(log);
    std::multiset<double> weights;
    std::multiset<double> perfs;
    for (const auto& f : e2e.edges()) {
        weights.insert(f.weight);
        perfs.insert(f.perf);
    }
    c.expect(e2e.edges().size() == 3, "E2E has 3 edges");
    c.expect(weights == std::multiset<double>{0.25, 0.25, 1.0 / 3.0}, "E2E weights");
    c.expect(perfs == std::multiset<double>{100.0, 100.0, 200.0}, "E2E perfs");

    auto a2a = build_a2a(log);
    c.expect(a2a.edges().size() == 3, "A2A has 3 edges");
    for (const auto& e : a2a.edges()) c.expect(e.count == 1, "A2A count 1");

    auto cases = case_notion(log, {ObjectClass("order"), 0.2, 0});
    c.expect(cases.size() == 1, "one case");
    if (!cases.empty()) {
        c.expect(cases[0].events == std::vector<EventId>{EventId("e1"), EventId("e2"), EventId("e3"),
                                                         EventId("e4")},
                 "case holds e1..e4 in order");
    }
}

void limit_behaviours(Criterion& c) {
    // omega = 1: each case is exactly the source object's events
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        DbEventLog log(oracle::random_log(rng));
        std::set<ObjectClass> classes;
        for (const auto& o : log.objects()) classes.insert(o.object_class);
        for (const auto& cls : classes) {
            for (std::size_t window : {0, 2}) {
                std::vector<Case> cases;
                try {
                    cases = case_notion(log, {cls, 1.0, window});
                } catch (const Error&) {
                    continue;
                }
                for (const auto& k : cases) {
                    c.expect(k.events == related_events(log, *k.source_object), "omega=1 gives g(o)");
                }
            }
        }
    }

    // equal timestamps: perf 0 on E2E and A2A
    LogData same;
    same.events = {{EventId("b"), Activity("X"), 7, {}}, {EventId("a"), Activity("Y"), 7, {}}};
    same.objects = {{ObjectId("o"), ObjectClass("c")}};
    same.eo = {{EventId("a"), ObjectId("o")}, {EventId("b"), ObjectId("o")}};
    ModelSnapshot tied{DbEventLog(same)};
    c.expect(tied.e2e().edges().size() == 1 && tied.e2e().edges()[0].perf == 0.0, "E2E perf 0");
    c.expect(tied.a2a().edges().size() == 1 && tied.a2a().edges()[0].perf == 0.0, "A2A perf 0");

    // default view threshold 0.5 on load: library, service and CLI defaults
    c.expect(kDefaultWeightThreshold == 0.5 && ViewSettings{}.weight_threshold == 0.5,
             "library default");
    LogData skewed;
    skewed.events = {{EventId("a1"), Activity("A"), 1, {}}, {EventId("b1"), Activity("B"), 2, {}},
                     {EventId("a2"), Activity("A"), 3, {}}, {EventId("b2"), Activity("B"), 4, {}},
                     {EventId("c2"), Activity("C"), 5, {}}};
    skewed.objects = {{ObjectId("x"), ObjectClass("k")}, {ObjectId("y"), ObjectClass("k")}};
    skewed.eo = {{EventId("a1"), ObjectId("x")}, {EventId("b1"), ObjectId("x")},
                 {EventId("a2"), ObjectId("y")}, {EventId("b2"), ObjectId("y")},
                 {EventId("c2"), ObjectId("y")}};
    DbEventLog skewed_log(skewed);
    ModelSnapshot snap(skewed_log);
    auto low = snap.a2a().find({ObjectClass("k"), Activity("B"), Activity("C")});
    c.expect(low && low->weight_norm < 0.5, "fixture has an edge below 0.5");
    c.expect(apply_view(snap.a2a(), ViewSettings{}).edges().size() == 1, "default view drops it");

    Service service;
    auto up = service.handle({"POST", "/logs", {}, "application/x-ndjson", write_jsonl(skewed_log)});
    auto id = json::parse(up.body).at("snapshotId").get<std::string>();
    auto view = json::parse(service.handle({"GET", "/snapshots/" + id + "/a2a", {}, "", ""}).body);
    c.expect(view.at("edges").size() == 1, "service default view drops it");
}

void dfg_equivalence(Criterion& c) {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 50; ++i) {
        auto data = oracle::random_log(
            rng, {.max_events = 40, .max_classes = 1, .single_object_per_event = true});
        auto expected = oracle::dfg(oracle::from_records(data));
        auto a2a = build_a2a(DbEventLog(data));
        std::map<std::pair<std::string, std::string>, std::size_t> actual;
        for (const auto& e : a2a.edges()) actual[{e.key.source.str(), e.key.target.str()}] += e.count;
        c.expect(actual == expected, fmt::format("log #{}", i));
    }
}

void linearity(Criterion& c) {
    auto result = run_bench(BenchConfig{});
    for (std::size_t i = 0; i < result.ratios.size(); ++i) {
        std::cout << fmt::format("      {:>6} -> {:>6} pairs: {:.4f}s -> {:.4f}s, ratio {:.3f}\n",
                                 result.rows[i].eo_pairs, result.rows[i + 1].eo_pairs,
                                 result.rows[i].seconds, result.rows[i + 1].seconds,
                                 result.ratios[i]);
        c.expect(result.ratios[i] <= 2.5, fmt::format("ratio {:.3f} above 2.5", result.ratios[i]));
    }
    c.expect(result.total_seconds < 60.0, fmt::format("total {:.1f}s", result.total_seconds));
}

void round_trips(Criterion& c) {
    auto xoc_text = read_file(test_support::fixture("l1.xoc"));
    auto jsonl_text = read_file(test_support::fixture("l1.jsonl"));
    auto from_xoc = parse_xoc(xoc_text);
    auto from_jsonl = parse_jsonl(jsonl_text);
    c.expect(from_xoc == from_jsonl, "XOC and JSONL fixtures parse equal");
    c.expect(parse_jsonl(write_jsonl(from_xoc)) == from_xoc, "XOC -> JSONL -> parse");
    c.expect(parse_xoc(write_xoc(from_jsonl)) == from_jsonl, "JSONL -> XOC -> parse");
    c.expect(write_jsonl(parse_jsonl(write_jsonl(from_xoc))) == write_jsonl(from_xoc),
             "JSONL output is a fixed point");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        DbEventLog log(oracle::random_log(rng));
        c.expect(parse_xoc(write_xoc(log)) == log, "random XOC round trip");
        c.expect(parse_jsonl(write_jsonl(log)) == log, "random JSONL round trip");
    }

    auto golden = read_file(test_support::golden("l1_order_w02.xes"));
    for (int run = 0; run < 3; ++run) {
        auto log = run % 2 ? parse_jsonl(jsonl_text) : parse_xoc(xoc_text);
        auto xes = export_xes(project(log, case_notion(log, {ObjectClass("order"), 0.2, 0})));
        c.expect(xes == golden, fmt::format("XES run {} equals the golden file", run));
    }
}

void service_contract(Criterion& c) {
    Service service;
    HttpServer server(service);
    int port = server.bind("127.0.0.1", 0);
    std::thread runner([&] { server.run(); });
    server.wait_until_ready();
    httplib::Client http("127.0.0.1", port);

    auto status = [&](const httplib::Result& r, int expected, const std::string& what) {
        bool ok = r && r->status == expected;
        c.expect(ok, fmt::format("{}: expected {}, got {}", what, expected, r ? r->status : -1));
        return ok;
    };
    auto body = [](const httplib::Result& r) { return json::parse(r->body, nullptr, false); };
    auto is_error = [&](const httplib::Result& r) {
        auto j = body(r);
        return j.is_object() && j.contains("code") && j.contains("message");
    };

    status(http.Get("/healthz"), 200, "GET /healthz");

    auto up = http.Post("/logs", read_file(test_support::fixture("l1.jsonl")), "application/x-ndjson");
    std::string log_id;
    std::string snap;
    if (status(up, 201, "POST /logs")) {
        auto j = body(up);
        c.expect(j.contains("logId") && j.contains("snapshotId"), "upload shape");
        log_id = j.value("logId", "");
        snap = j.value("snapshotId", "");
    }

    auto a2a = http.Get("/snapshots/" + snap + "/a2a");
    if (status(a2a, 200, "GET a2a")) {
        auto j = body(a2a);
        c.expect(j.at("edges").size() == 3, "a2a has 3 edges");
        c.expect(j.at("nodes").size() == 3, "a2a has 3 nodes");
        for (const auto& e : j.at("edges")) {
            for (const char* k : {"class", "source", "target", "count", "weight", "weightNorm", "perf"}) {
                c.expect(e.contains(k), std::string("a2a edge field ") + k);
            }
        }
        auto repeat = http.Get("/snapshots/" + snap + "/a2a");
        c.expect(repeat && repeat->body == a2a->body, "GET is byte-stable");
    }
    auto view = http.Get("/snapshots/" + snap +
                         "/a2a?metric=perf&minActivityCount=2&minPathCount=0&weightThreshold=0.5");
    if (status(view, 200, "GET a2a with view params")) {
        c.expect(body(view).at("nodes").size() == 1, "minActivityCount=2 leaves one node");
    }
    auto bad_view = http.Get("/snapshots/" + snap + "/a2a?weightThreshold=abc");
    status(bad_view, 400, "bad view param");
    c.expect(is_error(bad_view), "400 carries {code, message}");

    auto e2e = http.Get("/snapshots/" + snap + "/e2e?event=e2&radius=1");
    if (status(e2e, 200, "GET e2e")) {
        auto j = body(e2e);
        c.expect(j.at("edges").size() == 3, "e2e neighbourhood of e2");
        c.expect(j.at("edges")[0].contains("weight") && j.at("edges")[0].contains("perf"), "e2e shape");
    }
    status(http.Get("/snapshots/" + snap + "/e2e?event=zz&radius=1"), 404, "e2e unknown event");

    status(http.Post("/logs/" + log_id + "/checkpoints",
                     json{{"name", "base"}, {"snapshotId", snap}}.dump(), "application/json"),
           204, "save checkpoint");
    auto filtered = http.Post(
        "/snapshots/" + snap + "/filter",
        R"({"kind":"edgeDrill","edges":[{"class":"item","source":"B","target":"B"}]})",
        "application/json");
    std::string child;
    if (status(filtered, 201, "POST filter")) {
        child = body(filtered).value("snapshotId", "");
        c.expect(!child.empty() && child != snap, "filter mints a new id");
        auto child_view = http.Get("/snapshots/" + child + "/a2a");
        c.expect(child_view && body(child_view).at("edges").size() == 1, "filtered view has 1 edge");
    }
    auto after = http.Get("/snapshots/" + snap + "/a2a");
    c.expect(after && a2a && after->body == a2a->body, "filter leaves the parent unchanged");
    auto bad_filter = http.Post("/snapshots/" + snap + "/filter", "{", "application/json");
    status(bad_filter, 400, "malformed filter body");
    c.expect(is_error(bad_filter), "400 carries {code, message}");

    auto reset = http.Post("/logs/" + log_id + "/checkpoints/base/reset", "", "application/json");
    if (status(reset, 200, "reset checkpoint")) {
        auto restored = body(reset).value("snapshotId", "");
        auto restored_view = http.Get("/snapshots/" + restored + "/a2a");
        c.expect(restored_view && a2a && restored_view->body == a2a->body,
                 "reset restores the original a2a bytes");
    }
    status(http.Post("/logs/" + log_id + "/checkpoints/none/reset", "", "application/json"), 404,
           "reset unknown checkpoint");

    auto summary = http.Post("/snapshots/" + snap + "/project",
                             R"({"class":"order","omega":0.2,"window":0,"format":"summary"})",
                             "application/json");
    if (status(summary, 200, "project summary")) {
        c.expect(body(summary) == json{{"cases", 1}, {"events", 4}, {"meanCaseSize", 4.0}},
                 "summary {cases:1, events:4, meanCaseSize:4.0}");
    }
    auto xes = http.Post("/snapshots/" + snap + "/project",
                         R"({"class":"order","omega":0.2,"window":0,"format":"xes"})",
                         "application/json");
    if (status(xes, 200, "project xes")) {
        c.expect(xes->body == read_file(test_support::golden("l1_order_w02.xes")), "xes body");
    }
    auto csv = http.Post("/snapshots/" + snap + "/project",
                         R"({"class":"order","omega":0.2,"window":0,"format":"csv"})",
                         "application/json");
    status(csv, 200, "project csv");
    auto empty = http.Post("/snapshots/" + snap + "/project", R"({"class":"ghost"})", "application/json");
    status(empty, 422, "EmptyPerspective");
    c.expect(is_error(empty), "422 carries {code, message}");

    auto missing = http.Get("/snapshots/nope/a2a");
    status(missing, 404, "unknown snapshot");
    c.expect(is_error(missing), "404 carries {code, message}");

    auto cors = http.Options("/snapshots/" + snap + "/a2a");
    c.expect(cors && cors->has_header("Access-Control-Allow-Origin"), "CORS preflight");

    server.stop();
    runner.join();
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria{
        {"oracle equivalence (L1 + 200 random logs)", oracle_equivalence},
        {"L1 golden values", l1_golden},
        {"limit behaviours (omega=1, equal timestamps, default threshold 0.5)", limit_behaviours},
        {"DFG equivalence (50 single-object logs)", dfg_equivalence},
        {"linearity (10k -> 20k -> 40k pairs, ratio <= 2.5, under 60 s)", linearity},
        {"format round-trips and byte-stable XES", round_trips},
        {"service contract against a running instance", service_contract},
    };
    bool all = true;
    for (const auto& [name, check] : criteria) {
        Criterion c(name);
        try {
            check(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        all = c.report(std::cout) && all;
    }
    std::cout << (all ? "all acceptance criteria passed\n" : "some acceptance criteria FAILED\n");
    return all ? 0 : 1;
}
