#include "starstar/cli.hpp"
#include "starstar/bench.hpp"
#include "starstar/export.hpp"
#include "starstar/filtering.hpp"
#include "starstar/ingest.hpp"
#include "starstar/projection.hpp"
#include "starstar/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>

namespace starstar::cli {

namespace {

void configure_logging() {
    static const bool once = [] {
        auto logger = spdlog::stderr_color_mt("starstar");
        logger->set_pattern("%^[%l]%$ %v");
        spdlog::set_default_logger(logger);
        return true;
    }();
    (void)once;
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("STARSTAR_LOG")) {
        std::string_view v(env);
        if (v == "error") level = spdlog::level::err;
        else if (v == "info") level = spdlog::level::info;
        else if (v == "debug") level = spdlog::level::debug;
    }
    spdlog::set_level(level);
}

struct Input {
    std::string path;
    std::string format; // empty: extension, then content sniffing
};

InputFormat resolve_format(const Input& in, std::string_view content) {
    if (!in.format.empty()) {
        if (auto f = format_from_name(in.format)) return *f;
        throw Error(ErrorCode::InvalidArgument, "unknown format '" + in.format + "'");
    }
    if (auto f = format_from_extension(in.path)) return *f;
    return sniff_format(content);
}

DbEventLog load(const Input& in) {
    auto content = read_file(in.path);
    ValidationReport report;
    auto log = parse_log(content, resolve_format(in, content), &report);
    for (const auto& w : report.warnings) {
        spdlog::warn("{}: {}", in.path, w.message);
    }
    return log;
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << data;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::NotFound, "cannot write '" + path + "'");
    file << data;
}

void add_input(CLI::App* cmd, Input& in) {
    cmd->add_option("input", in.path, "Event log (.xoc or .jsonl)")->required();
    cmd->add_option("--format", in.format, "Input format")->check(CLI::IsMember({"xoc", "jsonl"}));
}

// ---- subcommands -----------------------------------------------------------

int do_validate(const Input& in, std::ostream& out) {
    auto content = read_file(in.path);
    auto format = resolve_format(in, content);
    std::vector<Issue> warnings;
    auto data = format == InputFormat::Xoc ? read_xoc(content, &warnings)
                                           : read_jsonl(content, &warnings);
    auto report = validate(data);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    auto line = [&](const char* level, const Issue& issue) {
        out << level << ": " << issue.code;
        if (!issue.location.empty()) out << " at " << issue.location;
        out << ": " << issue.message << '\n';
    };
    for (const auto& e : report.errors) line("error", e);
    for (const auto& w : report.warnings) line("warning", w);
    if (!report.ok()) return kExitData;
    out << fmt::format("ok: {} events, {} objects, {} event-object pairs\n", data.events.size(),
                       data.objects.size(), data.eo.size());
    return kExitOk;
}

struct BuildOptions {
    Input in;
    std::string out;
    bool dot = false;
    std::string metric = "count";
    ViewSettings view;
};

int do_build(const BuildOptions& o, std::ostream& out) {
    ModelSnapshot snap(load(o.in));
    auto view = apply_view(snap.a2a(), o.view);
    auto metric = metric_from_name(o.metric).value_or(Metric::Count);
    std::string data = o.dot ? a2a_to_dot(view, metric) : a2a_to_json(view).dump(2) + "\n";
    write_output(o.out, data, out);
    spdlog::info("snapshot {}: {} nodes, {} edges shown", snap.id(), view.nodes().size(),
                 view.edges().size());
    return kExitOk;
}

struct FilterOptions {
    Input in;
    std::string spec;
    std::string out;
    std::string log_out;
};

int do_filter(const FilterOptions& o, std::ostream& out) {
    std::string text = o.spec;
    if (!text.empty() && text.front() != '{') text = read_file(o.spec);
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::InvalidArgument, "filter spec is not JSON");
    auto spec = filter_spec_from_json(doc);

    ModelSnapshot snap(load(o.in));
    std::optional<ModelSnapshot> result;
    A2AMultigraph view;
    if (auto drill = std::get_if<EdgeDrill>(&spec)) {
        result = edge_drill_filter(snap, drill->edges);
        view = result->a2a();
    } else {
        result = snap;
        view = std::visit(
            [&](const auto& f) -> A2AMultigraph {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, EdgeDrill>) {
                    return snap.a2a();
                } else {
                    return apply_view_filter(snap.a2a(), f);
                }
            },
            spec);
    }
    nlohmann::ordered_json doc_out;
    doc_out["snapshotId"] = result->id();
    doc_out["filter"] = to_json(spec);
    auto graph = a2a_to_json(view);
    doc_out["nodes"] = std::move(graph["nodes"]);
    doc_out["edges"] = std::move(graph["edges"]);
    write_output(o.out, doc_out.dump(2) + "\n", out);
    if (!o.log_out.empty()) {
        auto format = format_from_extension(o.log_out).value_or(InputFormat::Jsonl);
        auto bytes = format == InputFormat::Xoc ? write_xoc(result->log()) : write_jsonl(result->log());
        write_output(o.log_out, bytes, out);
    }
    return kExitOk;
}

struct ProjectOptions {
    Input in;
    std::string perspective;
    double omega = kDefaultOmega;
    std::size_t window = kDefaultWindow;
    std::string xes;
    std::string csv;
    bool summary = false;
    double timeout = 0.0; // seconds, 0 = none
};

int do_project(const ProjectOptions& o, std::ostream& out) {
    auto log = load(o.in);
    ProjectionParams params{ObjectClass(o.perspective), o.omega, o.window};
    check_params(params);
    ProjectionLimits limits;
    if (o.timeout > 0.0) {
        limits.deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(o.timeout));
    }
    auto clog = project(log, case_notion(log, params, limits));
    auto s = summarize(clog);
    spdlog::info("{} cases, {} events, mean case size {:.2f}", s.cases, s.events, s.mean_case_size);
    if (!o.xes.empty()) write_output(o.xes, export_xes(clog), out);
    if (!o.csv.empty()) write_output(o.csv, export_csv(clog), out);
    if (o.summary) {
        nlohmann::ordered_json j;
        j["cases"] = s.cases;
        j["events"] = s.events;
        j["meanCaseSize"] = s.mean_case_size;
        out << j.dump() << '\n';
    } else if (o.xes.empty() && o.csv.empty()) {
        out << export_xes(clog);
    }
    return kExitOk;
}

int do_bench(const BenchConfig& config, std::ostream& out) {
    auto result = run_bench(config);
    out << fmt::format("{:>10} {:>10} {:>10} {:>12}\n", "eo_pairs", "events", "objects", "seconds");
    for (const auto& row : result.rows) {
        out << fmt::format("{:>10} {:>10} {:>10} {:>12.6f}\n", row.eo_pairs, row.events, row.objects,
                           row.seconds);
    }
    for (std::size_t i = 0; i < result.ratios.size(); ++i) {
        out << fmt::format("ratio {}->{}: {:.3f}\n", result.rows[i].eo_pairs,
                           result.rows[i + 1].eo_pairs, result.ratios[i]);
    }
    out << fmt::format("total {:.2f}s, max ratio {}: {}\n", result.total_seconds, config.max_ratio,
                       result.within_bound ? "within bound" : "EXCEEDED");
    return kExitOk;
}

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string state_dir;
    double timeout = 60.0;
    std::string cors_origin = "*";
};

int do_serve(const ServeOptions& o, std::ostream& out) {
    ServiceConfig config;
    config.cors_origin = o.cors_origin;
    config.projection_timeout =
        std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000.0));
    if (!o.state_dir.empty()) config.state_dir = o.state_dir;
    Service service(config);
    HttpServer server(service);
    int port = server.bind(o.host, o.port);
    out << fmt::format("listening on http://{}:{}\n", o.host, port) << std::flush;
    g_server = &server;
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    server.run();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    g_server = nullptr;
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_logging();

    CLI::App app{"Multi-perspective process models from object-centric event logs", "starstar"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "starstar 0.1.0");

    Input validate_in;
    auto* validate_cmd = app.add_subcommand("validate", "Check an event log and report issues");
    add_input(validate_cmd, validate_in);

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build the activity graph and print it");
    add_input(build_cmd, build.in);
    build_cmd->add_option("--out", build.out, "Output file (default stdout)");
    build_cmd->add_flag("--dot", build.dot, "Emit Graphviz DOT instead of JSON");
    build_cmd->add_option("--metric", build.metric, "Edge metric for DOT labels")
        ->check(CLI::IsMember({"count", "weight", "perf", "performance"}))
        ->capture_default_str();
    build_cmd->add_option("--min-activity-count", build.view.min_activity_count)
        ->capture_default_str();
    build_cmd->add_option("--min-path-count", build.view.min_path_count)->capture_default_str();
    build_cmd->add_option("--weight-threshold", build.view.weight_threshold)
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    FilterOptions filter;
    auto* filter_cmd = app.add_subcommand("filter", "Apply a filter spec and emit the result");
    add_input(filter_cmd, filter.in);
    filter_cmd->add_option("--spec", filter.spec, "Filter spec JSON, inline or a file")
        ->required();
    filter_cmd->add_option("--out", filter.out, "Output file (default stdout)");
    filter_cmd->add_option("--log-out", filter.log_out, "Write the filtered log (.jsonl or .xoc)");

    ProjectOptions proj;
    auto* project_cmd = app.add_subcommand("project", "Flatten onto one object class");
    add_input(project_cmd, proj.in);
    project_cmd->add_option("--class", proj.perspective, "Perspective object class")->required();
    project_cmd->add_option("--omega", proj.omega, "Similarity threshold in (0, 1]")
        ->capture_default_str();
    project_cmd->add_option("--window", proj.window, "Extra merge rounds")->capture_default_str();
    project_cmd->add_option("--xes", proj.xes, "Write XES here");
    project_cmd->add_option("--csv", proj.csv, "Write CSV here");
    project_cmd->add_flag("--summary", proj.summary, "Print {cases, events, meanCaseSize}");
    project_cmd->add_option("--timeout", proj.timeout, "Give up after this many seconds");

    BenchConfig bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measure graph build scaling");
    bench_cmd->add_option("--sizes", bench.sizes, "Event-object pair counts")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--degree", bench.degree)->capture_default_str();
    bench_cmd->add_option("--repeats", bench.repeats)->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed)->capture_default_str();

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", serve.host)->capture_default_str();
    serve_cmd->add_option("--port", serve.port)->capture_default_str();
    serve_cmd->add_option("--state-dir", serve.state_dir, "Persist uploaded logs here");
    serve_cmd->add_option("--timeout", serve.timeout, "Projection timeout in seconds")
        ->capture_default_str();
    serve_cmd->add_option("--cors-origin", serve.cors_origin)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*validate_cmd) return do_validate(validate_in, out);
        if (*build_cmd) return do_build(build, out);
        if (*filter_cmd) return do_filter(filter, out);
        if (*project_cmd) return do_project(proj, out);
        if (*bench_cmd) return do_bench(bench, out);
        if (*serve_cmd) return do_serve(serve, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitData;
    }
    return kExitUsage;
}

} // namespace starstar::cli
