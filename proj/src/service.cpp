#include "starstar/service.hpp"
#include "starstar/export.hpp"
#include "starstar/ingest.hpp"
#include "starstar/projection.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>
#include <mutex>

namespace starstar {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---- catalog ---------------------------------------------------------------

SessionCatalog::Upload SessionCatalog::add_log(DbEventLog log) {
    ModelSnapshot snapshot(std::move(log));
    Upload up{"l" + snapshot.id().substr(1), snapshot.id()};
    std::unique_lock lock(mutex_);
    logs_.emplace(up.log_id, up.snapshot_id);
    snapshots_.emplace(snapshot.id(), snapshot);
    checkpoints_[up.log_id];
    return up;
}

std::string SessionCatalog::add_snapshot(const ModelSnapshot& snapshot) {
    std::unique_lock lock(mutex_);
    snapshots_.emplace(snapshot.id(), snapshot);
    return snapshot.id();
}

ModelSnapshot SessionCatalog::snapshot(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = snapshots_.find(id);
    if (it == snapshots_.end()) {
        throw Error(ErrorCode::NotFound, "unknown snapshot '" + id + "'");
    }
    return it->second;
}

void SessionCatalog::save_checkpoint(const std::string& log_id, const std::string& name,
                                     const std::string& snapshot_id) {
    std::unique_lock lock(mutex_);
    auto store = checkpoints_.find(log_id);
    if (store == checkpoints_.end()) {
        throw Error(ErrorCode::NotFound, "unknown log '" + log_id + "'");
    }
    auto snap = snapshots_.find(snapshot_id);
    if (snap == snapshots_.end()) {
        throw Error(ErrorCode::NotFound, "unknown snapshot '" + snapshot_id + "'");
    }
    store->second.save(name, snap->second);
}

ModelSnapshot SessionCatalog::reset_checkpoint(const std::string& log_id,
                                               const std::string& name) const {
    std::shared_lock lock(mutex_);
    auto store = checkpoints_.find(log_id);
    if (store == checkpoints_.end()) {
        throw Error(ErrorCode::NotFound, "unknown log '" + log_id + "'");
    }
    return store->second.reset(name);
}

bool SessionCatalog::has_log(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return logs_.contains(id);
}

std::vector<std::string> SessionCatalog::log_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : logs_) out.push_back(id);
    return out;
}

// ---- request helpers -------------------------------------------------------

namespace {

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::EmptyPerspective:
    case ErrorCode::Timeout: return 422;
    default: return 400;
    }
}

HttpResponse json_response(int status, const ordered_json& body) {
    return {status, "application/json", body.dump()};
}

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
    ordered_json body;
    body["code"] = code;
    body["message"] = message;
    return json_response(status, body);
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string_view::npos) slash = path.size();
        if (slash > start) parts.emplace_back(path.substr(start, slash - start));
        start = slash + 1;
    }
    return parts;
}

std::optional<std::string> query_value(const HttpRequest& r, const std::string& key) {
    auto it = r.query.find(key);
    if (it == r.query.end()) return std::nullopt;
    return it->second;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, key + " must be a non-negative integer");
    }
    return value;
}

double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, key + " must be a number");
    }
    return value;
}

json parse_body(const HttpRequest& r) {
    auto doc = json::parse(r.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    }
    return doc;
}

std::optional<InputFormat> format_from_content_type(std::string_view type) {
    type = type.substr(0, type.find(';'));
    while (!type.empty() && type.back() == ' ') type.remove_suffix(1);
    if (type == "application/xml" || type == "text/xml" || type == "application/x-xoc") {
        return InputFormat::Xoc;
    }
    if (type == "application/jsonl" || type == "application/x-ndjson" ||
        type == "application/x-jsonlines" || type == "application/json") {
        return InputFormat::Jsonl;
    }
    return std::nullopt;
}

ordered_json ids_body(std::initializer_list<std::pair<const char*, std::string>> fields) {
    ordered_json body = ordered_json::object();
    for (const auto& [k, v] : fields) body[k] = v;
    return body;
}

} // namespace

// ---- service ---------------------------------------------------------------

Service::Service(ServiceConfig config) : config_(std::move(config)) {
    if (!config_.state_dir) return;
    std::filesystem::create_directories(*config_.state_dir);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*config_.state_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            auto up = catalog_.add_log(parse_jsonl(read_file(file)));
            spdlog::info("restored {} from {}", up.log_id, file.string());
        } catch (const Error& e) {
            spdlog::warn("skipping {}: {}", file.string(), e.what());
        }
    }
}

HttpResponse Service::handle(const HttpRequest& request) {
    const auto parts = split_path(request.path);
    const auto& m = request.method;
    auto at = [&](std::size_t n, std::string_view s) { return parts.size() > n && parts[n] == s; };
    try {
        if (parts.size() == 1 && at(0, "healthz") && m == "GET") {
            return json_response(200, ids_body({{"status", "ok"}}));
        }
        if (parts.size() == 1 && at(0, "logs") && m == "POST") {
            return upload(request);
        }
        if (parts.size() == 3 && at(0, "snapshots")) {
            const auto& id = parts[1];
            if (parts[2] == "a2a" && m == "GET") return a2a(id, request);
            if (parts[2] == "e2e" && m == "GET") return e2e(id, request);
            if (parts[2] == "filter" && m == "POST") return filter(id, request);
            if (parts[2] == "project" && m == "POST") return project(id, request);
        }
        if (parts.size() == 3 && at(0, "logs") && at(2, "checkpoints") && m == "POST") {
            return save_checkpoint(parts[1], request);
        }
        if (parts.size() == 5 && at(0, "logs") && at(2, "checkpoints") && at(4, "reset") &&
            m == "POST") {
            return reset_checkpoint(parts[1], parts[3]);
        }
        return error_response(404, "NotFound", "no route for " + m + " " + request.path);
    } catch (const Error& e) {
        spdlog::debug("{} {} -> {}: {}", m, request.path, to_string(e.code()), e.what());
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
        return error_response(400, "InvalidArgument", e.what());
    }
}

HttpResponse Service::upload(const HttpRequest& request) {
    auto format = format_from_content_type(request.content_type);
    auto log = parse_log(request.body, format ? *format : sniff_format(request.body));
    auto up = catalog_.add_log(std::move(log));
    if (config_.state_dir) {
        auto file = *config_.state_dir / (up.log_id + ".jsonl");
        if (!std::filesystem::exists(file)) {
            std::ofstream out(file, std::ios::binary);
            out << write_jsonl(catalog_.snapshot(up.snapshot_id).log());
        }
    }
    spdlog::debug("uploaded {} ({})", up.log_id, up.snapshot_id);
    return json_response(201, ids_body({{"logId", up.log_id}, {"snapshotId", up.snapshot_id}}));
}

HttpResponse Service::a2a(const std::string& snapshot_id, const HttpRequest& request) {
    auto snap = catalog_.snapshot(snapshot_id);
    Metric metric = Metric::Count;
    if (auto name = query_value(request, "metric")) {
        auto parsed = metric_from_name(*name);
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + *name + "'");
        metric = *parsed;
    }
    ViewSettings view;
    if (auto v = query_value(request, "minActivityCount")) {
        view.min_activity_count = parse_count("minActivityCount", *v);
    }
    if (auto v = query_value(request, "minPathCount")) {
        view.min_path_count = parse_count("minPathCount", *v);
    }
    if (auto v = query_value(request, "weightThreshold")) {
        view.weight_threshold = parse_real("weightThreshold", *v);
        if (!(view.weight_threshold >= 0.0 && view.weight_threshold <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "weightThreshold must lie in [0, 1]");
        }
    }
    ordered_json body;
    body["snapshotId"] = snap.id();
    body["metric"] = to_string(metric);
    auto graph = a2a_to_json(apply_view(snap.a2a(), view));
    body["nodes"] = std::move(graph["nodes"]);
    body["edges"] = std::move(graph["edges"]);
    return json_response(200, body);
}

HttpResponse Service::e2e(const std::string& snapshot_id, const HttpRequest& request) {
    auto snap = catalog_.snapshot(snapshot_id);
    auto event = query_value(request, "event");
    if (!event || event->empty()) {
        throw Error(ErrorCode::InvalidArgument, "missing query parameter 'event'");
    }
    std::size_t radius = 1;
    if (auto v = query_value(request, "radius")) radius = parse_count("radius", *v);
    ordered_json body;
    body["snapshotId"] = snap.id();
    body["event"] = *event;
    body["radius"] = radius;
    body["edges"] = e2e_to_json(e2e_neighborhood(snap, EventId(*event), radius))["edges"];
    return json_response(200, body);
}

HttpResponse Service::filter(const std::string& snapshot_id, const HttpRequest& request) {
    auto snap = catalog_.snapshot(snapshot_id);
    auto spec = filter_spec_from_json(parse_body(request));
    auto drill = std::get_if<EdgeDrill>(&spec);
    if (!drill) {
        throw Error(ErrorCode::InvalidArgument,
                    "only edgeDrill filters create snapshots; view filters are query parameters");
    }
    auto id = catalog_.add_snapshot(edge_drill_filter(snap, drill->edges));
    return json_response(201, ids_body({{"snapshotId", id}}));
}

HttpResponse Service::project(const std::string& snapshot_id, const HttpRequest& request) {
    auto snap = catalog_.snapshot(snapshot_id);
    auto body = parse_body(request);
    auto cls = body.find("class");
    if (cls == body.end() || !cls->is_string() || cls->get<std::string>().empty()) {
        throw Error(ErrorCode::InvalidArgument, "'class' must be a non-empty string");
    }
    ProjectionParams params{ObjectClass(cls->get<std::string>())};
    if (auto it = body.find("omega"); it != body.end()) {
        if (!it->is_number()) throw Error(ErrorCode::InvalidArgument, "'omega' must be a number");
        params.omega = it->get<double>();
    }
    if (auto it = body.find("window"); it != body.end()) {
        if (!it->is_number_unsigned()) {
            throw Error(ErrorCode::InvalidArgument, "'window' must be a non-negative integer");
        }
        params.window = it->get<std::size_t>();
    }
    std::string format = "summary";
    if (auto it = body.find("format"); it != body.end()) {
        if (!it->is_string()) throw Error(ErrorCode::InvalidArgument, "'format' must be a string");
        format = it->get<std::string>();
    }
    if (format != "summary" && format != "xes" && format != "csv") {
        throw Error(ErrorCode::InvalidArgument, "format must be xes, csv or summary");
    }
    check_params(params);

    ProjectionLimits limits{std::chrono::steady_clock::now() + config_.projection_timeout};
    auto clog = starstar::project(snap.log(), case_notion(snap.log(), params, limits));
    if (format == "xes") return {200, "application/xml", export_xes(clog)};
    if (format == "csv") return {200, "text/csv", export_csv(clog)};
    auto s = summarize(clog);
    ordered_json out;
    out["cases"] = s.cases;
    out["events"] = s.events;
    out["meanCaseSize"] = s.mean_case_size;
    return json_response(200, out);
}

HttpResponse Service::save_checkpoint(const std::string& log_id, const HttpRequest& request) {
    auto body = parse_body(request);
    auto name = body.find("name");
    auto snap = body.find("snapshotId");
    if (name == body.end() || !name->is_string() || snap == body.end() || !snap->is_string()) {
        throw Error(ErrorCode::InvalidArgument, "expected {name, snapshotId} strings");
    }
    catalog_.save_checkpoint(log_id, name->get<std::string>(), snap->get<std::string>());
    return {204, "", ""};
}

HttpResponse Service::reset_checkpoint(const std::string& log_id, const std::string& name) {
    auto snap = catalog_.reset_checkpoint(log_id, name);
    return json_response(200, ids_body({{"snapshotId", snap.id()}}));
}

// ---- socket front end ------------------------------------------------------

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) {}

    void dispatch(const httplib::Request& req, httplib::Response& res) {
        HttpRequest r{req.method, req.path, {}, req.get_header_value("Content-Type"), req.body};
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        auto out = service.handle(r);
        res.status = out.status;
        if (!out.content_type.empty()) res.set_content(out.body, out.content_type);
        spdlog::debug("{} {} -> {}", req.method, req.path, out.status);
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    const auto origin = service.config().cors_origin;
    svr.set_default_headers({{"Access-Control-Allow-Origin", origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        impl_->dispatch(req, res);
    };
    svr.Get(".*", handler);
    svr.Post(".*", handler);
    svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                 std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        spdlog::error("unhandled: {}", message);
        ordered_json body{{"code", "Internal"}, {"message", message}};
        res.status = 500;
        res.set_content(body.dump(), "application/json");
    });
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind(const std::string& host, int port) {
    auto& svr = impl_->server;
    int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void HttpServer::run() {
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

} // namespace starstar
