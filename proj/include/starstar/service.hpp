#pragma once
// HTTP API over a catalog of uploaded logs and immutable snapshots.
//
//   POST /logs                                   -> 201 {logId, snapshotId}
//   GET  /snapshots/{id}/a2a                     -> 200 A2A view
//   GET  /snapshots/{id}/e2e?event=&radius=      -> 200 E2E neighbourhood
//   POST /snapshots/{id}/filter                  -> 201 {snapshotId}
//   POST /snapshots/{id}/project                 -> 200 summary | XES | CSV
//   POST /logs/{id}/checkpoints                  -> 204
//   POST /logs/{id}/checkpoints/{name}/reset     -> 200 {snapshotId}
//   GET  /healthz                                -> 200
//
// Errors carry a {code, message} JSON body: 400 malformed input, 404 unknown
// ids, 422 for projections that cannot be answered.

#include "starstar/filtering.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace starstar {

class SessionCatalog {
public:
    struct Upload {
        std::string log_id;
        std::string snapshot_id;
    };

    // Equal content maps to the same ids; re-uploading keeps checkpoints.
    Upload add_log(DbEventLog log);
    std::string add_snapshot(const ModelSnapshot& snapshot);

    // All three throw NotFound.
    ModelSnapshot snapshot(const std::string& id) const;
    void save_checkpoint(const std::string& log_id, const std::string& name,
                         const std::string& snapshot_id);
    ModelSnapshot reset_checkpoint(const std::string& log_id, const std::string& name) const;

    bool has_log(const std::string& id) const;
    std::vector<std::string> log_ids() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::string> logs_; // log id -> initial snapshot id
    std::map<std::string, ModelSnapshot> snapshots_;
    std::map<std::string, CheckpointStore> checkpoints_;
};

struct ServiceConfig {
    std::string cors_origin = "*";
    std::chrono::milliseconds projection_timeout{60'000};
    std::optional<std::filesystem::path> state_dir;
};

struct HttpRequest {
    std::string method;
    std::string path; // decoded, without query
    std::multimap<std::string, std::string> query;
    std::string content_type;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type;
    std::string body;
};

class Service {
public:
    // Reloads every *.jsonl under state_dir, when set.
    explicit Service(ServiceConfig config = {});

    HttpResponse handle(const HttpRequest& request);

    const ServiceConfig& config() const noexcept { return config_; }
    SessionCatalog& catalog() noexcept { return catalog_; }

private:
    HttpResponse upload(const HttpRequest& request);
    HttpResponse a2a(const std::string& snapshot_id, const HttpRequest& request);
    HttpResponse e2e(const std::string& snapshot_id, const HttpRequest& request);
    HttpResponse filter(const std::string& snapshot_id, const HttpRequest& request);
    HttpResponse project(const std::string& snapshot_id, const HttpRequest& request);
    HttpResponse save_checkpoint(const std::string& log_id, const HttpRequest& request);
    HttpResponse reset_checkpoint(const std::string& log_id, const std::string& name);

    ServiceConfig config_;
    SessionCatalog catalog_;
};

// Socket front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws InvalidArgument
    // when binding fails.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace starstar
