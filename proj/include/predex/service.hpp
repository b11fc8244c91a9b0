#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "predex/dataset.hpp"
#include "predex/insight.hpp"
#include "predex/scoring.hpp"
#include "predex/search.hpp"
#include "predex/serialize.hpp"

namespace httplib {
class Server;
}

namespace predex {

struct ServiceConfig {
    std::filesystem::path data_dir = "predex-data";
    std::size_t workers = 1;
    /// Influence searches on fewer rows answer inline when they finish within the budget.
    std::size_t sync_row_limit = 10'000;
    std::chrono::milliseconds sync_budget{10'000};
};

struct StoredPredicate {
    std::string id;
    std::string text;
    std::string label;
    std::string color;
    bool hidden = false;
    std::string source; // induced | user
};

enum class JobStatus { pending, running, done, failed };
const char* to_string(JobStatus s);

struct Job {
    std::string id;
    std::string dataset_id;
    JobStatus status = JobStatus::pending;
    Json result;                            // explain result document once done
    std::vector<std::string> explanation_ids;
    std::optional<Json> error;              // {code, message, detail}
};

/// One uploaded dataset with its scores, predicates, explanations, bookmarks and jobs.
struct Session {
    std::string id;
    std::string csv;
    Dataset ds;
    std::optional<ScoreVector> scores;
    std::vector<StoredPredicate> predicates;
    std::map<std::string, Explanation> explanations;
    std::map<std::string, Bookmark> bookmarks;
    std::vector<std::string> explanation_order;
    std::vector<std::string> bookmark_order;
    std::size_t next_predicate = 1;
    std::size_t next_explanation = 1;
    std::size_t next_bookmark = 1;
    std::optional<std::string> active_job;
    mutable std::shared_mutex mutex;
};

/// JSON API over the engine. State is snapshotted to `data_dir` after every mutation.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    void mount(httplib::Server& server);
    /// Binds and blocks; throws a configuration error when the port is unavailable.
    void listen(const std::string& host, int port);
    void stop();
    /// Waits for background jobs to finish.
    void drain();

    const ServiceConfig& config() const noexcept { return config_; }

private:
    friend struct ServiceHandlers;

    std::shared_ptr<Session> session(const std::string& id) const;
    void persist(const Session& s) const;
    void load_all();
    std::string start_job(const std::shared_ptr<Session>& s, SearchConfig cfg);
    std::optional<Job> job(const std::string& id) const;

    ServiceConfig config_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::map<std::string, Job> jobs_;
    std::size_t next_dataset_ = 1;
    std::size_t next_job_ = 1;
    std::mutex workers_mutex_;
    std::vector<std::jthread> workers_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace predex
