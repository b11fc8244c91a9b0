#include "predex/service.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <future>
#include <sstream>

#include <httplib.h>

#include "predex/error.hpp"

namespace predex {

const char* to_string(JobStatus s) {
    switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
    }
    return "failed";
}

namespace {

constexpr std::array<const char*, 8> palette = {"blue", "orange", "green", "red",
                                                "purple", "brown", "pink", "gray"};

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::syntax:
    case ErrorCode::evaluation:
    case ErrorCode::schema:
    case ErrorCode::algebra:
    case ErrorCode::undefined_influence:
    case ErrorCode::insufficient_data:
    case ErrorCode::no_explanation: return 422;
    case ErrorCode::numerical: return 500;
    default: return 400;
    }
}

Json error_json(const Error& e) {
    Json detail = Json::object();
    if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
        detail["position"] = s->position();
    } else if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        detail["row"] = p->row();
        detail["column"] = p->column();
    } else if (const auto* n = dynamic_cast<const NumericalError*>(&e)) {
        detail["residual"] = real_or_null(n->residual());
    }
    return {{"code", to_string(e.code())}, {"message", e.what()}, {"detail", detail}};
}

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        send(res, status_for(e.code()), error_json(e));
    } catch (const nlohmann::json::exception& e) {
        send(res, 400, {{"code", "usage_error"}, {"message", e.what()}, {"detail", Json::object()}});
    } catch (const std::exception& e) {
        send(res, 500, {{"code", "internal_error"}, {"message", e.what()}, {"detail", Json::object()}});
    }
}

Json body_json(const httplib::Request& req) {
    if (req.body.empty()) {
        return Json::object();
    }
    try {
        return Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::usage, std::string("request body is not valid JSON: ") + e.what());
    }
}

Json schema_json(const Dataset& ds) {
    Json list = Json::array();
    for (const auto& f : ds.schema()) {
        list.push_back({{"name", f.name},
                        {"kind", to_string(f.kind)},
                        {"role", to_string(f.role)},
                        {"bins", f.bin_count}});
    }
    return list;
}

// Kind/role hints that rebuild the current schema from the stored CSV.
Json hints_json(const Dataset& ds) {
    Json hints = Json::object();
    for (const auto& f : ds.schema()) {
        hints[f.name] = {{"kind", to_string(f.kind)}, {"role", to_string(f.role)}};
    }
    return hints;
}

Json predicate_json(const StoredPredicate& p) {
    return {{"id", p.id},       {"text", p.text},     {"label", p.label},
            {"color", p.color}, {"hidden", p.hidden}, {"source", p.source}};
}

Json job_json(const Job& j) {
    Json out = {{"job_id", j.id}, {"dataset_id", j.dataset_id}, {"status", to_string(j.status)}};
    if (j.status == JobStatus::done) {
        out["result"] = j.result;
        out["explanation_ids"] = j.explanation_ids;
    }
    if (j.error) {
        out["error"] = *j.error;
    }
    return out;
}

Job job_from_json(const Json& j) {
    Job job;
    job.id = j.at("job_id").get<std::string>();
    job.dataset_id = j.at("dataset_id").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    job.status = status == "done" ? JobStatus::done : JobStatus::failed;
    if (job.status == JobStatus::done) {
        job.result = j.at("result");
        job.explanation_ids = j.at("explanation_ids").get<std::vector<std::string>>();
    } else if (j.contains("error")) {
        job.error = j["error"];
    }
    if (status == "pending" || status == "running") {
        job.error = Json{{"code", "interrupted"}, {"message", "service stopped before the job finished"},
                         {"detail", Json::object()}};
    }
    return job;
}

std::size_t id_number(const std::string& id) {
    std::size_t n = 0;
    for (char c : id) {
        if (c >= '0' && c <= '9') n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    return n;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::configuration, "could not write " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ScoreVector& need_scores(const Session& s) {
    if (!s.scores) {
        throw Error(ErrorCode::usage, "dataset " + s.id + " has no scores yet; POST /datasets/" + s.id + "/scores");
    }
    return *s.scores;
}

const StoredPredicate* find_predicate(const Session& s, const std::string& id) {
    for (const auto& p : s.predicates) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

// A stored predicate id or predicate text.
Predicate resolve_predicate(const Session& s, const std::string& ref) {
    if (ref.empty()) {
        throw Error(ErrorCode::usage, "missing predicate");
    }
    if (const auto* p = find_predicate(s, ref)) {
        return parse_predicate(p->text);
    }
    return parse_predicate(ref);
}

std::string required_param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) {
        throw Error(ErrorCode::usage, std::string("missing query parameter '") + name + "'");
    }
    return req.get_param_value(name);
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    const auto text = req.get_param_value(name);
    try {
        const long v = std::stol(text);
        if (v < 0) throw std::out_of_range("negative");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::usage, std::string("query parameter '") + name + "' must be a non-negative integer");
    }
}

Json evaluation_json(const Session& s, const Predicate& pred, std::size_t bins, double strictness) {
    const ScoreVector& sv = need_scores(s);
    const RowSet sel = evaluate(pred, s.ds);
    Json out;
    out["predicate"] = to_string(pred);
    out["coverage"] = {{"count", sel.count()},
                       {"fraction", s.ds.row_count() ? static_cast<double>(sel.count()) /
                                                           static_cast<double>(s.ds.row_count())
                                                     : 0.0}};
    out["influence"] = sel.empty() ? Json(nullptr) : real_or_null(likelihood_influence(sv, sel, Strictness(strictness)));
    if (const auto b = inside_vs_rest(sv.values(), sel)) {
        out["bf10"] = real_or_null(b->bf10);
        out["log_bf10"] = real_or_null(b->log_bf10);
        out["category"] = to_string(b->category);
    } else {
        out["bf10"] = nullptr;
        out["log_bf10"] = nullptr;
        out["category"] = nullptr;
    }
    out["histogram"] = chart_spec(score_histogram(sv, {{"selected", sel}, {"complement", sel.complement()}}, bins));
    return out;
}

SearchConfig search_config_from(const Json& body, const Session& s, std::size_t workers) {
    SearchConfig cfg;
    cfg.workers = workers;
    cfg.strategy = strategy_from_string(body.value("strategy", std::string("influence")));
    cfg.strictness = Strictness(body.value("strictness", 1.0));
    cfg.max_explanations = body.value("max_explanations", std::size_t{5});
    cfg.max_iterations = body.value("max_iterations", std::size_t{50});
    cfg.binning.bin_count = body.value("bins", default_bin_count);
    if (body.contains("prior_scale")) {
        cfg.prior_scale = body["prior_scale"].get<double>();
    }
    if (body.contains("user_points") && !body["user_points"].is_null()) {
        std::vector<std::uint32_t> pts;
        for (const auto& v : body["user_points"]) {
            const auto r = v.get<long long>();
            if (r < 0 || static_cast<std::size_t>(r) >= s.ds.row_count()) {
                throw Error(ErrorCode::configuration, "user point " + std::to_string(r) + " is out of range");
            }
            pts.push_back(static_cast<std::uint32_t>(r));
        }
        cfg.user_anomalies = std::move(pts);
    }
    return cfg;
}

} // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
    std::filesystem::create_directories(config_.data_dir);
    load_all();
}

Service::~Service() {
    stop();
    drain();
}

std::shared_ptr<Session> Service::session(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::not_found, "unknown dataset '" + id + "'");
    }
    return it->second;
}

std::optional<Job> Service::job(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

// Caller holds the session lock.
void Service::persist(const Session& s) const {
    const auto dir = config_.data_dir / s.id;
    std::filesystem::create_directories(dir);
    if (!std::filesystem::exists(dir / "data.csv")) {
        write_atomic(dir / "data.csv", s.csv);
    }
    Json snap;
    snap["id"] = s.id;
    snap["schema"] = hints_json(s.ds);
    if (s.scores) {
        Json values = Json::array();
        for (double v : s.scores->values()) values.push_back(v);
        snap["scores"] = {{"values", std::move(values)},
                          {"provenance", to_string(s.scores->provenance())},
                          {"flagged", s.scores->flagged()}};
    } else {
        snap["scores"] = nullptr;
    }
    Json preds = Json::array();
    for (const auto& p : s.predicates) preds.push_back(predicate_json(p));
    snap["predicates"] = std::move(preds);
    Json exps = Json::array();
    for (const auto& id : s.explanation_order) {
        exps.push_back({{"id", id}, {"explanation", to_json(s.explanations.at(id))}});
    }
    snap["explanations"] = std::move(exps);
    Json marks = Json::array();
    for (const auto& id : s.bookmark_order) {
        const auto& b = s.bookmarks.at(id);
        marks.push_back({{"id", id}, {"title", b.title}, {"sentence", b.sentence}, {"chart", b.chart}});
    }
    snap["bookmarks"] = std::move(marks);
    Json jobs = Json::array();
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [id, j] : jobs_) {
            if (j.dataset_id == s.id) jobs.push_back(job_json(j));
        }
    }
    snap["jobs"] = std::move(jobs);
    snap["counters"] = {{"predicate", s.next_predicate}, {"explanation", s.next_explanation},
                        {"bookmark", s.next_bookmark}};
    write_atomic(dir / "session.json", snap.dump(1));
}

void Service::load_all() {
    for (const auto& entry : std::filesystem::directory_iterator(config_.data_dir)) {
        const auto snap_path = entry.path() / "session.json";
        if (!entry.is_directory() || !std::filesystem::exists(snap_path)) continue;
        const Json snap = Json::parse(read_file(snap_path));
        auto s = std::make_shared<Session>();
        s->id = snap.at("id").get<std::string>();
        s->csv = read_file(entry.path() / "data.csv");
        s->ds = read_csv(s->csv, schema_hints_from_json(nlohmann::json::parse(snap.at("schema").dump())));
        if (!snap.at("scores").is_null()) {
            const auto& sc = snap["scores"];
            s->scores = ScoreVector(sc.at("values").get<std::vector<double>>(),
                                    sc.at("provenance").get<std::string>() == "gaussian-nll"
                                        ? ScoreProvenance::gaussian_nll
                                        : ScoreProvenance::imported,
                                    sc.at("flagged").get<std::vector<std::uint32_t>>());
        }
        for (const auto& p : snap.at("predicates")) {
            s->predicates.push_back({p.at("id"), p.at("text"), p.at("label"), p.at("color"), p.at("hidden"),
                                     p.at("source")});
        }
        for (const auto& e : snap.at("explanations")) {
            const auto id = e.at("id").get<std::string>();
            s->explanations.emplace(id, explanation_from_json(e.at("explanation")));
            s->explanation_order.push_back(id);
        }
        for (const auto& b : snap.at("bookmarks")) {
            const auto id = b.at("id").get<std::string>();
            s->bookmarks.emplace(id, Bookmark{b.at("title"), b.at("sentence"), b.at("chart")});
            s->bookmark_order.push_back(id);
        }
        const auto& counters = snap.at("counters");
        s->next_predicate = counters.at("predicate");
        s->next_explanation = counters.at("explanation");
        s->next_bookmark = counters.at("bookmark");
        for (const auto& j : snap.at("jobs")) {
            Job job = job_from_json(j);
            if (job.status == JobStatus::failed) job.result = nullptr;
            next_job_ = std::max(next_job_, id_number(job.id) + 1);
            jobs_.emplace(job.id, std::move(job));
        }
        next_dataset_ = std::max(next_dataset_, id_number(s->id) + 1);
        sessions_.emplace(s->id, std::move(s));
    }
}

std::string Service::start_job(const std::shared_ptr<Session>& s, SearchConfig cfg) {
    Dataset ds;
    ScoreVector sv;
    std::string id;
    {
        std::unique_lock lock(s->mutex);
        if (s->active_job) {
            throw Error(ErrorCode::conflict, "dataset " + s->id + " already has search job " + *s->active_job +
                                                 " in progress");
        }
        sv = need_scores(*s);
        ds = s->ds;
        {
            std::lock_guard reg(registry_mutex_);
            id = "j" + std::to_string(next_job_++);
            jobs_.emplace(id, Job{id, s->id, JobStatus::pending, nullptr, {}, std::nullopt});
        }
        s->active_job = id;
    }

    std::lock_guard threads(workers_mutex_);
    workers_.emplace_back([this, s, id, ds = std::move(ds), sv = std::move(sv), cfg = std::move(cfg)] {
        {
            std::lock_guard reg(registry_mutex_);
            jobs_.at(id).status = JobStatus::running;
        }
        std::optional<ExplainResult> result;
        std::optional<Json> failure;
        try {
            result = explain(ds, sv, cfg);
        } catch (const Error& e) {
            failure = error_json(e);
        } catch (const std::exception& e) {
            failure = Json{{"code", "internal_error"}, {"message", e.what()}, {"detail", Json::object()}};
        }
        std::unique_lock lock(s->mutex);
        std::vector<std::string> ids;
        if (result) {
            auto keep = [&](const Explanation& e) {
                const auto eid = "e" + std::to_string(s->next_explanation++);
                s->explanations.emplace(eid, e);
                s->explanation_order.push_back(eid);
                ids.push_back(eid);
                const auto pid = "p" + std::to_string(s->next_predicate++);
                s->predicates.push_back({pid, to_string(e.predicate), eid,
                                         palette[(s->predicates.size()) % palette.size()], false, "induced"});
            };
            for (const auto& e : result->explanations) keep(e);
            if (result->combined) keep(*result->combined);
        }
        {
            std::lock_guard reg(registry_mutex_);
            Job& j = jobs_.at(id);
            if (result) {
                j.status = JobStatus::done;
                j.result = to_json(*result);
                j.explanation_ids = std::move(ids);
            } else {
                j.status = JobStatus::failed;
                j.error = failure;
            }
        }
        s->active_job.reset();
        try {
            persist(*s);
        } catch (const std::exception&) {
            // the job outcome stays available in memory
        }
    });
    return id;
}

void Service::drain() {
    std::vector<std::jthread> running;
    {
        std::lock_guard lock(workers_mutex_);
        running.swap(workers_);
    }
    running.clear(); // joins
}

void Service::stop() {
    if (server_) server_->stop();
}

void Service::listen(const std::string& host, int port) {
    server_ = std::make_unique<httplib::Server>();
    mount(*server_);
    if (!server_->bind_to_port(host, port)) {
        throw Error(ErrorCode::configuration, "cannot bind " + host + ":" + std::to_string(port));
    }
    server_->listen_after_bind();
}

void Service::mount(httplib::Server& srv) {
    srv.set_payload_max_length(1ull << 31);

    srv.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string csv;
            SchemaHints hints;
            std::vector<std::string> targets;
            bool have_targets = false;
            if (req.is_multipart_form_data()) {
                if (!req.has_file("file")) throw Error(ErrorCode::usage, "multipart upload needs a 'file' part");
                csv = req.get_file_value("file").content;
                if (req.has_file("schema_hints")) {
                    const auto text = req.get_file_value("schema_hints").content;
                    if (!text.empty()) hints = schema_hints_from_json(nlohmann::json::parse(text));
                }
                if (req.has_file("targets")) {
                    const auto text = req.get_file_value("targets").content;
                    targets = nlohmann::json::parse(text).get<std::vector<std::string>>();
                    have_targets = true;
                }
            } else {
                csv = req.body;
            }
            auto s = std::make_shared<Session>();
            s->csv = csv;
            s->ds = read_csv(csv, hints);
            if (have_targets) s->ds = set_roles(s->ds, targets);
            {
                std::lock_guard lock(registry_mutex_);
                s->id = "d" + std::to_string(next_dataset_++);
            }
            {
                std::unique_lock lock(s->mutex);
                persist(*s);
            }
            {
                std::lock_guard lock(registry_mutex_);
                sessions_.emplace(s->id, s);
            }
            send(res, 201, {{"dataset_id", s->id}, {"rows", s->ds.row_count()}, {"schema", schema_json(s->ds)}});
        });
    });

    srv.Get(R"(/datasets/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            send(res, 200, {{"dataset_id", s->id}, {"rows", s->ds.row_count()}, {"schema", schema_json(s->ds)},
                            {"has_scores", s->scores.has_value()}});
        });
    });

    srv.Post(R"(/datasets/([^/]+)/scores)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::unique_lock lock(s->mutex);
            ScoreImportOptions opts;
            Json body = Json::object();
            if (req.is_multipart_form_data()) {
                if (!req.has_file("file")) throw Error(ErrorCode::usage, "multipart upload needs a 'file' part");
                if (req.has_file("options")) body = Json::parse(req.get_file_value("options").content);
                opts.higher_is_anomalous = body.value("higher_is_anomalous", true);
                opts.min_shift = body.value("min_shift", false);
                s->scores = import_scores_text(s->ds, req.get_file_value("file").content, opts);
            } else {
                body = body_json(req);
                opts.higher_is_anomalous = body.value("higher_is_anomalous", true);
                opts.min_shift = body.value("min_shift", false);
                if (body.contains("column")) {
                    auto [ds, sv] = import_scores(s->ds, body["column"].get<std::string>(), opts);
                    s->ds = std::move(ds);
                    s->scores = std::move(sv);
                } else if (body.contains("scores")) {
                    std::ostringstream text;
                    for (const auto& v : body["scores"]) text << v.dump() << '\n';
                    s->scores = import_scores_text(s->ds, text.str(), opts);
                } else {
                    const auto model = body.value("model", std::string("gaussian"));
                    if (model != "gaussian") {
                        throw Error(ErrorCode::configuration, "unknown model '" + model + "'; only gaussian is built in");
                    }
                    if (body.contains("targets")) {
                        s->ds = set_roles(s->ds, body["targets"].get<std::vector<std::string>>());
                    }
                    s->scores = score_points(fit_gaussian(s->ds), s->ds);
                }
            }
            persist(*s);
            const auto v = s->scores->values();
            Json warnings = Json::array();
            if (s->scores->has_negative()) {
                warnings.push_back("scores contain negative values; influence assumes higher scores are more anomalous");
            }
            send(res, 200,
                 {{"dataset_id", s->id},
                  {"count", v.size()},
                  {"provenance", to_string(s->scores->provenance())},
                  {"min", v.empty() ? Json(nullptr) : Json(*std::min_element(v.begin(), v.end()))},
                  {"max", v.empty() ? Json(nullptr) : Json(*std::max_element(v.begin(), v.end()))},
                  {"flagged", s->scores->flagged()},
                  {"schema", schema_json(s->ds)},
                  {"warnings", warnings}});
        });
    });

    srv.Post(R"(/datasets/([^/]+)/explain)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            const Json body = body_json(req);
            SearchConfig cfg;
            std::size_t rows = 0;
            {
                std::shared_lock lock(s->mutex);
                need_scores(*s);
                cfg = search_config_from(body, *s, config_.workers);
                rows = s->ds.row_count();
            }
            const bool inline_ok = cfg.strategy == Strategy::influence && rows < config_.sync_row_limit;
            const auto id = start_job(s, cfg);
            if (inline_ok) {
                const auto deadline = std::chrono::steady_clock::now() + config_.sync_budget;
                while (std::chrono::steady_clock::now() < deadline) {
                    const auto j = job(id);
                    if (j && (j->status == JobStatus::done || j->status == JobStatus::failed)) {
                        if (j->status == JobStatus::failed) {
                            const auto code = j->error->value("code", std::string());
                            send(res, code == "internal_error" ? 500 : 422, *j->error);
                        } else {
                            send(res, 200, job_json(*j));
                        }
                        return;
                    }
                    std::this_thread::sleep_for(std::chrono::milliseconds(2));
                }
            }
            send(res, 202, {{"job_id", id}, {"status", "pending"}});
        });
    });

    srv.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto j = job(req.matches[1]);
            if (!j) throw Error(ErrorCode::not_found, "unknown job '" + std::string(req.matches[1]) + "'");
            send(res, 200, job_json(*j));
        });
    });

    srv.Get(R"(/datasets/([^/]+)/predicates)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            Json list = Json::array();
            for (const auto& p : s->predicates) list.push_back(predicate_json(p));
            send(res, 200, {{"predicates", list}});
        });
    });

    srv.Post(R"(/datasets/([^/]+)/predicates)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            const Json body = body_json(req);
            const auto text = body.value("text", std::string());
            if (text.empty()) throw SyntaxError(0, "empty predicate");
            const Predicate pred = parse_predicate(text);
            std::unique_lock lock(s->mutex);
            evaluate(pred, s->ds); // unknown features are rejected up front
            StoredPredicate p;
            p.id = "p" + std::to_string(s->next_predicate++);
            p.text = to_string(pred);
            p.label = body.value("label", p.id);
            p.color = body.value("color", std::string(palette[s->predicates.size() % palette.size()]));
            p.hidden = body.value("hidden", false);
            p.source = "user";
            s->predicates.push_back(p);
            persist(*s);
            send(res, 201, predicate_json(p));
        });
    });

    srv.Get(R"(/datasets/([^/]+)/predicates/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            const auto* p = find_predicate(*s, req.matches[2]);
            if (!p) throw Error(ErrorCode::not_found, "unknown predicate '" + std::string(req.matches[2]) + "'");
            send(res, 200, predicate_json(*p));
        });
    });

    srv.Patch(R"(/datasets/([^/]+)/predicates/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            const Json body = body_json(req);
            std::unique_lock lock(s->mutex);
            auto it = std::find_if(s->predicates.begin(), s->predicates.end(),
                                   [&](const StoredPredicate& p) { return p.id == req.matches[2]; });
            if (it == s->predicates.end()) {
                throw Error(ErrorCode::not_found, "unknown predicate '" + std::string(req.matches[2]) + "'");
            }
            StoredPredicate updated = *it;
            if (body.contains("text")) {
                const Predicate pred = parse_predicate(body["text"].get<std::string>());
                evaluate(pred, s->ds);
                updated.text = to_string(pred);
            }
            if (body.contains("label")) updated.label = body["label"].get<std::string>();
            if (body.contains("color")) updated.color = body["color"].get<std::string>();
            if (body.contains("hidden")) updated.hidden = body["hidden"].get<bool>();
            *it = updated;
            persist(*s);
            send(res, 200, predicate_json(updated));
        });
    });

    srv.Delete(R"(/datasets/([^/]+)/predicates/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                   guarded(res, [&] {
                       auto s = session(req.matches[1]);
                       std::unique_lock lock(s->mutex);
                       auto it = std::find_if(s->predicates.begin(), s->predicates.end(),
                                              [&](const StoredPredicate& p) { return p.id == req.matches[2]; });
                       if (it == s->predicates.end()) {
                           throw Error(ErrorCode::not_found,
                                       "unknown predicate '" + std::string(req.matches[2]) + "'");
                       }
                       s->predicates.erase(it);
                       persist(*s);
                       res.status = 204;
                   });
               });

    srv.Post(R"(/datasets/([^/]+)/evaluate)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            if (req.body.empty()) throw SyntaxError(0, "empty request body");
            const Json body = body_json(req);
            const auto text = body.value("predicate", std::string());
            if (text.empty()) throw SyntaxError(0, "empty predicate");
            const Predicate pred = parse_predicate(text);
            std::shared_lock lock(s->mutex);
            send(res, 200,
                 evaluation_json(*s, pred, body.value("bins", default_histogram_bins), body.value("strictness", 1.0)));
        });
    });

    srv.Get(R"(/datasets/([^/]+)/histogram)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            const ScoreVector& sv = need_scores(*s);
            std::vector<std::pair<std::string, RowSet>> series;
            if (req.has_param("predicates") && !req.get_param_value("predicates").empty()) {
                std::stringstream ids(req.get_param_value("predicates"));
                std::string id;
                while (std::getline(ids, id, ',')) {
                    const auto* p = find_predicate(*s, id);
                    if (!p) throw Error(ErrorCode::not_found, "unknown predicate '" + id + "'");
                    series.emplace_back(p->id, evaluate(parse_predicate(p->text), s->ds));
                }
            } else {
                series.emplace_back("all", RowSet(s->ds.row_count(), true));
            }
            const auto bins = size_param(req, "bins", default_histogram_bins);
            send(res, 200, chart_spec(score_histogram(sv, series, bins)));
        });
    });

    srv.Get(R"(/datasets/([^/]+)/pivot)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            const Predicate pred = resolve_predicate(*s, required_param(req, "predicate"));
            BinningSpec binning;
            binning.bin_count = size_param(req, "bins", default_bin_count);
            const auto view = pivot_view(s->ds, need_scores(*s), pred, required_param(req, "feature"), binning);
            send(res, 200, chart_spec(view, "score"));
        });
    });

    srv.Get(R"(/datasets/([^/]+)/recommendations)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            const Predicate pred = resolve_predicate(*s, required_param(req, "predicate"));
            BinningSpec binning;
            binning.bin_count = size_param(req, "bins", default_bin_count);
            Json list = Json::array();
            for (const auto& r : recommend(s->ds, need_scores(*s), pred, required_param(req, "pivot"), binning)) {
                list.push_back(to_json(r));
            }
            send(res, 200, {{"recommendations", list}});
        });
    });

    srv.Get(R"(/datasets/([^/]+)/subspaces)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            SubspaceOptions opts;
            opts.max_dim = size_param(req, "max_dim", 3);
            opts.allow_many = req.has_param("allow_many") && req.get_param_value("allow_many") == "true";
            opts.workers = config_.workers;
            Json rows = Json::array();
            for (const auto& r : subspace_scores(s->ds, opts)) rows.push_back(to_json(r));
            send(res, 200, {{"rows", rows}});
        });
    });

    srv.Get(R"(/datasets/([^/]+)/bookmarks)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            std::shared_lock lock(s->mutex);
            Json list = Json::array();
            for (const auto& id : s->bookmark_order) {
                const auto& b = s->bookmarks.at(id);
                list.push_back({{"id", id}, {"title", b.title}, {"sentence", b.sentence}, {"chart", b.chart}});
            }
            send(res, 200, {{"bookmarks", list}});
        });
    });

    srv.Post(R"(/datasets/([^/]+)/bookmarks)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            const Json body = body_json(req);
            if (!body.contains("chart") || !body["chart"].is_object()) {
                throw Error(ErrorCode::usage, "bookmark needs a chart object");
            }
            std::unique_lock lock(s->mutex);
            const auto id = "b" + std::to_string(s->next_bookmark++);
            Bookmark b{body.value("title", std::string()), body.value("sentence", std::string()), body["chart"]};
            s->bookmarks.emplace(id, b);
            s->bookmark_order.push_back(id);
            persist(*s);
            send(res, 201, {{"id", id}, {"title", b.title}, {"sentence", b.sentence}, {"chart", b.chart}});
        });
    });

    srv.Post(R"(/datasets/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto s = session(req.matches[1]);
            const Json body = body_json(req);
            std::shared_lock lock(s->mutex);
            ExplainResult picked;
            const auto eids = body.contains("explanation_ids")
                                  ? body["explanation_ids"].get<std::vector<std::string>>()
                                  : s->explanation_order;
            for (const auto& id : eids) {
                auto it = s->explanations.find(id);
                if (it == s->explanations.end()) throw Error(ErrorCode::not_found, "unknown explanation '" + id + "'");
                picked.explanations.push_back(it->second);
            }
            std::vector<Bookmark> marks;
            for (const auto& id : body.value("bookmark_ids", std::vector<std::string>{})) {
                auto it = s->bookmarks.find(id);
                if (it == s->bookmarks.end()) throw Error(ErrorCode::not_found, "unknown bookmark '" + id + "'");
                marks.push_back(it->second);
            }
            const Report rep = build_report(picked, marks);
            write_report(rep, config_.data_dir / s->id / "report");
            send(res, 200, {{"markdown", rep.markdown}, {"data", rep.data}});
        });
    });
}

} // namespace predex
