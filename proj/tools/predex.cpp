// predex: score, explain, report, serve.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "predex/dataset.hpp"
#include "predex/error.hpp"
#include "predex/insight.hpp"
#include "predex/scoring.hpp"
#include "predex/search.hpp"
#include "predex/serialize.hpp"
#include "predex/service.hpp"

namespace fs = std::filesystem;
using namespace predex;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

struct Options {
    std::string input;
    std::string hints;
    std::vector<std::string> targets;
    std::string model = "gaussian";
    std::string scores;
    std::string score_column;
    bool lower_is_anomalous = false;
    bool min_shift = false;
    std::string strategy = "influence";
    double strictness = 1.0;
    std::size_t bins = default_bin_count;
    std::size_t max_explanations = 5;
    std::size_t max_iterations = 50;
    std::string user_points;
    double prior_scale = default_prior_scale;
    std::string out;
    std::string summary;
    std::string explanations;
    std::string bookmarks;
    std::string out_dir = ".";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data_dir = "predex-data";
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    bool json = false;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::usage, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) {
        fs::create_directories(dir);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Error(ErrorCode::usage, "cannot write " + path);
    }
}

Dataset load_input(const Options& o) {
    SchemaHints hints;
    if (!o.hints.empty()) {
        hints = load_schema_hints(o.hints);
    }
    return load_csv(o.input, hints);
}

ScoreImportOptions import_options(const Options& o) {
    ScoreImportOptions opts;
    opts.higher_is_anomalous = !o.lower_is_anomalous;
    opts.min_shift = o.min_shift;
    return opts;
}

void report_ok(const Options& o, const Json& summary, const std::string& text) {
    if (o.json) {
        std::cout << summary.dump() << '\n';
    } else {
        std::cout << text << '\n';
    }
}

int run_score(const Options& o) {
    if (o.model != "gaussian") {
        throw Error(ErrorCode::usage, "unknown model '" + o.model + "'; only gaussian is built in");
    }
    Dataset ds = load_input(o);
    if (!o.targets.empty()) {
        ds = set_roles(ds, o.targets);
    }
    const ScoreVector sv = score_points(fit_gaussian(ds), ds);
    write_text(o.out, write_scores_csv(sv));
    report_ok(o, {{"status", "ok"}, {"rows", sv.size()}, {"flagged", sv.flagged().size()}, {"out", o.out}},
              "wrote " + std::to_string(sv.size()) + " scores to " + o.out);
    return 0;
}

std::vector<std::uint32_t> read_points(const std::string& path) {
    std::vector<std::uint32_t> rows;
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        long long r = 0;
        if (!(ls >> r)) continue;
        if (r < 0) throw Error(ErrorCode::configuration, "negative row id in " + path);
        rows.push_back(static_cast<std::uint32_t>(r));
    }
    return rows;
}

int run_explain(const Options& o) {
    Dataset ds = load_input(o);
    ScoreVector sv;
    if (!o.score_column.empty()) {
        auto [with_target, imported] = import_scores(ds, o.score_column, import_options(o));
        ds = std::move(with_target);
        sv = std::move(imported);
        if (!o.targets.empty()) {
            throw Error(ErrorCode::usage, "--targets cannot be combined with --score-column");
        }
    } else if (!o.scores.empty()) {
        if (!o.targets.empty()) {
            ds = set_roles(ds, o.targets);
        }
        sv = import_scores_file(ds, o.scores, import_options(o));
    } else {
        ds = set_roles(ds, o.targets);
        sv = score_points(fit_gaussian(ds), ds);
    }

    SearchConfig cfg;
    cfg.strategy = strategy_from_string(o.strategy);
    cfg.strictness = Strictness(o.strictness);
    cfg.binning.bin_count = o.bins;
    cfg.max_explanations = o.max_explanations;
    cfg.max_iterations = o.max_iterations;
    cfg.workers = o.workers;
    cfg.prior_scale = o.prior_scale;
    if (!o.user_points.empty()) {
        cfg.user_anomalies = read_points(o.user_points);
    }

    const ExplainResult result = explain(ds, sv, cfg);
    write_text(o.out, to_json(result).dump(2) + "\n");
    const std::string summary_path =
        o.summary.empty() ? fs::path(o.out).replace_extension(".md").string() : o.summary;
    const std::string summary = markdown_summary(result);
    write_text(summary_path, summary);
    for (const auto& w : result.warnings) {
        if (!o.json) std::cerr << "warning: " << w << '\n';
    }
    report_ok(o,
              {{"status", "ok"},
               {"explanations", result.explanations.size()},
               {"out", o.out},
               {"summary", summary_path},
               {"warnings", result.warnings}},
              summary);
    return 0;
}

int run_report(const Options& o) {
    const ExplainResult result = explain_result_from_json(Json::parse(read_text(o.explanations)));
    std::vector<Bookmark> marks;
    if (!o.bookmarks.empty()) {
        for (const auto& b : Json::parse(read_text(o.bookmarks))) {
            marks.push_back({b.value("title", std::string()), b.value("sentence", std::string()),
                             b.value("chart", Json::object())});
        }
    }
    const Report rep = build_report(result, marks);
    write_report(rep, o.out_dir);
    report_ok(o, {{"status", "ok"}, {"out_dir", o.out_dir}}, "wrote report.md and report.json to " + o.out_dir);
    return 0;
}

int run_serve(const Options& o) {
    ServiceConfig cfg;
    cfg.data_dir = o.data_dir;
    cfg.workers = o.workers;
    Service service(cfg);
    if (!o.json) {
        std::cerr << "listening on " << o.host << ':' << o.port << '\n';
    }
    service.listen(o.host, o.port);
    return 0;
}

int fail(const Options& o, int code, const std::string& kind, const std::string& message) {
    if (o.json) {
        std::cerr << Json{{"status", "error"}, {"code", kind}, {"message", message}}.dump() << '\n';
    } else {
        std::cerr << "predex: " << message << '\n';
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Explain anomalies in tabular data with predicates"};
    app.set_config("--config", "predex.toml", "Key/value config file; flags override it");
    app.require_subcommand(1);
    app.add_flag("--json", o.json, "Structured diagnostics and summaries");
    app.add_option("--seed", o.seed, "Seed for synthetic generators; the search itself is deterministic");
    app.add_option("--workers", o.workers, "Worker threads, 0 for all cores")->capture_default_str();

    auto* score = app.add_subcommand("score", "Fit the Gaussian scorer and write per-row scores");
    score->add_option("--input", o.input, "CSV file")->required()->check(CLI::ExistingFile);
    score->add_option("--hints", o.hints, "Schema hints JSON")->check(CLI::ExistingFile);
    score->add_option("--targets", o.targets, "Target feature names")->delimiter(',');
    score->add_option("--model", o.model, "Scoring model")->capture_default_str();
    score->add_option("--out", o.out, "Score file to write")->required();

    auto* ex = app.add_subcommand("explain", "Search for explanatory predicates");
    ex->add_option("--input", o.input, "CSV file")->required()->check(CLI::ExistingFile);
    ex->add_option("--hints", o.hints, "Schema hints JSON")->check(CLI::ExistingFile);
    auto* scores = ex->add_option("--scores", o.scores, "Score side file")->check(CLI::ExistingFile);
    auto* column = ex->add_option("--score-column", o.score_column, "Column holding the scores");
    auto* targets = ex->add_option("--targets", o.targets, "Target features for the Gaussian scorer")->delimiter(',');
    scores->excludes(column);
    ex->add_flag("--lower-is-anomalous", o.lower_is_anomalous, "Negate imported scores");
    ex->add_flag("--min-shift", o.min_shift, "Rebase imported scores to a minimum of 0");
    ex->add_option("--strategy", o.strategy, "influence or bayes")
        ->check(CLI::IsMember({"influence", "bayes"}))
        ->capture_default_str();
    ex->add_option("--strictness", o.strictness, "Exponent c in (0, 1]")->capture_default_str();
    ex->add_option("--bins", o.bins, "Equal-width bins per numeric feature")->capture_default_str();
    ex->add_option("--max-explanations", o.max_explanations)->capture_default_str();
    ex->add_option("--max-iterations", o.max_iterations)->capture_default_str();
    ex->add_option("--user-points", o.user_points, "File of anomalous row ids, one per line")
        ->check(CLI::ExistingFile);
    ex->add_option("--prior-scale", o.prior_scale, "Cauchy prior scale r")->capture_default_str();
    ex->add_option("--out", o.out, "Explanation JSON to write")->required();
    ex->add_option("--summary", o.summary, "Markdown summary (default: --out with .md)");

    auto* rep = app.add_subcommand("report", "Render report.md and report.json");
    rep->add_option("--explanations", o.explanations, "Explanation JSON from explain")
        ->required()
        ->check(CLI::ExistingFile);
    rep->add_option("--bookmarks", o.bookmarks, "JSON list of {title, sentence, chart}")->check(CLI::ExistingFile);
    rep->add_option("--out-dir", o.out_dir)->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Run the JSON service");
    serve->add_option("--host", o.host)->capture_default_str();
    serve->add_option("--port", o.port)->capture_default_str();
    serve->add_option("--data-dir", o.data_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(o, exit_usage, "usage_error", std::string(e.what()) + "\nRun with --help for usage.");
    }

    try {
        if (ex->parsed() && o.scores.empty() && o.score_column.empty() && targets->count() == 0) {
            throw Error(ErrorCode::usage, "explain needs --scores, --score-column or --targets");
        }
        if (score->parsed()) return run_score(o);
        if (ex->parsed()) return run_explain(o);
        if (rep->parsed()) return run_report(o);
        if (serve->parsed()) return run_serve(o);
    } catch (const Error& e) {
        const bool usage = e.code() == ErrorCode::usage || e.code() == ErrorCode::configuration;
        return fail(o, usage ? exit_usage : exit_data, to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(o, exit_data, "parse_error", e.what());
    } catch (const std::exception& e) {
        return fail(o, exit_data, "error", e.what());
    }
    return exit_usage;
}
