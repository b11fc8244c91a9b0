#include "predex/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "predex/error.hpp"
#include "predex/text.hpp"

namespace predex {

Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json real_or_null(const std::optional<double>& v) { return v ? real_or_null(*v) : Json(nullptr); }

Json to_json(const Explanation& e) {
    Json j;
    j["predicate"] = to_string(e.predicate);
    j["influence"] = real_or_null(e.influence);
    j["strictness"] = e.strictness;
    if (e.bayes) {
        // +inf bf10 is reported as null with category decisive
        j["bf10"] = real_or_null(e.bayes->bf10);
        j["log_bf10"] = real_or_null(e.bayes->log_bf10);
        j["category"] = to_string(e.bayes->category);
    } else {
        j["bf10"] = nullptr;
        j["log_bf10"] = nullptr;
        j["category"] = nullptr;
    }
    j["coverage"] = {{"count", e.count}, {"fraction", e.fraction}};
    j["mean_score_inside"] = real_or_null(e.mean_score_inside);
    j["mean_score_outside"] = real_or_null(e.mean_score_outside);
    Json trace = Json::array();
    for (double t : e.trace) trace.push_back(real_or_null(t));
    j["trace"] = std::move(trace);
    j["strategy"] = to_string(e.strategy);
    return j;
}

namespace {

double real_from(const Json& j, double missing = std::numeric_limits<double>::quiet_NaN()) {
    return j.is_number() ? j.get<double>() : missing;
}

} // namespace

Explanation explanation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("predicate") || !j["predicate"].is_string()) {
        throw Error(ErrorCode::parse, "explanation record needs a predicate string");
    }
    Explanation e(parse_predicate(j["predicate"].get<std::string>()));
    e.influence = real_from(j.value("influence", Json()));
    e.strictness = real_from(j.value("strictness", Json()), 1.0);
    const Json category = j.value("category", Json());
    if (category.is_string()) {
        BayesResult b;
        b.category = evidence_from_string(category.get<std::string>());
        b.bf10 = real_from(j.value("bf10", Json()), std::numeric_limits<double>::infinity());
        b.log_bf10 = real_from(j.value("log_bf10", Json()), std::numeric_limits<double>::infinity());
        e.bayes = b;
    }
    const Json coverage = j.value("coverage", Json::object());
    e.count = coverage.value("count", std::size_t{0});
    e.fraction = real_from(coverage.value("fraction", Json()), 0.0);
    e.mean_score_inside = real_from(j.value("mean_score_inside", Json()));
    if (const Json out = j.value("mean_score_outside", Json()); out.is_number()) {
        e.mean_score_outside = out.get<double>();
    }
    for (const auto& t : j.value("trace", Json::array())) {
        e.trace.push_back(real_from(t));
    }
    e.strategy = strategy_from_string(j.value("strategy", std::string("influence")));
    return e;
}

Json to_json(const ExplainResult& r) {
    Json j;
    Json list = Json::array();
    for (const auto& e : r.explanations) list.push_back(to_json(e));
    j["explanations"] = std::move(list);
    j["combined"] = r.combined ? to_json(*r.combined) : Json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

ExplainResult explain_result_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("explanations") || !j["explanations"].is_array()) {
        throw Error(ErrorCode::parse, "explanation file needs an 'explanations' array");
    }
    ExplainResult r;
    for (const auto& e : j["explanations"]) r.explanations.push_back(explanation_from_json(e));
    if (j.contains("combined") && !j["combined"].is_null()) {
        r.combined = explanation_from_json(j["combined"]);
    }
    for (const auto& w : j.value("warnings", Json::array())) r.warnings.push_back(w.get<std::string>());
    return r;
}

namespace {

std::string cell(double v) { return std::isfinite(v) ? format_real(v) : (std::isnan(v) ? "n/a" : "inf"); }

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

std::string escape_pipes(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

void row(std::ostringstream& os, const std::string& label, const Explanation& e) {
    os << "| " << label << " | `" << escape_pipes(to_string(e.predicate)) << "` | " << cell(e.influence) << " | "
       << (e.bayes ? cell(e.bayes->bf10) : "n/a") << " | " << (e.bayes ? to_string(e.bayes->category) : "n/a")
       << " | " << e.count << " (" << percent(e.fraction) << ") |\n";
}

} // namespace

std::string markdown_summary(const ExplainResult& r) {
    std::ostringstream os;
    os << "# Explanations\n\n";
    os << "| # | predicate | influence | bf10 | evidence | coverage |\n";
    os << "|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < r.explanations.size(); ++i) {
        row(os, std::to_string(i + 1), r.explanations[i]);
    }
    if (r.combined) {
        row(os, "all", *r.combined);
    }
    if (!r.warnings.empty()) {
        os << "\nWarnings:\n\n";
        for (const auto& w : r.warnings) os << "- " << w << '\n';
    }
    return os.str();
}

} // namespace predex
