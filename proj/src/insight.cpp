#include "predex/insight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "predex/datetime.hpp"
#include "predex/error.hpp"
#include "predex/parallel.hpp"
#include "predex/text.hpp"

namespace predex {

Histogram score_histogram(const ScoreVector& sv, const std::vector<std::pair<std::string, RowSet>>& selections,
                          std::size_t bins) {
    if (selections.empty()) {
        throw Error(ErrorCode::usage, "histogram needs at least one selection");
    }
    if (bins < 1) {
        throw Error(ErrorCode::configuration, "histogram bin count must be at least 1");
    }
    if (sv.size() == 0) {
        throw Error(ErrorCode::empty_input, "no scores to histogram");
    }
    const auto scores = sv.values();
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
    double lo = *mn;
    double hi = *mx;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges.push_back(i == bins ? hi : lo + width * static_cast<double>(i));
    }
    for (const auto& [label, sel] : selections) {
        if (sel.universe() != sv.size()) {
            throw Error(ErrorCode::evaluation, "selection '" + label + "' does not match the dataset size");
        }
        HistogramSeries s{label, std::vector<std::size_t>(bins, 0)};
        sel.for_each([&](std::uint32_t r) {
            auto b = static_cast<std::size_t>(std::floor((scores[r] - lo) / width));
            s.counts[std::min(b, bins - 1)] += 1;
        });
        h.series.push_back(std::move(s));
    }
    return h;
}

namespace {

const Conjunction& single_term(const Predicate& pred) {
    if (!pred.is_conjunctive()) {
        throw Error(ErrorCode::usage, "pivoting needs a single non-negated conjunction");
    }
    return pred.terms().front();
}

std::string bound_text(double v, bool datetime) {
    return datetime ? format_iso8601(static_cast<std::int64_t>(v)) : format_real(v);
}

// Mean of `values` per pivot value or bin over `rows`; values NaN are skipped.
PivotView aggregate(const Dataset& ds, std::span<const double> values, const Conjunction& conj,
                    std::string_view pivot, const BinningSpec& binning) {
    const Clause* clause = conj.find(pivot);
    if (clause == nullptr) {
        throw Error(ErrorCode::usage, "pivot feature '" + std::string(pivot) + "' is not in the predicate");
    }
    const auto idx = ds.index_of(pivot);
    const auto& fs = ds.feature(idx);
    const Column& col = ds.column(idx);

    PivotView v;
    v.pivot = std::string(pivot);
    v.kind = fs.kind;
    const Conjunction rest = conj.without(pivot);
    if (!rest.empty()) {
        v.filter = rest;
    }
    const RowSet rows = evaluate(rest, ds);

    std::vector<double> sums;
    std::vector<std::size_t> counts;
    std::optional<FeatureBins> bins;
    if (fs.kind == FeatureKind::categorical) {
        sums.assign(col.dictionary.size(), 0.0);
        counts.assign(col.dictionary.size(), 0);
    } else {
        bins = discretize_feature(ds, idx, binning.bins_for(fs.name));
        const std::size_t n = bins ? bins->size() : 0;
        sums.assign(n, 0.0);
        counts.assign(n, 0);
    }
    rows.for_each([&](std::uint32_t r) {
        if (col.is_missing(r) || std::isnan(values[r])) {
            return;
        }
        v.filtered_rows += 1;
        std::size_t b = 0;
        if (fs.kind == FeatureKind::categorical) {
            b = static_cast<std::size_t>(col.codes[r]);
        } else if (auto found = bins->bin_of(col.values[r])) {
            b = *found;
        } else {
            return;
        }
        sums[b] += values[r];
        counts[b] += 1;
    });

    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (counts[b] == 0) {
            continue;
        }
        PivotBar bar;
        bar.count = counts[b];
        bar.mean = sums[b] / static_cast<double>(counts[b]);
        if (fs.kind == FeatureKind::categorical) {
            bar.label = col.dictionary[b];
            bar.lo = bar.hi = std::numeric_limits<double>::quiet_NaN();
            const auto& members = clause->as_member_of().values;
            bar.highlighted = std::binary_search(members.begin(), members.end(), bar.label);
        } else {
            const bool dt = fs.kind == FeatureKind::datetime;
            const bool last = b + 1 == bins->size();
            bar.lo = bins->edges[b];
            bar.hi = bins->edges[b + 1];
            bar.label = "[" + bound_text(bar.lo, dt) + ", " + bound_text(bar.hi, dt) + (last ? "]" : ")");
            const Range& r = clause->as_range();
            // the bin overlaps the clause's interval
            const bool below = last ? bar.hi < r.lo || (bar.hi == r.lo && !r.lo_inclusive)
                                    : bar.hi <= r.lo;
            const bool above = bar.lo > r.hi || (bar.lo == r.hi && !r.hi_inclusive);
            bar.highlighted = !below && !above;
        }
        v.bars.push_back(std::move(bar));
    }
    return v;
}

} // namespace

PivotView pivot_view(const Dataset& ds, const ScoreVector& sv, const Predicate& pred, std::string_view pivot,
                     const BinningSpec& binning) {
    if (sv.size() != ds.row_count()) {
        throw Error(ErrorCode::import, "score vector length does not match the dataset");
    }
    return aggregate(ds, sv.values(), single_term(pred), pivot, binning);
}

const char* to_string(Direction d) { return d == Direction::high ? "high" : "low"; }

std::vector<Recommendation> recommend(const Dataset& ds, const ScoreVector& sv, const Predicate& pred,
                                      std::string_view pivot, const BinningSpec& binning) {
    const Conjunction& conj = single_term(pred);
    if (!conj.has_feature(pivot)) {
        throw Error(ErrorCode::usage, "pivot feature '" + std::string(pivot) + "' is not in the predicate");
    }
    if (sv.size() != ds.row_count()) {
        throw Error(ErrorCode::import, "score vector length does not match the dataset");
    }
    const RowSet filtered = evaluate(conj.without(pivot), ds);
    if (filtered.count() < 3) {
        throw Error(ErrorCode::insufficient_data, "recommendations need at least 3 filtered rows");
    }
    const RowSet inside = evaluate(conj, ds);
    const auto scores = sv.values();

    std::vector<Recommendation> out;
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
        const auto& fs = ds.feature(f);
        if (fs.kind == FeatureKind::categorical || conj.has_feature(fs.name)) {
            continue;
        }
        const Column& col = ds.column(f);
        // the imported score column correlates with itself; nothing to recommend
        bool is_score = true;
        filtered.for_each([&](std::uint32_t r) { is_score = is_score && col.values[r] == scores[r]; });
        if (is_score) {
            continue;
        }
        double n = 0.0, sx = 0.0, sy = 0.0;
        filtered.for_each([&](std::uint32_t r) {
            if (!col.is_missing(r)) {
                n += 1.0;
                sx += col.values[r];
                sy += scores[r];
            }
        });
        if (n < 3.0) {
            continue;
        }
        const double mx = sx / n;
        const double my = sy / n;
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        filtered.for_each([&](std::uint32_t r) {
            if (!col.is_missing(r)) {
                const double dx = col.values[r] - mx;
                const double dy = scores[r] - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
        });
        if (sxx == 0.0 || syy == 0.0) {
            continue;
        }
        const double r = sxy / std::sqrt(sxx * syy);
        if (!(std::abs(r) > recommendation_threshold)) {
            continue;
        }
        double in_sum = 0.0, in_n = 0.0;
        inside.for_each([&](std::uint32_t row) {
            if (!col.is_missing(row)) {
                in_sum += col.values[row];
                in_n += 1.0;
            }
        });
        Recommendation rec;
        rec.attribute = fs.name;
        rec.r = r;
        rec.direction = in_n > 0.0 && in_sum / in_n > mx ? Direction::high : Direction::low;
        rec.chart = aggregate(ds, col.values, conj, pivot, binning);
        rec.sentence = render_sentence(rec, pred, pivot);
        out.push_back(std::move(rec));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Recommendation& a, const Recommendation& b) { return std::abs(a.r) > std::abs(b.r); });
    return out;
}

namespace {

std::string join_values(const std::vector<std::string>& values) {
    if (values.size() == 1) {
        return values[0];
    }
    if (values.size() == 2) {
        return values[0] + " and " + values[1];
    }
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        if (i + 1 == values.size()) out += "and ";
        out += values[i];
    }
    return out;
}

std::string value_prose(const Clause& clause) {
    if (!clause.is_range()) {
        return join_values(clause.as_member_of().values);
    }
    const Range& r = clause.as_range();
    const auto lo = bound_text(r.lo, r.datetime);
    const auto hi = bound_text(r.hi, r.datetime);
    if (r.is_point()) {
        return lo;
    }
    const bool open_lo = std::isinf(r.lo);
    const bool open_hi = std::isinf(r.hi);
    if (open_lo && open_hi) {
        return "any value";
    }
    if (open_lo) {
        return (r.hi_inclusive ? "at most " : "less than ") + hi;
    }
    if (open_hi) {
        return (r.lo_inclusive ? "at least " : "greater than ") + lo;
    }
    return "between " + lo + " and " + hi;
}

} // namespace

std::string clause_prose(const Clause& clause) { return clause.feature() + " is " + value_prose(clause); }

std::string render_sentence(const Recommendation& rec, const Predicate& pred, std::string_view pivot) {
    const Conjunction& conj = single_term(pred);
    const Clause* p = conj.find(pivot);
    if (p == nullptr) {
        throw Error(ErrorCode::usage, "pivot feature '" + std::string(pivot) + "' is not in the predicate");
    }
    std::string s = "Average " + rec.attribute + " is " + to_string(rec.direction) + " when " + clause_prose(*p) +
                    " compared to other " + std::string(pivot) + "'s";
    const Conjunction rest = conj.without(pivot);
    for (std::size_t i = 0; i < rest.clauses().size(); ++i) {
        s += (i == 0 ? " when " : " and ") + clause_prose(rest.clauses()[i]);
    }
    return s;
}

std::vector<SubspaceRow> subspace_scores(const Dataset& ds, const SubspaceOptions& options) {
    if (options.max_dim < 1 || options.max_dim > 3) {
        throw Error(ErrorCode::configuration, "subspace dimension must be 1, 2 or 3");
    }
    // numeric targets when any are declared, otherwise every numeric feature
    std::vector<std::size_t> eligible;
    for (auto f : ds.target_features()) {
        if (ds.feature(f).kind == FeatureKind::numeric) eligible.push_back(f);
    }
    if (eligible.empty()) {
        for (std::size_t f = 0; f < ds.feature_count(); ++f) {
            if (ds.feature(f).kind == FeatureKind::numeric) eligible.push_back(f);
        }
    }
    if (eligible.empty()) {
        throw Error(ErrorCode::configuration, "no numeric features to build subspaces from");
    }
    if (eligible.size() > max_features_without_opt_in && !options.allow_many) {
        throw Error(ErrorCode::configuration, std::to_string(eligible.size()) +
                                                  " numeric features; subspace enumeration above " +
                                                  std::to_string(max_features_without_opt_in) + " needs an opt-in");
    }

    std::vector<std::vector<std::size_t>> subsets;
    const std::size_t n = eligible.size();
    for (std::size_t i = 0; i < n; ++i) {
        subsets.push_back({eligible[i]});
    }
    if (options.max_dim >= 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) subsets.push_back({eligible[i], eligible[j]});
    }
    if (options.max_dim >= 3) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) subsets.push_back({eligible[i], eligible[j], eligible[k]});
    }

    std::vector<SubspaceRow> rows(subsets.size());
    parallel_for(subsets.size(), options.workers, [&](std::size_t s) {
        std::vector<std::string> names;
        for (auto f : subsets[s]) names.push_back(ds.feature(f).name);
        const Dataset sub = set_roles(ds, names);
        const ScoreVector sv = score_points(fit_gaussian(sub), sub);
        SubspaceRow row;
        row.features = names;
        row.scores.assign(sv.values().begin(), sv.values().end());
        const double m = std::accumulate(row.scores.begin(), row.scores.end(), 0.0) /
                         static_cast<double>(row.scores.size());
        double var = 0.0;
        for (double x : row.scores) var += (x - m) * (x - m);
        const double sd = std::sqrt(var / static_cast<double>(row.scores.size()));
        row.threshold = m + options.sigmas * sd;
        row.anomalous = static_cast<std::size_t>(
            std::count_if(row.scores.begin(), row.scores.end(), [&](double x) { return x > row.threshold; }));
        rows[s] = std::move(row);
    });
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SubspaceRow& a, const SubspaceRow& b) { return a.anomalous > b.anomalous; });
    return rows;
}

Json chart_spec(const Histogram& h) {
    Json j;
    j["type"] = "histogram";
    j["edges"] = h.edges;
    Json series = Json::array();
    for (const auto& s : h.series) {
        Json one;
        one["label"] = s.label;
        one["counts"] = s.counts;
        series.push_back(std::move(one));
    }
    j["series"] = std::move(series);
    return j;
}

Json chart_spec(const PivotView& v, std::string_view measure) {
    Json j;
    j["type"] = "bar";
    j["pivot"] = v.pivot;
    j["filter"] = v.filter ? Json(to_string(*v.filter)) : Json(nullptr);
    j["measure"] = measure;
    Json categories = Json::array();
    Json means = Json::array();
    Json counts = Json::array();
    Json highlighted = Json::array();
    for (const auto& b : v.bars) {
        categories.push_back(b.label);
        means.push_back(real_or_null(b.mean));
        counts.push_back(b.count);
        highlighted.push_back(b.highlighted);
    }
    j["categories"] = std::move(categories);
    Json series = Json::array();
    series.push_back({{"label", std::string("mean ") + std::string(measure)}, {"values", std::move(means)}});
    j["series"] = std::move(series);
    j["counts"] = std::move(counts);
    j["highlighted"] = std::move(highlighted);
    return j;
}

Json to_json(const Recommendation& rec) {
    Json j;
    j["attribute"] = rec.attribute;
    j["r"] = real_or_null(rec.r);
    j["direction"] = to_string(rec.direction);
    j["sentence"] = rec.sentence;
    j["chart"] = chart_spec(rec.chart, rec.attribute);
    return j;
}

Json to_json(const SubspaceRow& row) {
    Json j;
    j["features"] = row.features;
    j["threshold"] = real_or_null(row.threshold);
    j["anomalous"] = row.anomalous;
    Json scores = Json::array();
    for (double s : row.scores) scores.push_back(real_or_null(s));
    j["scores"] = std::move(scores);
    return j;
}

Report build_report(const ExplainResult& result, const std::vector<Bookmark>& bookmarks) {
    if (result.explanations.empty()) {
        throw Error(ErrorCode::no_explanation, "a report needs at least one explanation");
    }
    Report rep;
    rep.data = to_json(result);
    Json evidence = Json::array();
    for (const auto& b : bookmarks) {
        evidence.push_back({{"title", b.title}, {"sentence", b.sentence}, {"chart", b.chart}});
    }
    rep.data["evidence"] = std::move(evidence);

    std::ostringstream md;
    md << "# Anomaly explanation report\n\n";
    md << markdown_summary(result).substr(std::string("# Explanations\n\n").size());
    if (!bookmarks.empty()) {
        md << "\n## Evidence\n";
        for (std::size_t i = 0; i < bookmarks.size(); ++i) {
            const auto& b = bookmarks[i];
            md << "\n### " << (i + 1) << ". " << (b.title.empty() ? "Bookmark" : b.title) << "\n\n";
            if (!b.sentence.empty()) {
                md << b.sentence << "\n\n";
            }
            md << "```json\n" << b.chart.dump(2) << "\n```\n";
        }
    }
    rep.markdown = md.str();
    return rep;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream md(dir / "report.md", std::ios::binary);
    md << report.markdown;
    std::ofstream js(dir / "report.json", std::ios::binary);
    js << report.data.dump(2) << '\n';
    if (!md || !js) {
        throw Error(ErrorCode::configuration, "could not write report files to " + dir.string());
    }
}

} // namespace predex
