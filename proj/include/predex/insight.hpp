#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "predex/dataset.hpp"
#include "predex/predicate.hpp"
#include "predex/scoring.hpp"
#include "predex/search.hpp"
#include "predex/serialize.hpp"

namespace predex {

struct HistogramSeries {
    std::string label;
    std::vector<std::size_t> counts;
};

/// Score histograms sharing one set of equal-width edges over the global score range.
struct Histogram {
    std::vector<double> edges;
    std::vector<HistogramSeries> series;
};

inline constexpr std::size_t default_histogram_bins = 40;

Histogram score_histogram(const ScoreVector& sv, const std::vector<std::pair<std::string, RowSet>>& selections,
                          std::size_t bins = default_histogram_bins);

struct PivotBar {
    std::string label;
    /// Bin bounds for numeric and datetime pivots; NaN for categorical values.
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double mean = 0.0;
    bool highlighted = false;
};

struct PivotView {
    std::string pivot;
    FeatureKind kind = FeatureKind::categorical;
    /// The predicate without its pivot clause; nullopt when nothing remains.
    std::optional<Conjunction> filter;
    std::size_t filtered_rows = 0;
    std::vector<PivotBar> bars;
};

/// Mean score per pivot value (or bin) over the rows matching the rest of the predicate.
PivotView pivot_view(const Dataset& ds, const ScoreVector& sv, const Predicate& pred, std::string_view pivot,
                     const BinningSpec& binning = {});

enum class Direction { high, low };
const char* to_string(Direction d);

struct Recommendation {
    std::string attribute;
    double r = 0.0;
    Direction direction = Direction::high;
    std::string sentence;
    /// Mean of the attribute per pivot value over the filtered rows.
    PivotView chart;
};

inline constexpr double recommendation_threshold = 0.3;

/// Attributes whose Pearson correlation with the score over the filtered rows exceeds the
/// threshold in magnitude, strongest first.
std::vector<Recommendation> recommend(const Dataset& ds, const ScoreVector& sv, const Predicate& pred,
                                      std::string_view pivot, const BinningSpec& binning = {});

std::string render_sentence(const Recommendation& rec, const Predicate& pred, std::string_view pivot);

/// "{feature} is ..." prose for one clause.
std::string clause_prose(const Clause& clause);

struct SubspaceRow {
    std::vector<std::string> features;
    std::vector<double> scores;
    double threshold = 0.0;
    std::size_t anomalous = 0;
};

struct SubspaceOptions {
    std::size_t max_dim = 3;
    bool allow_many = false; // required above max_features_without_opt_in
    std::size_t workers = 1;
    double sigmas = 3.0;
};

inline constexpr std::size_t max_features_without_opt_in = 12;

/// Gaussian scores for every subset of up to max_dim numeric features, most anomalous rows first.
std::vector<SubspaceRow> subspace_scores(const Dataset& ds, const SubspaceOptions& options = {});

struct Bookmark {
    std::string title;
    std::string sentence;
    Json chart;
};

struct Report {
    std::string markdown;
    Json data;
};

Report build_report(const ExplainResult& result, const std::vector<Bookmark>& bookmarks);
/// Writes report.md and report.json into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

Json chart_spec(const Histogram& h);
Json chart_spec(const PivotView& v, std::string_view measure);
Json to_json(const Recommendation& rec);
Json to_json(const SubspaceRow& row);

} // namespace predex
