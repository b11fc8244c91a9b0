#include "predex/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "predex/error.hpp"
#include "predex/text.hpp"

namespace predex {

const char* to_string(ScoreProvenance p) {
    return p == ScoreProvenance::gaussian_nll ? "gaussian-nll" : "imported";
}

ScoreVector::ScoreVector(std::vector<double> scores, ScoreProvenance provenance, std::vector<std::uint32_t> flagged)
    : scores_(std::move(scores)), provenance_(provenance), flagged_(std::move(flagged)) {
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (!std::isfinite(scores_[i])) {
            throw Error(ErrorCode::import, "score for row " + std::to_string(i) + " is not finite");
        }
    }
}

bool ScoreVector::has_negative() const {
    return std::any_of(scores_.begin(), scores_.end(), [](double s) { return s < 0.0; });
}

ScoreVector ScoreVector::min_shifted() const {
    if (scores_.empty()) {
        return *this;
    }
    const double lo = *std::min_element(scores_.begin(), scores_.end());
    auto shifted = scores_;
    for (auto& s : shifted) {
        s -= lo;
    }
    return ScoreVector(std::move(shifted), provenance_, flagged_);
}

Strictness::Strictness(double c) : c_(c) {
    if (!(c > 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::configuration, "strictness must lie in (0, 1], got " + format_real(c));
    }
}

namespace {

std::vector<std::size_t> numeric_targets(const Dataset& ds) {
    std::vector<std::size_t> out;
    for (std::size_t f : ds.target_features()) {
        if (ds.feature(f).kind == FeatureKind::numeric) {
            out.push_back(f);
        }
    }
    return out;
}

bool row_complete(const Dataset& ds, std::span<const std::size_t> features, std::size_t row) {
    return std::none_of(features.begin(), features.end(), [&](std::size_t f) { return ds.column(f).is_missing(row); });
}

} // namespace

GaussianModel fit_gaussian(const Dataset& ds) {
    const auto features = numeric_targets(ds);
    if (features.empty()) {
        throw Error(ErrorCode::configuration, "the Gaussian scorer needs at least one numeric target feature");
    }
    const auto d = static_cast<Eigen::Index>(features.size());
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (row_complete(ds, features, r)) {
            rows.push_back(r);
        }
    }
    if (rows.size() < 2) {
        throw Error(ErrorCode::insufficient_data, "the Gaussian scorer needs at least 2 complete rows");
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            x(i, j) = ds.column(features[static_cast<std::size_t>(j)]).values[rows[static_cast<std::size_t>(i)]];
        }
    }
    GaussianModel model;
    for (auto f : features) {
        model.features.push_back(ds.feature(f).name);
    }
    model.mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
    model.covariance = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
    model.regularization = 1e-6 * model.covariance.trace() / static_cast<double>(d);
    if (!(model.regularization > 0.0)) {
        // Every target is constant; fall back to an absolute floor.
        model.regularization = 1e-6;
    }
    model.covariance.diagonal().array() += model.regularization;
    return model;
}

ScoreVector score_points(const GaussianModel& model, const Dataset& ds) {
    std::vector<std::size_t> features;
    for (const auto& name : model.features) {
        const auto f = ds.index_of(name);
        if (ds.feature(f).kind != FeatureKind::numeric) {
            throw Error(ErrorCode::schema, "feature '" + name + "' is not numeric");
        }
        features.push_back(f);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(model.covariance);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::numerical, "covariance is not positive definite");
    }
    const auto d = static_cast<Eigen::Index>(features.size());
    const Eigen::MatrixXd l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const double constant = 0.5 * log_det + 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);

    std::vector<double> scores(ds.row_count(), 0.0);
    std::vector<std::uint32_t> flagged;
    double max_score = -HUGE_VAL;
    Eigen::VectorXd x(d);
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (!row_complete(ds, features, r)) {
            flagged.push_back(static_cast<std::uint32_t>(r));
            continue;
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            x(j) = ds.column(features[static_cast<std::size_t>(j)]).values[r] - model.mean(j);
        }
        const Eigen::VectorXd z = llt.matrixL().solve(x);
        scores[r] = 0.5 * z.squaredNorm() + constant;
        max_score = std::max(max_score, scores[r]);
    }
    if (flagged.size() == ds.row_count() && !flagged.empty()) {
        throw Error(ErrorCode::insufficient_data, "no row has complete target values");
    }
    for (auto r : flagged) {
        scores[r] = max_score;
    }
    return ScoreVector(std::move(scores), ScoreProvenance::gaussian_nll, std::move(flagged));
}

namespace {

ScoreVector finish_import(std::vector<double> scores, const ScoreImportOptions& options) {
    if (!options.higher_is_anomalous) {
        for (auto& s : scores) {
            s = -s;
        }
    }
    ScoreVector sv(std::move(scores), ScoreProvenance::imported);
    return options.min_shift ? sv.min_shifted() : sv;
}

} // namespace

std::pair<Dataset, ScoreVector> import_scores(const Dataset& ds, std::string_view column,
                                              const ScoreImportOptions& options) {
    const auto f = ds.index_of(column);
    const Column& col = ds.column(f);
    if (col.kind != FeatureKind::numeric) {
        throw Error(ErrorCode::import, "score column '" + std::string(column) + "' is not numeric");
    }
    for (std::size_t r = 0; r < col.values.size(); ++r) {
        if (!std::isfinite(col.values[r])) {
            throw Error(ErrorCode::import, "score column has a missing value at row " + std::to_string(r));
        }
    }
    auto schema = ds.schema();
    schema[f].role = FeatureRole::target;
    return {ds.with_schema(std::move(schema)), finish_import(col.values, options)};
}

ScoreVector import_scores_text(const Dataset& ds, std::string_view text, const ScoreImportOptions& options) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!line.empty()) {
            lines.push_back(line);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }

    std::vector<double> scores;
    const bool keyed = !lines.empty() && lines.front().find(',') != std::string_view::npos;
    if (keyed) {
        const auto header = lines.front();
        const auto comma = header.find(',');
        if (trim(header.substr(0, comma)) != "row_id" || trim(header.substr(comma + 1)) != "score") {
            throw Error(ErrorCode::import, "score CSV must have a 'row_id,score' header");
        }
        scores.assign(ds.row_count(), HUGE_VAL);
        std::vector<char> seen(ds.row_count(), 0);
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto c = lines[i].find(',');
            const auto id = c == std::string_view::npos ? std::nullopt : parse_real(trim(lines[i].substr(0, c)));
            const auto v = c == std::string_view::npos ? std::nullopt : parse_real(trim(lines[i].substr(c + 1)));
            if (!id || *id < 0 || *id != std::floor(*id) || *id >= static_cast<double>(ds.row_count())) {
                throw Error(ErrorCode::import, "line " + std::to_string(i + 1) + ": invalid row_id");
            }
            const auto row = static_cast<std::size_t>(*id);
            if (!v) {
                throw Error(ErrorCode::import, "row " + std::to_string(row) + ": score is not a finite number");
            }
            if (seen[row]) {
                throw Error(ErrorCode::import, "row " + std::to_string(row) + " scored twice");
            }
            seen[row] = 1;
            scores[row] = *v;
        }
        if (lines.size() - 1 != ds.row_count()) {
            throw Error(ErrorCode::import, "expected " + std::to_string(ds.row_count()) + " scores, found " +
                                               std::to_string(lines.size() - 1));
        }
    } else {
        if (lines.size() != ds.row_count()) {
            throw Error(ErrorCode::import, "expected " + std::to_string(ds.row_count()) + " scores, found " +
                                               std::to_string(lines.size()));
        }
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto v = parse_real(lines[i]);
            if (!v) {
                throw Error(ErrorCode::import, "row " + std::to_string(i) + ": score '" + std::string(lines[i]) +
                                                   "' is not a finite number");
            }
            scores.push_back(*v);
        }
    }
    return finish_import(std::move(scores), options);
}

ScoreVector import_scores_file(const Dataset& ds, const std::filesystem::path& path, const ScoreImportOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::import, "cannot open score file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return import_scores_text(ds, buf.str(), options);
}

std::string write_scores_csv(const ScoreVector& sv) {
    std::string out = "row_id,score\n";
    for (std::size_t i = 0; i < sv.size(); ++i) {
        out += std::to_string(i) + "," + format_real(sv[i]) + "\n";
    }
    return out;
}

double influence_from_sum(double sum, std::size_t count, Strictness c) {
    if (count == 0) {
        throw Error(ErrorCode::undefined_influence, "influence of an empty selection is undefined");
    }
    if (c.value() == 1.0) {
        return sum / static_cast<double>(count);
    }
    return sum / std::pow(static_cast<double>(count), c.value());
}

double likelihood_influence(std::span<const double> scores, const RowSet& selection, Strictness c) {
    return influence_from_sum(selection.sum(scores), selection.count(), c);
}

double aggregate_influence(std::span<const double> values, const RowSet& selection) {
    double all_sum = 0.0;
    std::size_t all_n = 0;
    double in_sum = 0.0;
    std::size_t in_n = 0;
    for (std::size_t r = 0; r < values.size(); ++r) {
        if (std::isnan(values[r])) {
            continue;
        }
        all_sum += values[r];
        ++all_n;
        if (selection.contains(r)) {
            in_sum += values[r];
            ++in_n;
        }
    }
    if (in_n == 0) {
        throw Error(ErrorCode::undefined_influence, "aggregate influence of an empty selection is undefined");
    }
    if (in_n == all_n) {
        throw Error(ErrorCode::undefined_influence, "selection covers every row; the remainder is empty");
    }
    const double mean_all = all_sum / static_cast<double>(all_n);
    const double mean_rest = (all_sum - in_sum) / static_cast<double>(all_n - in_n);
    return (mean_all - mean_rest) / static_cast<double>(in_n);
}

} // namespace predex
