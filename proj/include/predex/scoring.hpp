#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "predex/dataset.hpp"
#include "predex/row_set.hpp"

namespace predex {

enum class ScoreProvenance { imported, gaussian_nll };

const char* to_string(ScoreProvenance p);

/// One finite anomaly score per row, higher meaning more anomalous.
class ScoreVector {
public:
    ScoreVector() = default;
    ScoreVector(std::vector<double> scores, ScoreProvenance provenance, std::vector<std::uint32_t> flagged = {});

    std::span<const double> values() const noexcept { return scores_; }
    std::size_t size() const noexcept { return scores_.size(); }
    double operator[](std::size_t row) const { return scores_[row]; }
    ScoreProvenance provenance() const noexcept { return provenance_; }
    /// Rows whose score was substituted (missing target values).
    const std::vector<std::uint32_t>& flagged() const noexcept { return flagged_; }

    bool has_negative() const;
    /// Rebases scores so the minimum is 0.
    ScoreVector min_shifted() const;

private:
    std::vector<double> scores_;
    ScoreProvenance provenance_ = ScoreProvenance::imported;
    std::vector<std::uint32_t> flagged_;
};

/// Exponent c in (0, 1] on the selection size.
class Strictness {
public:
    Strictness() = default;
    explicit Strictness(double c);

    double value() const noexcept { return c_; }

private:
    double c_ = 1.0;
};

struct GaussianModel {
    std::vector<std::string> features;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance; // regularized
    double regularization = 0.0;
};

/// Sample mean and covariance over the target features, with 1e-6 * trace / dim on the diagonal.
GaussianModel fit_gaussian(const Dataset& ds);

/// Negative log density under the model; rows with missing target values get the maximum observed
/// score and are flagged.
ScoreVector score_points(const GaussianModel& model, const Dataset& ds);

struct ScoreImportOptions {
    bool higher_is_anomalous = true;
    bool min_shift = false;
};

/// Scores from a numeric column. The column becomes a target so predicates never mention it.
std::pair<Dataset, ScoreVector> import_scores(const Dataset& ds, std::string_view column,
                                              const ScoreImportOptions& options = {});

/// Scores from a side file: one decimal per line, or CSV with a `row_id,score` header.
ScoreVector import_scores_text(const Dataset& ds, std::string_view text, const ScoreImportOptions& options = {});
ScoreVector import_scores_file(const Dataset& ds, const std::filesystem::path& path,
                               const ScoreImportOptions& options = {});

/// `row_id,score` CSV with shortest round-trip decimals.
std::string write_scores_csv(const ScoreVector& sv);

/// Sum of scores over the selection divided by |selection|^c.
double likelihood_influence(std::span<const double> scores, const RowSet& selection, Strictness c = {});
inline double likelihood_influence(const ScoreVector& sv, const RowSet& selection, Strictness c = {}) {
    return likelihood_influence(sv.values(), selection, c);
}

/// Closed form of the above for a precomputed sum and count.
double influence_from_sum(double sum, std::size_t count, Strictness c);

/// (mean(D) - mean(D - p(D))) / |p(D)|.
double aggregate_influence(std::span<const double> values, const RowSet& selection);

} // namespace predex
