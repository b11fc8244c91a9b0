#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>

namespace predex {

enum class Evidence { none_or_bare, substantial, strong, decisive };

const char* to_string(Evidence e);
Evidence evidence_from_string(std::string_view text);

/// Jeffreys bands: [0, 3.2), [3.2, 10), [10, 100), [100, inf].
Evidence classify_evidence(double bf10);

struct BayesResult {
    double bf10 = 1.0;     // +inf when the groups separate with zero variance
    double log_bf10 = 0.0;
    Evidence category = Evidence::none_or_bare;
};

/// Pooled-variance two-sample t. `t` is +/-inf when the pooled variance is zero and the means differ.
struct TwoSampleStat {
    double t = 0.0;
    double dof = 0.0;         // n1 + n2 - 2
    double effective_n = 0.0; // n1 * n2 / (n1 + n2)
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

TwoSampleStat two_sample_stat(std::span<const double> inside, std::span<const double> outside);

/// Count, mean and centered sum of squares of one group.
struct SampleMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    static SampleMoments of(std::span<const double> values);
    /// Moments of the rows of `whole` that are not in `part`, where `part` is a subset of `whole`.
    static SampleMoments remainder(const SampleMoments& whole, const SampleMoments& part);
};

TwoSampleStat two_sample_stat(const SampleMoments& inside, const SampleMoments& outside);

inline constexpr double default_prior_scale = std::numbers::sqrt2 / 2.0;

/// JZS two-sample Bayes factor: Cauchy(0, r) prior on the standardized effect, evaluated by
/// adaptive Gauss-Kronrod quadrature over the mixing variance after g = u / (1 - u).
BayesResult jzs_bayes_factor(const TwoSampleStat& stat, double prior_scale = default_prior_scale);

} // namespace predex
