#include "predex/bayes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "predex/error.hpp"

namespace predex {

const char* to_string(Evidence e) {
    switch (e) {
    case Evidence::none_or_bare: return "none-or-bare";
    case Evidence::substantial: return "substantial";
    case Evidence::strong: return "strong";
    case Evidence::decisive: return "decisive";
    }
    return "none-or-bare";
}

Evidence evidence_from_string(std::string_view text) {
    if (text == "substantial") return Evidence::substantial;
    if (text == "strong") return Evidence::strong;
    if (text == "decisive") return Evidence::decisive;
    if (text == "none-or-bare") return Evidence::none_or_bare;
    throw Error(ErrorCode::configuration, "unknown evidence category '" + std::string(text) + "'");
}

Evidence classify_evidence(double bf10) {
    if (bf10 >= 100.0) return Evidence::decisive;
    if (bf10 >= 10.0) return Evidence::strong;
    if (bf10 >= 3.2) return Evidence::substantial;
    return Evidence::none_or_bare;
}

SampleMoments SampleMoments::of(std::span<const double> values) {
    SampleMoments m;
    m.n = values.size();
    if (m.n == 0) {
        return m;
    }
    double s = 0.0;
    for (double x : values) s += x;
    m.mean = s / static_cast<double>(m.n);
    for (double x : values) m.m2 += (x - m.mean) * (x - m.mean);
    return m;
}

SampleMoments SampleMoments::remainder(const SampleMoments& whole, const SampleMoments& part) {
    SampleMoments rest;
    rest.n = whole.n - part.n;
    if (rest.n == 0) {
        return rest;
    }
    const auto n = static_cast<double>(whole.n);
    const auto n_in = static_cast<double>(part.n);
    const auto n_out = static_cast<double>(rest.n);
    rest.mean = (n * whole.mean - n_in * part.mean) / n_out;
    const double delta = part.mean - rest.mean;
    rest.m2 = std::max(0.0, whole.m2 - part.m2 - delta * delta * n_in * n_out / n);
    return rest;
}

TwoSampleStat two_sample_stat(const SampleMoments& inside, const SampleMoments& outside) {
    if (inside.n < 2 || outside.n < 2) {
        throw Error(ErrorCode::insufficient_data, "two-sample test needs at least 2 values per group, got " +
                                                      std::to_string(inside.n) + " and " +
                                                      std::to_string(outside.n));
    }
    TwoSampleStat st;
    st.n1 = inside.n;
    st.n2 = outside.n;
    const auto n1 = static_cast<double>(st.n1);
    const auto n2 = static_cast<double>(st.n2);
    st.dof = n1 + n2 - 2.0;
    st.effective_n = n1 * n2 / (n1 + n2);
    const double pooled = (inside.m2 + outside.m2) / st.dof;
    if (pooled == 0.0) {
        st.t = inside.mean == outside.mean
                   ? 0.0
                   : std::copysign(std::numeric_limits<double>::infinity(), inside.mean - outside.mean);
        return st;
    }
    st.t = (inside.mean - outside.mean) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    return st;
}

TwoSampleStat two_sample_stat(std::span<const double> inside, std::span<const double> outside) {
    return two_sample_stat(SampleMoments::of(inside), SampleMoments::of(outside));
}

namespace {

// Log of the H1/H0 integrand over the mixing variance g (inverse-chi-square(1) prior on g).
struct LogIntegrand {
    double t2;
    double nu;
    double n_r2;
    double null_term; // (nu + 1) / 2 * log(1 + t^2 / nu)

    double operator()(double g) const {
        const double a = 1.0 + n_r2 * g;
        return -0.5 * std::log(a) - 0.5 * (nu + 1.0) * std::log1p(t2 / (a * nu)) + null_term -
               0.5 * std::log(2.0 * std::numbers::pi) - 1.5 * std::log(g) - 0.5 / g;
    }
};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> xgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gauss_kronrod(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * wgk[7];
    double gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[static_cast<std::size_t>(j)];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += wgk[static_cast<std::size_t>(j)] * fsum;
        if (j % 2 == 1) {
            gauss += wg[static_cast<std::size_t>(j / 2)] * fsum;
        }
    }
    return Segment{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

constexpr double relative_tolerance = 1e-10;
constexpr std::size_t max_segments = 4000;

} // namespace

BayesResult jzs_bayes_factor(const TwoSampleStat& stat, double prior_scale) {
    if (!(prior_scale > 0.0) || !std::isfinite(prior_scale)) {
        throw Error(ErrorCode::configuration, "prior scale must be positive");
    }
    if (!(stat.dof >= 1.0) || !(stat.effective_n > 0.0) || std::isnan(stat.t)) {
        throw Error(ErrorCode::insufficient_data, "invalid two-sample statistic");
    }
    BayesResult out;
    if (std::isinf(stat.t)) {
        out.bf10 = std::numeric_limits<double>::infinity();
        out.log_bf10 = std::numeric_limits<double>::infinity();
        out.category = Evidence::decisive;
        return out;
    }

    const double t2 = stat.t * stat.t;
    const LogIntegrand log_f{t2, stat.dof, stat.effective_n * prior_scale * prior_scale,
                             0.5 * (stat.dof + 1.0) * std::log1p(t2 / stat.dof)};
    auto g_of = [](double u) { return u / (1.0 - u); };
    auto u_of = [](double g) { return g / (1.0 + g); };
    // Log of the integrand after the change of variables, dg = du / (1 - u)^2.
    auto log_h = [&](double u) { return log_f(g_of(u)) - 2.0 * std::log1p(-u); };

    // Locate the mode on a log-g grid to scale the integrand and seed the partition.
    double best_log = -std::numeric_limits<double>::infinity();
    double best_g = 1.0;
    for (double k = -12.0; k <= 60.0; k += 0.125) {
        const double g = std::exp(k);
        const double u = u_of(g);
        if (!(u > 0.0 && u < 1.0)) {
            continue;
        }
        const double v = log_h(u);
        if (v > best_log) {
            best_log = v;
            best_g = g;
        }
    }
    const double scale = best_log;
    auto h = [&](double u) {
        if (u <= 0.0 || u >= 1.0) {
            return 0.0;
        }
        return std::exp(log_h(u) - scale);
    };

    std::vector<double> breaks = {0.0, 1.0};
    for (double m : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3}) {
        const double u = u_of(best_g * m);
        if (u > 0.0 && u < 1.0) {
            breaks.push_back(u);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::priority_queue<Segment> segments;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const auto s = gauss_kronrod(h, breaks[i], breaks[i + 1]);
        total += s.value;
        total_error += s.error;
        segments.push(s);
    }
    while (total_error > relative_tolerance * std::abs(total)) {
        if (segments.size() >= max_segments) {
            throw NumericalError(total_error / std::abs(total),
                                 "JZS quadrature did not converge; relative residual " +
                                     std::to_string(total_error / std::abs(total)));
        }
        const Segment worst = segments.top();
        segments.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = gauss_kronrod(h, worst.a, mid);
        const auto right = gauss_kronrod(h, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        segments.push(left);
        segments.push(right);
    }
    if (!(total > 0.0)) {
        throw NumericalError(total_error, "JZS quadrature produced a non-positive marginal likelihood");
    }
    out.log_bf10 = scale + std::log(total);
    out.bf10 = std::exp(out.log_bf10);
    out.category = classify_evidence(out.bf10);
    return out;
}

} // namespace predex
