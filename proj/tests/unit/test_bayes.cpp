#include <doctest.h>

#include <cmath>
#include <limits>

#include "jzs_oracle.hpp"
#include "predex/bayes.hpp"
#include "predex/error.hpp"

using namespace predex;

TEST_CASE("pooled two-sample t") {
    const std::vector<double> in = {9, 8, 7}, out = {1, 1, 1};
    const auto st = two_sample_stat(in, out);
    CHECK(st.t == doctest::Approx(7.0 / std::sqrt(0.5 * (2.0 / 3.0))));
    CHECK(st.t == doctest::Approx(12.124).epsilon(1e-4));
    CHECK(st.dof == 4.0);
    CHECK(st.effective_n == 1.5);
    CHECK(two_sample_stat(in, in).t == 0.0);
    const std::vector<double> one = {5};
    CHECK_THROWS_AS(two_sample_stat(one, out), Error);
}

TEST_CASE("zero pooled variance") {
    const std::vector<double> a = {2, 2}, b = {1, 1, 1};
    const auto st = two_sample_stat(a, b);
    CHECK(st.t == std::numeric_limits<double>::infinity());
    const auto bf = jzs_bayes_factor(st);
    CHECK(bf.bf10 == std::numeric_limits<double>::infinity());
    CHECK(bf.category == Evidence::decisive);
    CHECK(two_sample_stat(b, b).t == 0.0);
}

TEST_CASE("moments remainder matches direct computation") {
    const std::vector<double> all = {1, 4, 2, 8, 5, 7};
    const std::vector<double> part = {4, 8}, rest = {1, 2, 5, 7};
    const auto r = SampleMoments::remainder(SampleMoments::of(all), SampleMoments::of(part));
    const auto d = SampleMoments::of(rest);
    CHECK(r.n == d.n);
    CHECK(r.mean == doctest::Approx(d.mean));
    CHECK(r.m2 == doctest::Approx(d.m2));
}

TEST_CASE("bayes factor against the Monte Carlo oracle") {
    TwoSampleStat zero{0.0, 10.0, 3.0, 0, 0};
    const double b0 = jzs_bayes_factor(zero).bf10;
    CHECK(b0 < 1.0);
    CHECK(b0 == doctest::Approx(testing::monte_carlo_bf10(0.0, 10.0, 3.0, 200'000, 5)).epsilon(0.02));

    const std::vector<double> in = {9, 8, 7}, out = {1, 1, 1};
    const auto st = two_sample_stat(in, out);
    const auto bf = jzs_bayes_factor(st);
    // only 4 degrees of freedom, so a t of 12 is strong rather than decisive
    CHECK(bf.bf10 > 10.0);
    CHECK(bf.bf10 < 100.0);
    CHECK(bf.category == Evidence::strong);
    CHECK(bf.bf10 == doctest::Approx(testing::monte_carlo_bf10(st.t, st.dof, st.effective_n, 200'000, 6)).epsilon(0.03));
    CHECK(bf.log_bf10 == doctest::Approx(std::log(bf.bf10)).epsilon(1e-12));
}

TEST_CASE("prior scale changes the answer") {
    TwoSampleStat st{2.0, 20.0, 5.0, 0, 0};
    const double narrow = jzs_bayes_factor(st, 0.5).bf10;
    const double wide = jzs_bayes_factor(st, 1.0).bf10;
    CHECK(narrow != wide);
    CHECK(wide == doctest::Approx(testing::monte_carlo_bf10(2.0, 20.0, 5.0, 200'000, 7, 1.0)).epsilon(0.02));
    CHECK_THROWS_AS(jzs_bayes_factor(st, 0.0), Error);
}

TEST_CASE("very large t stays finite in log space") {
    TwoSampleStat st{60.0, 2000.0, 400.0, 0, 0};
    const auto bf = jzs_bayes_factor(st);
    CHECK(std::isfinite(bf.log_bf10));
    CHECK(bf.log_bf10 > 100.0);
    CHECK(bf.category == Evidence::decisive);
}

TEST_CASE("evidence bands") {
    CHECK(classify_evidence(1.0) == Evidence::none_or_bare);
    CHECK(classify_evidence(3.2) == Evidence::substantial);
    CHECK(classify_evidence(9.99) == Evidence::substantial);
    CHECK(classify_evidence(10.0) == Evidence::strong);
    CHECK(classify_evidence(100.0) == Evidence::decisive);
    CHECK(classify_evidence(std::numeric_limits<double>::infinity()) == Evidence::decisive);
    CHECK(std::string(to_string(Evidence::none_or_bare)) == "none-or-bare");
    CHECK(evidence_from_string("strong") == Evidence::strong);
}
