#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "predex/error.hpp"
#include "predex/scoring.hpp"

using namespace predex;

namespace {

Dataset targets_of(const char* csv, std::vector<std::string> names) { return set_roles(read_csv(csv), names); }

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::usage;
}

} // namespace

TEST_CASE("gaussian fit") {
    const auto ds = targets_of("v\n0\n0\n0\n10\n", {"v"});
    const auto m = fit_gaussian(ds);
    CHECK(m.mean(0) == doctest::Approx(2.5));
    // sample covariance with n - 1: sum of squares 75 / 3
    CHECK(m.covariance(0, 0) == doctest::Approx(25.0 + 1e-6 * 25.0));
    const auto sv = score_points(m, ds);
    CHECK(sv.provenance() == ScoreProvenance::gaussian_nll);
    CHECK(sv[3] > sv[0]);
    // direct evaluation of the negative log density
    const double var = m.covariance(0, 0);
    const double expect = 0.5 * (10 - 2.5) * (10 - 2.5) / var + 0.5 * std::log(var) + 0.5 * std::log(2 * std::numbers::pi);
    CHECK(sv[3] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gaussian scores are minimal at the mean and follow Mahalanobis order") {
    const auto ds = targets_of("x,y\n0,0\n1,1\n2,2\n1,0\n0,1\n1,1\n1,1\n5,-3\n", {"x", "y"});
    const auto m = fit_gaussian(ds);
    const auto sv = score_points(m, ds);
    const Eigen::MatrixXd inv = m.covariance.inverse();
    double best = -1.0;
    std::size_t far = 0;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        Eigen::Vector2d x(ds.column(0).values[r], ds.column(1).values[r]);
        const double d = (x - m.mean).dot(inv * (x - m.mean));
        if (d > best) {
            best = d;
            far = r;
        }
    }
    CHECK(std::max_element(sv.values().begin(), sv.values().end()) - sv.values().begin() == static_cast<long>(far));
    // a point exactly at the mean scores below every row
    const double at_mean = 0.5 * std::log(m.covariance.determinant()) + std::log(2 * std::numbers::pi);
    for (double s : sv.values()) CHECK(s >= at_mean - 1e-12);
}

TEST_CASE("constant target stays regular") {
    const auto ds = targets_of("v\n122.153\n122.153\n122.153\n", {"v"});
    const auto sv = score_points(fit_gaussian(ds), ds);
    for (double s : sv.values()) CHECK(std::isfinite(s));
    const auto zeros = targets_of("v\n0\n0\n", {"v"});
    CHECK(std::isfinite(score_points(fit_gaussian(zeros), zeros)[0]));
}

TEST_CASE("gaussian fit errors") {
    CHECK(code_of([] { fit_gaussian(read_csv("v\n1\n2\n")); }) == ErrorCode::configuration);
    CHECK(code_of([] { fit_gaussian(targets_of("c\na\nb\n", {"c"})); }) == ErrorCode::configuration);
    CHECK(code_of([] { fit_gaussian(targets_of("v\n1\n", {"v"})); }) == ErrorCode::insufficient_data);
}

TEST_CASE("missing target values get the maximum score and a flag") {
    const auto ds = targets_of("v\n1\n2\nNA\n9\n", {"v"});
    const auto sv = score_points(fit_gaussian(ds), ds);
    CHECK(sv.flagged() == std::vector<std::uint32_t>{2});
    CHECK(sv[2] == sv[3]);
}

TEST_CASE("duplicating a row never raises its rank") {
    const auto base = targets_of("v\n1\n2\n3\n10\n", {"v"});
    const auto dup = targets_of("v\n1\n2\n3\n10\n10\n", {"v"});
    auto rank = [](const ScoreVector& sv, std::size_t row) {
        std::size_t above = 0;
        for (double s : sv.values()) above += s > sv[row];
        return above;
    };
    CHECK(rank(score_points(fit_gaussian(dup), dup), 3) >= rank(score_points(fit_gaussian(base), base), 3));
}

TEST_CASE("import from a column") {
    auto [ds, sv] = import_scores(read_csv("city,score\na,1.5\nb,2\n"), "score");
    CHECK(sv.values()[1] == 2.0);
    CHECK(ds.feature(1).role == FeatureRole::target);
    CHECK(ds.context_features() == std::vector<std::size_t>{0});
    CHECK(code_of([] { import_scores(read_csv("c,s\na,x\n"), "s"); }) == ErrorCode::import);
}

TEST_CASE("import from a side file") {
    const auto ds = read_csv("x\n1\n2\n3\n");
    CHECK(import_scores_text(ds, "0.5\n1\n2.5\n").values()[2] == 2.5);
    const auto csv = import_scores_text(ds, "row_id,score\n2,9\n0,1\n1,4\n");
    CHECK(csv.values()[0] == 1.0);
    CHECK(csv.values()[2] == 9.0);
    CHECK(code_of([&] { import_scores_text(ds, "1\n2\n"); }) == ErrorCode::import);
    CHECK(code_of([&] { import_scores_text(ds, "1\nNaN\n3\n"); }) == ErrorCode::import);
    CHECK(code_of([&] { import_scores_text(ds, "1\ninf\n3\n"); }) == ErrorCode::import);
    const auto flipped = import_scores_text(ds, "1\n2\n3\n", {false, false});
    CHECK(flipped.values()[0] > flipped.values()[2]);
    const auto shifted = import_scores_text(ds, "-1\n2\n3\n", {true, true});
    CHECK(shifted.values()[0] == 0.0);
    CHECK(shifted.values()[2] == 4.0);
    CHECK(write_scores_csv(csv) == "row_id,score\n0,1\n1,4\n2,9\n");
}

TEST_CASE("likelihood influence on the fixture") {
    const auto f = testing::t1();
    const std::vector<std::uint32_t> boston = {0, 1}, rest = {2, 3, 4, 5};
    const auto sb = RowSet::from_rows(6, boston);
    CHECK(likelihood_influence(f.sv, sb) == doctest::Approx(8.5).epsilon(1e-12));
    CHECK(likelihood_influence(f.sv, sb, Strictness(0.5)) == doctest::Approx(17.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(likelihood_influence(f.sv, RowSet::from_rows(6, rest)) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(code_of([&] { likelihood_influence(f.sv, RowSet(6)); }) == ErrorCode::undefined_influence);
    CHECK_THROWS_AS(Strictness(0.0), Error);
    CHECK_THROWS_AS(Strictness(1.5), Error);
}

TEST_CASE("aggregate influence") {
    const std::vector<double> v = {1, 1, 1, 9};
    const std::vector<std::uint32_t> last = {3};
    CHECK(aggregate_influence(v, RowSet::from_rows(4, last)) == doctest::Approx(2.0));
    // removing a value equal to the mean changes nothing
    const std::vector<double> w = {1, 3, 5, 3};
    const std::vector<std::uint32_t> mid = {1};
    CHECK(aggregate_influence(w, RowSet::from_rows(4, mid)) == doctest::Approx(0.0));
    CHECK(code_of([&] { aggregate_influence(v, RowSet(4, true)); }) == ErrorCode::undefined_influence);
    CHECK(code_of([&] { aggregate_influence(v, RowSet(4)); }) == ErrorCode::undefined_influence);
}
