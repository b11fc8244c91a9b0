// Intel Berkeley lab sensor case. Reads the public data.txt (whitespace separated:
// date time epoch moteid temperature humidity light voltage) from PREDEX_INTEL_DATA, the first
// argument, or tests/data/intel_lab.txt. Exits with 77 (skipped) when the file is absent.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "predex/datetime.hpp"
#include "predex/search.hpp"

using namespace predex;

namespace {

constexpr int skip_code = 77;
constexpr std::size_t sample_rows = 50'000;

std::filesystem::path locate(int argc, char** argv) {
    if (argc > 1) return argv[1];
    if (const char* env = std::getenv("PREDEX_INTEL_DATA")) return env;
    return std::filesystem::path(PREDEX_SOURCE_DIR) / "tests" / "data" / "intel_lab.txt";
}

} // namespace

int main(int argc, char** argv) {
    const auto path = locate(argc, argv);
    std::ifstream in(path);
    if (!in) {
        std::printf("criterion 1 (Intel lab reproduction): SKIPPED - data file %s not found\n", path.string().c_str());
        return skip_code;
    }
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string date, time, epoch, mote, temp, hum, light, volt;
        if (!(ls >> date >> time >> epoch >> mote >> temp >> hum >> light >> volt)) continue; // short rows
        std::ostringstream row;
        row << date << ' ' << time.substr(0, 8) << ',' << mote << ',' << temp << ',' << hum << ',' << light << ','
            << volt;
        lines.push_back(row.str());
    }
    // deterministic subsample
    std::mt19937_64 rng(2004);
    std::shuffle(lines.begin(), lines.end(), rng);
    if (lines.size() > sample_rows) lines.resize(sample_rows);
    std::sort(lines.begin(), lines.end());

    std::string csv = "dtime,moteid,temperature,humidity,light,voltage\n";
    for (const auto& l : lines) csv += l + '\n';
    SchemaHints hints;
    hints["moteid"].kind = FeatureKind::categorical;
    const Dataset raw = read_csv(csv, hints);

    const std::vector<std::string> targets = {"temperature"};
    const auto sv = score_points(fit_gaussian(set_roles(raw, targets)), set_roles(raw, targets));
    const Dataset ds = set_roles(raw, {});

    // Brushing stand-in: rows scoring in the top percentile with a high temperature reading.
    std::vector<double> sorted(sv.values().begin(), sv.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double threshold = sorted[sorted.size() * 99 / 100];
    const auto temp = ds.index_of("temperature");
    std::vector<std::uint32_t> marked;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        const double v = ds.column(temp).values[r];
        if (sv[r] >= threshold && v > 100.0) marked.push_back(static_cast<std::uint32_t>(r));
    }

    SearchConfig cfg;
    cfg.workers = 0;
    if (!marked.empty()) cfg.user_anomalies = marked;
    const auto res = explain(ds, sv, cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto& top = res.explanations.front();
    const auto& term = top.predicate.terms().front();
    const auto catalog = build_catalog(ds, cfg.binning);
    const auto* bins = catalog.bins.find(temp);
    const double width = bins && bins->edges.size() > 1 ? bins->edges[1] - bins->edges[0] : 0.0;

    bool match = false;
    if (const auto* c = term.find("temperature"); c && c->is_range()) {
        const auto& r = c->as_range();
        match = r.lo - width <= 122.153 && 122.153 <= r.hi + width;
    }
    const auto day_lo = static_cast<double>(*parse_iso8601("2004-03-02"));
    const double day_hi = day_lo + 86400.0;
    if (const auto* m = term.find("moteid"); m && !m->is_range()) {
        const auto& vals = m->as_member_of().values;
        const bool mote15 = std::find(vals.begin(), vals.end(), "15") != vals.end();
        if (const auto* d = term.find("dtime"); mote15 && d && d->is_range()) {
            match = match || (d->as_range().lo < day_hi && d->as_range().hi >= day_lo);
        }
    }
    const bool pass = match && elapsed < 120.0;
    std::printf("criterion 1 (Intel lab reproduction): %s - top explanation %s, %.1fs\n", pass ? "PASS" : "FAIL",
                to_string(top.predicate).c_str(), elapsed);
    return pass ? 0 : 1;
}
