#include "predex/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "predex/error.hpp"
#include "predex/parallel.hpp"

namespace predex {

const char* to_string(Strategy s) { return s == Strategy::bayes ? "bayes" : "influence"; }

Strategy strategy_from_string(std::string_view text) {
    if (text == "influence") return Strategy::influence;
    if (text == "bayes") return Strategy::bayes;
    throw Error(ErrorCode::configuration, "unknown strategy '" + std::string(text) + "'");
}

std::optional<BayesResult> inside_vs_rest(std::span<const double> scores, const RowSet& selection, double prior_scale) {
    std::vector<double> inside;
    std::vector<double> outside;
    inside.reserve(selection.count());
    for (std::size_t r = 0; r < scores.size(); ++r) {
        (selection.contains(r) ? inside : outside).push_back(scores[r]);
    }
    if (inside.size() < 2 || outside.size() < 2) {
        return std::nullopt;
    }
    return jzs_bayes_factor(two_sample_stat(inside, outside), prior_scale);
}

namespace {

Explanation make_explanation(const Dataset& ds, std::span<const double> scores, const Predicate& pred,
                             const RowSet& selection, Strictness c, Strategy strategy, double prior_scale,
                             std::vector<double> trace) {
    Explanation e(pred);
    e.count = selection.count();
    e.fraction = ds.row_count() == 0 ? 0.0 : static_cast<double>(e.count) / static_cast<double>(ds.row_count());
    e.strictness = c.value();
    e.strategy = strategy;
    e.trace = std::move(trace);
    const double inside_sum = selection.sum(scores);
    e.influence = influence_from_sum(inside_sum, e.count, c);
    e.mean_score_inside = inside_sum / static_cast<double>(e.count);
    if (e.count < scores.size()) {
        double total = 0.0;
        for (double s : scores) total += s;
        e.mean_score_outside = (total - inside_sum) / static_cast<double>(scores.size() - e.count);
    }
    e.bayes = inside_vs_rest(scores, selection, prior_scale);
    return e;
}

} // namespace

Explanation summarize(const Dataset& ds, const ScoreVector& sv, const Predicate& pred, Strictness c, Strategy strategy,
                      double prior_scale) {
    if (sv.size() != ds.row_count()) {
        throw Error(ErrorCode::import, "score vector length does not match the dataset");
    }
    return make_explanation(ds, sv.values(), pred, evaluate(pred, ds), c, strategy, prior_scale, {});
}

// --- base catalog ---------------------------------------------------------------------------

const FeatureBins& BaseCatalog::bins_of(std::size_t feature) const {
    const auto* fb = bins.find(feature);
    if (fb == nullptr) {
        throw Error(ErrorCode::configuration, "feature has no bins");
    }
    return *fb;
}

Clause BaseCatalog::clause_for(const Dataset& ds, std::span<const std::uint32_t> ids) const {
    const Entry& first = entries.at(ids.front());
    const auto& fs = ds.feature(first.feature);
    if (fs.kind == FeatureKind::categorical) {
        if (ids.size() == 1) {
            return first.clause;
        }
        std::vector<std::string> values;
        for (auto id : ids) {
            values.push_back(entries[id].clause.as_member_of().values.front());
        }
        return Clause::member_of(fs.name, std::move(values));
    }
    const FeatureBins& fb = bins_of(first.feature);
    std::size_t lo_bin = first.bin;
    std::size_t hi_bin = first.bin;
    for (auto id : ids) {
        lo_bin = std::min(lo_bin, entries[id].bin);
        hi_bin = std::max(hi_bin, entries[id].bin);
    }
    if (lo_bin == hi_bin) {
        return entries[ids.front()].clause;
    }
    const bool last = hi_bin + 1 == fb.size();
    return Clause::range(fs.name, fb.edges[lo_bin], fb.edges[hi_bin + 1], true, last,
                         fs.kind == FeatureKind::datetime);
}

BaseCatalog build_catalog(const Dataset& ds, const BinningSpec& spec) {
    BaseCatalog cat;
    cat.bins = discretize(ds, spec);
    for (const auto& fb : cat.bins.features) {
        const auto& fs = ds.feature(fb.feature);
        const Column& col = ds.column(fb.feature);
        if (fb.kind == FeatureKind::categorical) {
            std::vector<RowSet> sels(fb.values.size(), RowSet(ds.row_count()));
            for (std::size_t r = 0; r < col.codes.size(); ++r) {
                if (col.codes[r] >= 0) {
                    sels[static_cast<std::size_t>(col.codes[r])].insert(r);
                }
            }
            for (std::size_t b = 0; b < fb.values.size(); ++b) {
                cat.entries.push_back({fb.feature, b, Clause::equals(fs.name, fb.values[b]), std::move(sels[b])});
            }
            continue;
        }
        const bool dt = fb.kind == FeatureKind::datetime;
        std::vector<RowSet> sels(fb.size(), RowSet(ds.row_count()));
        for (std::size_t r = 0; r < col.values.size(); ++r) {
            if (auto b = fb.bin_of(col.values[r])) {
                sels[*b].insert(r);
            }
        }
        for (std::size_t b = 0; b < fb.size(); ++b) {
            const double lo = fb.edges[b];
            const double hi = fb.edges[b + 1];
            const bool last = b + 1 == fb.size();
            Clause clause = lo == hi ? Clause::range(fs.name, lo, hi, true, true, dt)
                                     : Clause::range(fs.name, lo, hi, true, last, dt);
            cat.entries.push_back({fb.feature, b, std::move(clause), std::move(sels[b])});
        }
    }
    return cat;
}

// --- candidates -----------------------------------------------------------------------------

bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.influence != b.influence) return a.influence > b.influence;
    if (a.conj.size() != b.conj.size()) return a.conj.size() < b.conj.size();
    if (a.count != b.count) return a.count < b.count;
    return a.key < b.key;
}

bool CandidatePool::insert(Candidate c) {
    if (keys_.count(c.key) != 0) {
        return false;
    }
    keys_.emplace(c.key, items_.size());
    items_.push_back(std::move(c));
    return true;
}

const Candidate& CandidatePool::best() const {
    if (items_.empty()) {
        throw Error(ErrorCode::no_explanation, "candidate pool is empty");
    }
    return *std::min_element(items_.begin(), items_.end(), ranks_before);
}

SearchContext::SearchContext(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg)
    : ds_(ds), sv_(sv), cfg_(cfg) {
    if (sv.size() != ds.row_count()) {
        throw Error(ErrorCode::import, "score vector has " + std::to_string(sv.size()) + " entries for " +
                                           std::to_string(ds.row_count()) + " rows");
    }
    if (cfg.max_iterations < 1) {
        throw Error(ErrorCode::configuration, "max iterations must be at least 1");
    }
    if (cfg.max_explanations < 1) {
        throw Error(ErrorCode::configuration, "max explanations must be at least 1");
    }
    if (ds.context_features().empty()) {
        throw Error(ErrorCode::configuration, "no context features to build predicates from");
    }
    if (cfg.user_anomalies) {
        RowSet rows(ds.row_count());
        for (auto r : *cfg.user_anomalies) {
            if (r >= ds.row_count()) {
                throw Error(ErrorCode::configuration, "user anomaly row " + std::to_string(r) + " is out of range");
            }
            rows.insert(r);
        }
        if (rows.empty()) {
            throw Error(ErrorCode::configuration, "user anomaly set is empty");
        }
        user_rows_ = std::move(rows);
    }
    catalog_ = build_catalog(ds, cfg.binning);
    warnings_ = catalog_.bins.warnings;
    if (sv.has_negative()) {
        warnings_.push_back("scores contain negative values; influence assumes higher scores are more anomalous");
    }
}

double SearchContext::influence_of(const RowSet& selection) const {
    return likelihood_influence(scores(), selection, cfg_.strictness);
}

std::optional<Candidate> SearchContext::make_candidate(std::vector<std::uint32_t> ids, RowSet selection) const {
    Candidate c;
    c.selection = std::move(selection);
    c.count = c.selection.count();
    if (c.count == 0) {
        return std::nullopt;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::size_t i = 0;
    while (i < ids.size()) {
        std::size_t j = i;
        const auto feature = catalog_.entries[ids[i]].feature;
        while (j < ids.size() && catalog_.entries[ids[j]].feature == feature) {
            ++j;
        }
        c.conj.add(catalog_.clause_for(ds_, std::span(ids).subspan(i, j - i)));
        i = j;
    }
    c.base_ids = std::move(ids);
    c.score_sum = c.selection.sum(scores());
    c.influence = influence_from_sum(c.score_sum, c.count, cfg_.strictness);
    c.key = canonical_key(c.conj);
    return c;
}

std::optional<Candidate> SearchContext::make_candidate(std::vector<std::uint32_t> ids) const {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    RowSet sel(ds_.row_count(), true);
    std::size_t i = 0;
    while (i < ids.size()) {
        const auto feature = catalog_.entries[ids[i]].feature;
        RowSet part(ds_.row_count());
        std::uint32_t lo = ids[i];
        std::uint32_t hi = ids[i];
        while (i < ids.size() && catalog_.entries[ids[i]].feature == feature) {
            hi = ids[i];
            if (ds_.feature(feature).kind == FeatureKind::categorical) {
                part |= catalog_.entries[ids[i]].selection;
            }
            ++i;
        }
        if (ds_.feature(feature).kind != FeatureKind::categorical) {
            for (auto id = lo; id <= hi; ++id) {
                part |= catalog_.entries[id].selection;
            }
        }
        sel &= part;
    }
    return make_candidate(std::move(ids), std::move(sel));
}

Explanation SearchContext::explain(const Predicate& pred, const RowSet& selection, std::vector<double> trace) const {
    return make_explanation(ds_, scores(), pred, selection, cfg_.strictness, cfg_.strategy, cfg_.prior_scale,
                            std::move(trace));
}

CandidatePool init_base_predicates(const SearchContext& ctx) {
    CandidatePool pool;
    const auto& entries = ctx.catalog().entries;
    std::vector<std::optional<Candidate>> built(entries.size());
    parallel_for(entries.size(), ctx.config().workers, [&](std::size_t i) {
        const auto& e = entries[i];
        if (e.selection.empty()) {
            return;
        }
        if (ctx.user_rows() && !e.selection.intersects(*ctx.user_rows())) {
            return;
        }
        built[i] = ctx.make_candidate({static_cast<std::uint32_t>(i)}, e.selection);
    });
    for (auto& c : built) {
        if (c) {
            pool.insert(std::move(*c));
        }
    }
    return pool;
}

// --- passes ---------------------------------------------------------------------------------

namespace {

std::size_t feature_of(const SearchContext& ctx, const Candidate& c) {
    return ctx.catalog().entries[c.base_ids.front()].feature;
}

// Same-feature merge partners: any pair for categorical features; bin runs that share an edge
// or leave a single bin between them for numeric ones.
bool mergeable(const SearchContext& ctx, const Candidate& a, const Candidate& b) {
    if (a.conj.size() != 1 || b.conj.size() != 1 || feature_of(ctx, a) != feature_of(ctx, b)) {
        return false;
    }
    if (ctx.dataset().feature(feature_of(ctx, a)).kind == FeatureKind::categorical) {
        return true;
    }
    const auto a0 = a.base_ids.front();
    const auto a1 = a.base_ids.back();
    const auto b0 = b.base_ids.front();
    const auto b1 = b.base_ids.back();
    return b0 <= a1 + 2 && a0 <= b1 + 2;
}

std::optional<Candidate> merged(const SearchContext& ctx, const Candidate& a, const Candidate& b) {
    std::vector<std::uint32_t> ids = a.base_ids;
    ids.insert(ids.end(), b.base_ids.begin(), b.base_ids.end());
    if (ctx.dataset().feature(feature_of(ctx, a)).kind == FeatureKind::categorical) {
        return ctx.make_candidate(std::move(ids), a.selection | b.selection);
    }
    const auto lo = std::min(a.base_ids.front(), b.base_ids.front());
    const auto hi = std::max(a.base_ids.back(), b.base_ids.back());
    ids.clear();
    RowSet sel = a.selection | b.selection;
    for (auto id = lo; id <= hi; ++id) {
        ids.push_back(id);
        sel |= ctx.catalog().entries[id].selection;
    }
    return ctx.make_candidate(std::move(ids), std::move(sel));
}

} // namespace

CandidatePool merge_pass(const SearchContext& ctx, CandidatePool pool, PassLog* log) {
    std::vector<Candidate> items(pool.items().begin(), pool.items().end());
    std::sort(items.begin(), items.end(), ranks_before);
    std::vector<char> alive(items.size(), 1);
    std::set<std::string> keys;
    for (const auto& c : items) {
        keys.insert(c.key);
    }

    const std::size_t original = items.size();
    for (std::size_t start = 0; start < original; ++start) {
        if (!alive[start] || items[start].conj.size() != 1) {
            continue;
        }
        std::size_t cur = start;
        for (;;) {
            std::vector<std::size_t> partners;
            for (std::size_t j = 0; j < items.size(); ++j) {
                if (j != cur && alive[j] && mergeable(ctx, items[cur], items[j])) {
                    partners.push_back(j);
                }
            }
            std::sort(partners.begin(), partners.end(),
                      [&](std::size_t x, std::size_t y) { return ranks_before(items[x], items[y]); });
            bool accepted = false;
            for (auto j : partners) {
                auto m = merged(ctx, items[cur], items[j]);
                if (!m || keys.count(m->key) != 0) {
                    continue;
                }
                const double bar = std::max(items[cur].influence, items[j].influence);
                if (m->influence > bar) {
                    if (log != nullptr) {
                        log->merges.push_back({m->influence, items[cur].influence, items[j].influence});
                    }
                    alive[cur] = 0;
                    alive[j] = 0;
                    keys.erase(items[cur].key);
                    keys.erase(items[j].key);
                    keys.insert(m->key);
                    items.push_back(std::move(*m));
                    alive.push_back(1);
                    cur = items.size() - 1;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                break;
            }
        }
    }

    CandidatePool out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (alive[i]) {
            out.insert(std::move(items[i]));
        }
    }
    return out;
}

CandidatePool intersect_pass(const SearchContext& ctx, CandidatePool pool, PassLog* log) {
    std::vector<Candidate> items(pool.items().begin(), pool.items().end());
    std::sort(items.begin(), items.end(), ranks_before);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (!items[i].conj.shares_feature(items[j].conj)) {
                pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }
        }
    }

    // Score every pair in parallel; only pairs that beat both parents are materialized.
    std::vector<char> accept(pairs.size(), 0);
    parallel_for(pairs.size(), ctx.config().workers, [&](std::size_t p) {
        const auto& a = items[pairs[p].first];
        const auto& b = items[pairs[p].second];
        const RowSet sel = a.selection & b.selection;
        const auto n = sel.count();
        if (n == 0) {
            return;
        }
        const double inf = influence_from_sum(sel.sum(ctx.scores()), n, ctx.config().strictness);
        accept[p] = inf > std::max(a.influence, b.influence) ? 1 : 0;
    });

    std::vector<std::optional<Candidate>> built(pairs.size());
    std::vector<std::size_t> accepted;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (accept[p]) {
            accepted.push_back(p);
        }
    }
    parallel_for(accepted.size(), ctx.config().workers, [&](std::size_t k) {
        const auto p = accepted[k];
        const auto& a = items[pairs[p].first];
        const auto& b = items[pairs[p].second];
        std::vector<std::uint32_t> ids = a.base_ids;
        ids.insert(ids.end(), b.base_ids.begin(), b.base_ids.end());
        built[p] = ctx.make_candidate(std::move(ids), a.selection & b.selection);
    });

    if (log != nullptr) {
        for (auto p : accepted) {
            if (built[p]) {
                log->intersections.push_back(
                    {built[p]->influence, items[pairs[p].first].influence, items[pairs[p].second].influence});
            }
        }
    }
    CandidatePool out;
    for (auto& c : items) {
        out.insert(std::move(c));
    }
    for (auto p : accepted) {
        if (built[p]) {
            out.insert(std::move(*built[p]));
        }
    }
    return out;
}

CandidatePool prune_pass(const SearchContext& ctx, CandidatePool pool) {
    if (pool.empty()) {
        return pool;
    }
    if (ctx.user_rows()) {
        const RowSet& user = *ctx.user_rows();
        pool.erase_if([&](const Candidate& c) { return !c.selection.intersects(user); });
        if (pool.empty()) {
            return pool;
        }
    }
    const Candidate& best = pool.best();
    const std::string best_key = best.key;
    std::size_t top_row = 0;
    double top_score = -std::numeric_limits<double>::infinity();
    best.selection.for_each([&](std::uint32_t r) {
        if (ctx.scores()[r] > top_score) {
            top_score = ctx.scores()[r];
            top_row = r;
        }
    });
    pool.erase_if([&](const Candidate& c) { return c.key != best_key && !c.selection.contains(top_row); });
    return pool;
}

// --- inner and outer loops ------------------------------------------------------------------

SearchOutcome search_best_predicate(const SearchContext& ctx, CandidatePool pool) {
    if (ctx.user_rows()) {
        pool.erase_if([&](const Candidate& c) { return !c.selection.intersects(*ctx.user_rows()); });
    }
    if (pool.empty()) {
        throw Error(ErrorCode::no_explanation, "no candidate predicate selects any row");
    }
    std::map<std::string, Candidate, std::less<>> seen;
    auto remember = [&](const CandidatePool& p) {
        for (const auto& c : p.items()) {
            seen.try_emplace(c.key, c);
        }
    };
    remember(pool);

    std::vector<PassLog> passes;
    Candidate best = pool.best();
    std::vector<double> trace{best.influence};
    for (std::size_t iter = 0; iter < ctx.config().max_iterations; ++iter) {
        PassLog log;
        pool = merge_pass(ctx, std::move(pool), &log);
        remember(pool);
        pool = intersect_pass(ctx, std::move(pool), &log);
        remember(pool);
        pool = prune_pass(ctx, std::move(pool));
        passes.push_back(std::move(log));
        if (pool.empty()) {
            break;
        }
        const Candidate& current = pool.best();
        trace.push_back(current.influence);
        const bool improved = current.influence > best.influence;
        if (ranks_before(current, best)) {
            best = current;
        }
        if (!improved) {
            break;
        }
    }

    std::vector<Candidate> leftover;
    for (auto& [key, c] : seen) {
        if (key != best.key) {
            leftover.push_back(std::move(c));
        }
    }
    auto explanation = ctx.explain(Predicate(best.conj), best.selection, std::move(trace));
    return SearchOutcome{std::move(explanation), std::move(best), std::move(leftover), std::move(passes)};
}

SearchOutcome search_best_predicate(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg) {
    const SearchContext ctx(ds, sv, cfg);
    return search_best_predicate(ctx, init_base_predicates(ctx));
}

MultiOutcome search_multiple(const SearchContext& ctx) {
    std::vector<Explanation> explanations;
    CandidatePool remaining = init_base_predicates(ctx);
    std::set<std::uint32_t> used;
    std::optional<Predicate> accumulated;
    RowSet accumulated_rows(ctx.dataset().row_count());
    double accumulated_influence = 0.0;
    std::vector<double> outer_trace;

    while (explanations.size() < ctx.config().max_explanations && !remaining.empty()) {
        std::optional<SearchOutcome> found;
        try {
            found = search_best_predicate(ctx, std::move(remaining));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::no_explanation && accumulated) {
                break;
            }
            throw;
        }
        SearchOutcome& inner = *found;
        const Predicate term(inner.best_candidate.conj);
        if (!accumulated) {
            accumulated = term;
            accumulated_rows = inner.best_candidate.selection;
            accumulated_influence = inner.best.influence;
        } else {
            const RowSet rows = accumulated_rows | inner.best_candidate.selection;
            const double influence = ctx.influence_of(rows);
            if (!(influence > accumulated_influence)) {
                break;
            }
            accumulated = disjoin(*accumulated, term);
            accumulated_rows = rows;
            accumulated_influence = influence;
        }
        outer_trace.push_back(accumulated_influence);
        explanations.push_back(std::move(inner.best));

        used.insert(inner.best_candidate.base_ids.begin(), inner.best_candidate.base_ids.end());
        remaining = CandidatePool{};
        for (auto& c : inner.leftover) {
            const bool touches = std::any_of(c.base_ids.begin(), c.base_ids.end(),
                                             [&](std::uint32_t id) { return used.count(id) != 0; });
            if (!touches) {
                remaining.insert(std::move(c));
            }
        }
    }
    if (!accumulated) {
        throw Error(ErrorCode::no_explanation, "no candidate predicate selects any row");
    }
    auto combined = ctx.explain(*accumulated, accumulated_rows, std::move(outer_trace));
    return MultiOutcome{std::move(explanations), std::move(combined)};
}

MultiOutcome search_multiple(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg) {
    const SearchContext ctx(ds, sv, cfg);
    return search_multiple(ctx);
}

// --- recursive predicate induction ----------------------------------------------------------

namespace {

struct RpiNode {
    std::vector<std::uint32_t> ids;
    RowSet selection;
    std::size_t clauses = 0;
    double log_bf = -std::numeric_limits<double>::infinity();
    std::string key;
};

bool rpi_before(const RpiNode& a, const RpiNode& b) {
    if (a.log_bf != b.log_bf) return a.log_bf > b.log_bf;
    if (a.clauses != b.clauses) return a.clauses < b.clauses;
    const auto na = a.selection.count();
    const auto nb = b.selection.count();
    if (na != nb) return na < nb;
    return a.key < b.key;
}

class RpiEvaluator {
public:
    explicit RpiEvaluator(const SearchContext& ctx) : ctx_(ctx) {
        total_ = SampleMoments::of(ctx.scores());
    }

    // log bf10 of inside vs rest, or nullopt when a group is too small.
    std::optional<double> log_bf(const RowSet& sel) const {
        const auto n = sel.count();
        if (n < 2 || total_.n - n < 2) {
            return std::nullopt;
        }
        const auto scores = ctx_.scores();
        double s = 0.0;
        sel.for_each([&](std::uint32_t r) { s += scores[r]; });
        SampleMoments in;
        in.n = n;
        in.mean = s / static_cast<double>(n);
        sel.for_each([&](std::uint32_t r) { in.m2 += (scores[r] - in.mean) * (scores[r] - in.mean); });
        const auto out = SampleMoments::remainder(total_, in);
        return jzs_bayes_factor(two_sample_stat(in, out), ctx_.config().prior_scale).log_bf10;
    }

private:
    const SearchContext& ctx_;
    SampleMoments total_;
};

// Expansions of `node` by one base predicate: a conjunction with a feature not yet constrained,
// or a merge into the clause of a constrained feature.
std::optional<std::vector<std::uint32_t>> expand(const SearchContext& ctx, const RpiNode& node, std::uint32_t base) {
    const auto& entries = ctx.catalog().entries;
    const auto feature = entries[base].feature;
    std::vector<std::uint32_t> same;
    for (auto id : node.ids) {
        if (entries[id].feature == feature) {
            same.push_back(id);
        }
    }
    std::vector<std::uint32_t> ids = node.ids;
    if (same.empty()) {
        ids.push_back(base);
        return ids;
    }
    if (std::find(same.begin(), same.end(), base) != same.end()) {
        return std::nullopt;
    }
    if (ctx.dataset().feature(feature).kind == FeatureKind::categorical) {
        ids.push_back(base);
        return ids;
    }
    const auto lo = same.front();
    const auto hi = same.back();
    if (base + 2 < lo || base > hi + 2) {
        return std::nullopt;
    }
    for (auto id = std::min(lo, base); id <= std::max(hi, base); ++id) {
        ids.push_back(id);
    }
    return ids;
}

} // namespace

std::vector<Explanation> rpi_search(const SearchContext& ctx) {
    const CandidatePool bases = init_base_predicates(ctx);
    const RpiEvaluator evaluator(ctx);
    const auto& seeds = bases.items();
    std::vector<std::uint32_t> base_ids;
    for (const auto& c : seeds) {
        base_ids.push_back(c.base_ids.front());
    }

    std::vector<std::optional<RpiNode>> results(seeds.size());
    parallel_for(seeds.size(), ctx.config().workers, [&](std::size_t s) {
        const auto& seed = seeds[s];
        const auto lb = evaluator.log_bf(seed.selection);
        if (!lb) {
            return;
        }
        RpiNode node{seed.base_ids, seed.selection, 1, *lb, seed.key};
        for (std::size_t depth = 0; depth < ctx.config().max_iterations; ++depth) {
            std::optional<RpiNode> best;
            for (auto base : base_ids) {
                auto ids = expand(ctx, node, base);
                if (!ids) {
                    continue;
                }
                auto cand = ctx.make_candidate(std::move(*ids));
                if (!cand) {
                    continue;
                }
                if (ctx.user_rows() && !cand->selection.intersects(*ctx.user_rows())) {
                    continue;
                }
                const auto clb = evaluator.log_bf(cand->selection);
                if (!clb || !(*clb > node.log_bf)) {
                    continue;
                }
                RpiNode next{std::move(cand->base_ids), std::move(cand->selection), cand->conj.size(), *clb,
                             std::move(cand->key)};
                if (!best || rpi_before(next, *best)) {
                    best = std::move(next);
                }
            }
            if (!best) {
                break;
            }
            node = std::move(*best);
        }
        results[s] = std::move(node);
    });

    std::map<std::string, RpiNode, std::less<>> unique;
    for (auto& r : results) {
        if (r) {
            unique.try_emplace(r->key, std::move(*r));
        }
    }
    std::vector<RpiNode> ranked;
    for (auto& [key, node] : unique) {
        ranked.push_back(std::move(node));
    }
    std::sort(ranked.begin(), ranked.end(), rpi_before);
    if (ranked.size() > ctx.config().max_explanations) {
        ranked.resize(ctx.config().max_explanations);
    }

    std::vector<Explanation> out;
    for (const auto& node : ranked) {
        auto cand = ctx.make_candidate(node.ids, node.selection);
        out.push_back(ctx.explain(Predicate(cand->conj), node.selection, {node.log_bf}));
    }
    return out;
}

std::vector<Explanation> rpi_search(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg) {
    const SearchContext ctx(ds, sv, cfg);
    return rpi_search(ctx);
}

ExplainResult explain(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg) {
    const SearchContext ctx(ds, sv, cfg);
    ExplainResult out;
    out.warnings = ctx.warnings();
    if (cfg.strategy == Strategy::bayes) {
        out.explanations = rpi_search(ctx);
        if (out.explanations.empty()) {
            throw Error(ErrorCode::no_explanation, "no base predicate supports a Bayes factor comparison");
        }
        return out;
    }
    auto multi = search_multiple(ctx);
    out.explanations = std::move(multi.explanations);
    out.combined = std::move(multi.combined);
    return out;
}

} // namespace predex
