#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "predex/bayes.hpp"
#include "predex/dataset.hpp"
#include "predex/predicate.hpp"
#include "predex/row_set.hpp"
#include "predex/scoring.hpp"

namespace predex {

enum class Strategy { influence, bayes };

const char* to_string(Strategy s);
Strategy strategy_from_string(std::string_view text);

struct SearchConfig {
    Strategy strategy = Strategy::influence;
    Strictness strictness;
    BinningSpec binning;
    std::size_t max_iterations = 50;
    std::size_t max_explanations = 5;
    /// x': rows the analyst marked anomalous.
    std::optional<std::vector<std::uint32_t>> user_anomalies;
    /// 0 uses the hardware concurrency.
    std::size_t workers = 1;
    double prior_scale = default_prior_scale;
};

struct Explanation {
    explicit Explanation(Predicate p) : predicate(std::move(p)) {}

    Predicate predicate;
    double influence = 0.0;
    double strictness = 1.0;
    /// Absent when either side of the inside/rest comparison has fewer than 2 rows.
    std::optional<BayesResult> bayes;
    std::size_t count = 0;
    double fraction = 0.0;
    double mean_score_inside = 0.0;
    std::optional<double> mean_score_outside;
    std::vector<double> trace;
    Strategy strategy = Strategy::influence;
};

/// Inside-vs-rest summary of an arbitrary predicate: coverage, influence and Bayes evidence.
Explanation summarize(const Dataset& ds, const ScoreVector& sv, const Predicate& pred, Strictness c,
                      Strategy strategy = Strategy::influence, double prior_scale = default_prior_scale);

/// Optional Bayes result for an inside/rest split; nullopt when a group has fewer than 2 rows.
std::optional<BayesResult> inside_vs_rest(std::span<const double> scores, const RowSet& selection,
                                          double prior_scale = default_prior_scale);

/// Base predicates are numbered; every candidate is the set of base ids it was built from. For a
/// numeric feature the ids always form a contiguous run of bins.
struct BaseCatalog {
    struct Entry {
        std::size_t feature = 0; // dataset feature index
        std::size_t bin = 0;
        Clause clause;
        RowSet selection;
    };

    std::vector<Entry> entries;
    BinTable bins;

    const FeatureBins& bins_of(std::size_t feature) const;
    /// Clause of one feature covering `ids` (all ids must belong to that feature).
    Clause clause_for(const Dataset& ds, std::span<const std::uint32_t> ids) const;
};

BaseCatalog build_catalog(const Dataset& ds, const BinningSpec& spec);

struct Candidate {
    Conjunction conj;
    std::vector<std::uint32_t> base_ids; // sorted
    RowSet selection;
    std::size_t count = 0;
    double score_sum = 0.0;
    double influence = 0.0;
    std::string key;
};

/// Total order used for every tie: higher influence, fewer clauses, smaller selection, then key.
bool ranks_before(const Candidate& a, const Candidate& b);

/// Conjunctions keyed by canonical key.
class CandidatePool {
public:
    bool insert(Candidate c);
    bool contains(const std::string& key) const { return keys_.count(key) != 0; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::vector<Candidate>& items() const noexcept { return items_; }
    const Candidate& best() const;

    template <typename Pred>
    void erase_if(Pred&& drop) {
        std::vector<Candidate> kept;
        for (auto& c : items_) {
            if (drop(c)) {
                keys_.erase(c.key);
            } else {
                kept.push_back(std::move(c));
            }
        }
        items_ = std::move(kept);
    }

private:
    std::vector<Candidate> items_;
    std::map<std::string, std::size_t, std::less<>> keys_;
};

/// State shared by the search passes: dataset, scores, base catalog and strictness.
class SearchContext {
public:
    SearchContext(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg);

    const Dataset& dataset() const noexcept { return ds_; }
    std::span<const double> scores() const noexcept { return sv_.values(); }
    const ScoreVector& score_vector() const noexcept { return sv_; }
    const SearchConfig& config() const noexcept { return cfg_; }
    const BaseCatalog& catalog() const noexcept { return catalog_; }
    const std::optional<RowSet>& user_rows() const noexcept { return user_rows_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Candidate from base ids, with selection and influence filled in; nullopt if it selects nothing.
    std::optional<Candidate> make_candidate(std::vector<std::uint32_t> ids) const;
    std::optional<Candidate> make_candidate(std::vector<std::uint32_t> ids, RowSet selection) const;
    double influence_of(const RowSet& selection) const;

    Explanation explain(const Predicate& pred, const RowSet& selection, std::vector<double> trace) const;

private:
    const Dataset& ds_;
    const ScoreVector& sv_;
    SearchConfig cfg_;
    BaseCatalog catalog_;
    std::optional<RowSet> user_rows_;
    std::vector<std::string> warnings_;
};

/// One single-clause candidate per categorical value and per bin of every context feature;
/// empty selections are dropped.
CandidatePool init_base_predicates(const SearchContext& ctx);

struct PassLog {
    struct Acceptance {
        double merged = 0.0;
        double left = 0.0;
        double right = 0.0;
    };
    std::vector<Acceptance> merges;
    std::vector<Acceptance> intersections;
};

CandidatePool merge_pass(const SearchContext& ctx, CandidatePool pool, PassLog* log = nullptr);
CandidatePool intersect_pass(const SearchContext& ctx, CandidatePool pool, PassLog* log = nullptr);
/// Keeps p* and every candidate containing x-hat, the highest-scoring row of p*(D); with user
/// anomalies, also drops candidates disjoint from them.
CandidatePool prune_pass(const SearchContext& ctx, CandidatePool pool);

struct SearchOutcome {
    Explanation best;
    Candidate best_candidate;
    /// Every candidate that appeared during the search except the best, for the outer loop.
    std::vector<Candidate> leftover;
    std::vector<PassLog> passes;
};

SearchOutcome search_best_predicate(const SearchContext& ctx, CandidatePool initial);
SearchOutcome search_best_predicate(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg);

struct MultiOutcome {
    std::vector<Explanation> explanations;
    Explanation combined;
};

MultiOutcome search_multiple(const SearchContext& ctx);
MultiOutcome search_multiple(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg);

/// Bayes-factor-driven recursive expansion of every base predicate, deduplicated and sorted by bf10.
std::vector<Explanation> rpi_search(const SearchContext& ctx);
std::vector<Explanation> rpi_search(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg);

struct ExplainResult {
    std::vector<Explanation> explanations;
    std::optional<Explanation> combined;
    std::vector<std::string> warnings;
};

/// Runs the configured strategy.
ExplainResult explain(const Dataset& ds, const ScoreVector& sv, const SearchConfig& cfg);

} // namespace predex
