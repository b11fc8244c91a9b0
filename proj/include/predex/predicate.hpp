#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "predex/dataset.hpp"
#include "predex/row_set.hpp"

namespace predex {

/// Categorical membership. Values are kept sorted and unique.
struct MemberOf {
    std::vector<std::string> values;

    friend bool operator==(const MemberOf&, const MemberOf&) = default;
};

/// Interval over a numeric or datetime feature. Bounds may be infinite for one-sided clauses.
/// `datetime` marks bounds that print as quoted ISO-8601 text.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_inclusive = true;
    bool hi_inclusive = true;
    bool datetime = false;

    bool is_point() const { return lo == hi; }
    bool contains(double v) const {
        return (lo_inclusive ? v >= lo : v > lo) && (hi_inclusive ? v <= hi : v < hi);
    }

    friend bool operator==(const Range&, const Range&) = default;
};

/// A single-feature condition f_i.
class Clause {
public:
    using Body = std::variant<MemberOf, Range>;

    Clause(std::string feature, Body body);

    static Clause equals(std::string feature, std::string value);
    static Clause member_of(std::string feature, std::vector<std::string> values);
    static Clause range(std::string feature, double lo, double hi, bool lo_inclusive, bool hi_inclusive,
                        bool datetime = false);

    const std::string& feature() const noexcept { return feature_; }
    const Body& body() const noexcept { return body_; }
    bool is_range() const noexcept { return std::holds_alternative<Range>(body_); }
    const Range& as_range() const { return std::get<Range>(body_); }
    const MemberOf& as_member_of() const { return std::get<MemberOf>(body_); }

    friend bool operator==(const Clause&, const Clause&) = default;

private:
    std::string feature_;
    Body body_;
};

/// Clauses with at most one per feature, ordered by feature name.
class Conjunction {
public:
    Conjunction() = default;
    explicit Conjunction(std::vector<Clause> clauses);
    explicit Conjunction(Clause clause);

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    std::size_t size() const noexcept { return clauses_.size(); }
    bool empty() const noexcept { return clauses_.empty(); }

    const Clause* find(std::string_view feature) const;
    bool has_feature(std::string_view feature) const { return find(feature) != nullptr; }
    bool shares_feature(const Conjunction& other) const;

    /// Adds a clause; throws an algebra error if the feature is already constrained.
    void add(Clause clause);
    Conjunction without(std::string_view feature) const;

    friend bool operator==(const Conjunction&, const Conjunction&) = default;

private:
    std::vector<Clause> clauses_;
};

/// Disjunctive normal form with an optional top-level complement. Terms are kept in canonical
/// order without duplicates.
class Predicate {
public:
    explicit Predicate(Conjunction term, bool negated = false);
    explicit Predicate(std::vector<Conjunction> terms, bool negated = false);
    explicit Predicate(Clause clause) : Predicate(Conjunction(std::move(clause))) {}

    const std::vector<Conjunction>& terms() const noexcept { return terms_; }
    bool negated() const noexcept { return negated_; }
    bool is_conjunctive() const noexcept { return !negated_ && terms_.size() == 1; }

    friend bool operator==(const Predicate&, const Predicate&) = default;

private:
    std::vector<Conjunction> terms_;
    bool negated_ = false;
};

RowSet evaluate(const Clause& clause, const Dataset& ds);
RowSet evaluate(const Conjunction& conj, const Dataset& ds);
RowSet evaluate(const Predicate& pred, const Dataset& ds);

/// Union of two clauses on one feature: set union, or the interval hull for ranges.
Clause merge(const Clause& a, const Clause& b);
/// Conjunction of feature-disjoint conjunctions.
Conjunction intersect(const Conjunction& a, const Conjunction& b);
Predicate disjoin(const Predicate& a, const Predicate& b);
Predicate complement(const Predicate& p);

Predicate parse_predicate(std::string_view text);
std::string to_string(const Clause& clause);
std::string to_string(const Conjunction& conj);
std::string to_string(const Predicate& pred);

/// Equal for predicates that differ only in clause or term order.
std::string canonical_key(const Predicate& pred);
std::string canonical_key(const Conjunction& conj);

} // namespace predex
