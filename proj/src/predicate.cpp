#include "predex/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>

#include "predex/datetime.hpp"
#include "predex/error.hpp"
#include "predex/text.hpp"

namespace predex {

namespace {

void validate(const std::string& feature, const Clause::Body& body) {
    if (feature.empty()) {
        throw Error(ErrorCode::algebra, "clause needs a feature name");
    }
    if (const auto* m = std::get_if<MemberOf>(&body)) {
        if (m->values.empty()) {
            throw Error(ErrorCode::algebra, "membership clause on '" + feature + "' has no values");
        }
        return;
    }
    const auto& r = std::get<Range>(body);
    if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi) {
        throw Error(ErrorCode::algebra, "range on '" + feature + "' has lo > hi");
    }
    if (r.lo == r.hi && (!r.lo_inclusive || !r.hi_inclusive || std::isinf(r.lo))) {
        throw Error(ErrorCode::algebra, "empty range on '" + feature + "'");
    }
}

} // namespace

Clause::Clause(std::string feature, Body body) : feature_(std::move(feature)), body_(std::move(body)) {
    if (auto* m = std::get_if<MemberOf>(&body_)) {
        std::sort(m->values.begin(), m->values.end());
        m->values.erase(std::unique(m->values.begin(), m->values.end()), m->values.end());
    }
    validate(feature_, body_);
}

Clause Clause::equals(std::string feature, std::string value) {
    return Clause(std::move(feature), MemberOf{{std::move(value)}});
}

Clause Clause::member_of(std::string feature, std::vector<std::string> values) {
    return Clause(std::move(feature), MemberOf{std::move(values)});
}

Clause Clause::range(std::string feature, double lo, double hi, bool lo_inclusive, bool hi_inclusive, bool datetime) {
    return Clause(std::move(feature), Range{lo, hi, lo_inclusive, hi_inclusive, datetime});
}

Conjunction::Conjunction(std::vector<Clause> clauses) {
    for (auto& c : clauses) {
        add(std::move(c));
    }
}

Conjunction::Conjunction(Clause clause) { clauses_.push_back(std::move(clause)); }

const Clause* Conjunction::find(std::string_view feature) const {
    const auto it = std::lower_bound(clauses_.begin(), clauses_.end(), feature,
                                     [](const Clause& c, std::string_view f) { return c.feature() < f; });
    return it != clauses_.end() && it->feature() == feature ? &*it : nullptr;
}

bool Conjunction::shares_feature(const Conjunction& other) const {
    auto a = clauses_.begin();
    auto b = other.clauses_.begin();
    while (a != clauses_.end() && b != other.clauses_.end()) {
        if (a->feature() == b->feature()) {
            return true;
        }
        if (a->feature() < b->feature()) {
            ++a;
        } else {
            ++b;
        }
    }
    return false;
}

void Conjunction::add(Clause clause) {
    const auto it = std::lower_bound(clauses_.begin(), clauses_.end(), clause.feature(),
                                     [](const Clause& c, const std::string& f) { return c.feature() < f; });
    if (it != clauses_.end() && it->feature() == clause.feature()) {
        throw Error(ErrorCode::algebra,
                    "feature '" + clause.feature() + "' already constrained; merge the clauses instead");
    }
    clauses_.insert(it, std::move(clause));
}

Conjunction Conjunction::without(std::string_view feature) const {
    Conjunction out;
    for (const auto& c : clauses_) {
        if (c.feature() != feature) {
            out.clauses_.push_back(c);
        }
    }
    return out;
}

Predicate::Predicate(Conjunction term, bool negated) : Predicate(std::vector<Conjunction>{std::move(term)}, negated) {}

Predicate::Predicate(std::vector<Conjunction> terms, bool negated) : negated_(negated) {
    if (terms.empty()) {
        throw Error(ErrorCode::algebra, "predicate needs at least one term");
    }
    std::vector<std::pair<std::string, Conjunction>> keyed;
    for (auto& t : terms) {
        if (t.empty()) {
            throw Error(ErrorCode::algebra, "predicate term needs at least one clause");
        }
        keyed.emplace_back(to_string(t), std::move(t));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
                keyed.end());
    for (auto& [key, t] : keyed) {
        terms_.push_back(std::move(t));
    }
}

// --- evaluation -----------------------------------------------------------------------------

RowSet evaluate(const Clause& clause, const Dataset& ds) {
    const auto feature = ds.find(clause.feature());
    if (!feature) {
        throw Error(ErrorCode::evaluation, "unknown feature '" + clause.feature() + "'");
    }
    const Column& col = ds.column(*feature);
    RowSet out(ds.row_count());

    if (const auto* m = std::get_if<MemberOf>(&clause.body())) {
        if (col.kind == FeatureKind::categorical) {
            std::vector<char> wanted(col.dictionary.size(), 0);
            for (const auto& v : m->values) {
                if (auto code = col.code_of(v)) {
                    wanted[static_cast<std::size_t>(*code)] = 1;
                }
            }
            for (std::size_t r = 0; r < col.codes.size(); ++r) {
                const auto code = col.codes[r];
                if (code >= 0 && wanted[static_cast<std::size_t>(code)]) {
                    out.insert(r);
                }
            }
            return out;
        }
        std::vector<double> wanted;
        for (const auto& v : m->values) {
            std::optional<double> x;
            if (col.kind == FeatureKind::numeric) {
                x = parse_real(v);
            } else if (auto t = parse_iso8601(v)) {
                x = static_cast<double>(*t);
            }
            if (!x) {
                throw Error(ErrorCode::evaluation, "value '" + v + "' does not fit " + to_string(col.kind) +
                                                       " feature '" + clause.feature() + "'");
            }
            wanted.push_back(*x);
        }
        for (std::size_t r = 0; r < col.values.size(); ++r) {
            const double v = col.values[r];
            if (!std::isnan(v) && std::find(wanted.begin(), wanted.end(), v) != wanted.end()) {
                out.insert(r);
            }
        }
        return out;
    }

    const auto& range = std::get<Range>(clause.body());
    if (col.kind == FeatureKind::categorical) {
        throw Error(ErrorCode::evaluation, "range clause on categorical feature '" + clause.feature() + "'");
    }
    if (range.datetime && col.kind != FeatureKind::datetime) {
        throw Error(ErrorCode::evaluation, "datetime range on numeric feature '" + clause.feature() + "'");
    }
    for (std::size_t r = 0; r < col.values.size(); ++r) {
        const double v = col.values[r];
        if (!std::isnan(v) && range.contains(v)) {
            out.insert(r);
        }
    }
    return out;
}

RowSet evaluate(const Conjunction& conj, const Dataset& ds) {
    RowSet out(ds.row_count(), true);
    for (const auto& c : conj.clauses()) {
        out &= evaluate(c, ds);
    }
    return out;
}

RowSet evaluate(const Predicate& pred, const Dataset& ds) {
    RowSet out(ds.row_count());
    for (const auto& t : pred.terms()) {
        out |= evaluate(t, ds);
    }
    return pred.negated() ? out.complement() : out;
}

// --- algebra --------------------------------------------------------------------------------

Clause merge(const Clause& a, const Clause& b) {
    if (a.feature() != b.feature()) {
        throw Error(ErrorCode::algebra, "cannot merge clauses on '" + a.feature() + "' and '" + b.feature() + "'");
    }
    if (a.is_range() != b.is_range()) {
        throw Error(ErrorCode::algebra, "cannot merge a range with a membership clause on '" + a.feature() + "'");
    }
    if (!a.is_range()) {
        auto values = a.as_member_of().values;
        const auto& more = b.as_member_of().values;
        values.insert(values.end(), more.begin(), more.end());
        return Clause::member_of(a.feature(), std::move(values));
    }
    const Range& x = a.as_range();
    const Range& y = b.as_range();
    if (x.datetime != y.datetime) {
        throw Error(ErrorCode::algebra, "cannot merge datetime and numeric ranges on '" + a.feature() + "'");
    }
    Range out = x;
    if (y.lo < x.lo) {
        out.lo = y.lo;
        out.lo_inclusive = y.lo_inclusive;
    } else if (y.lo == x.lo) {
        out.lo_inclusive = x.lo_inclusive || y.lo_inclusive;
    }
    if (y.hi > x.hi) {
        out.hi = y.hi;
        out.hi_inclusive = y.hi_inclusive;
    } else if (y.hi == x.hi) {
        out.hi_inclusive = x.hi_inclusive || y.hi_inclusive;
    }
    return Clause(a.feature(), out);
}

Conjunction intersect(const Conjunction& a, const Conjunction& b) {
    Conjunction out = a;
    for (const auto& c : b.clauses()) {
        out.add(c);
    }
    return out;
}

Predicate disjoin(const Predicate& a, const Predicate& b) {
    if (a.negated() || b.negated()) {
        throw Error(ErrorCode::algebra, "cannot disjoin a complemented predicate");
    }
    auto terms = a.terms();
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return Predicate(std::move(terms));
}

Predicate complement(const Predicate& p) { return Predicate(p.terms(), !p.negated()); }

// --- printing -------------------------------------------------------------------------------

namespace {

bool is_keyword(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower == "in" || lower == "not" || lower == "or" || lower == "inf" || lower == "nan";
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string quote(std::string_view s, char q) {
    std::string out(1, q);
    for (char c : s) {
        if (c == q || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back(q);
    return out;
}

std::string print_name(const std::string& name) {
    const bool plain = !name.empty() && is_name_start(name.front()) &&
                       std::all_of(name.begin(), name.end(), is_name_char) && !is_keyword(name);
    return plain ? name : quote(name, '"');
}

std::string print_bound(double v, bool datetime) {
    if (datetime && std::isfinite(v) && v == std::floor(v)) {
        return quote(format_iso8601(static_cast<std::int64_t>(v)), '\'');
    }
    return format_real(v);
}

} // namespace

std::string to_string(const Clause& clause) {
    const std::string name = print_name(clause.feature());
    if (!clause.is_range()) {
        const auto& values = clause.as_member_of().values;
        if (values.size() == 1) {
            return name + " = " + quote(values.front(), '\'');
        }
        std::string out = name + " in [";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out += (i == 0 ? "" : ", ") + quote(values[i], '\'');
        }
        return out + "]";
    }
    const Range& r = clause.as_range();
    const std::string lo = print_bound(r.lo, r.datetime);
    const std::string hi = print_bound(r.hi, r.datetime);
    if (r.is_point() && !r.datetime) {
        return name + " = " + lo;
    }
    const bool lo_open_ended = std::isinf(r.lo) && r.lo < 0;
    const bool hi_open_ended = std::isinf(r.hi) && r.hi > 0;
    if (lo_open_ended && !hi_open_ended) {
        return name + (r.hi_inclusive ? " <= " : " < ") + hi;
    }
    if (hi_open_ended && !lo_open_ended) {
        return name + (r.lo_inclusive ? " >= " : " > ") + lo;
    }
    return lo + (r.lo_inclusive ? " <= " : " < ") + name + (r.hi_inclusive ? " <= " : " < ") + hi;
}

std::string to_string(const Conjunction& conj) {
    std::string out;
    for (const auto& c : conj.clauses()) {
        if (!out.empty()) {
            out += " & ";
        }
        out += "(" + to_string(c) + ")";
    }
    return out;
}

std::string to_string(const Predicate& pred) {
    std::string body;
    for (const auto& t : pred.terms()) {
        if (!body.empty()) {
            body += " OR ";
        }
        body += to_string(t);
    }
    return pred.negated() ? "NOT(" + body + ")" : body;
}

std::string canonical_key(const Predicate& pred) { return to_string(pred); }
std::string canonical_key(const Conjunction& conj) { return to_string(conj); }

// --- parsing --------------------------------------------------------------------------------

namespace {

enum class Tok { name, string, number, lparen, rparen, lbrack, rbrack, comma, amp, eq, lt, le, gt, ge, kw_in, kw_not, kw_or, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t pos, std::string text = {}) { out.push_back(Token{k, std::move(text), 0.0, pos}); };
    while (i < s.size()) {
        const char c = s[i];
        const std::size_t start = i;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
        case '(': push(Tok::lparen, start); ++i; continue;
        case ')': push(Tok::rparen, start); ++i; continue;
        case '[': push(Tok::lbrack, start); ++i; continue;
        case ']': push(Tok::rbrack, start); ++i; continue;
        case ',': push(Tok::comma, start); ++i; continue;
        case '&': push(Tok::amp, start); ++i; continue;
        case '=':
            if (i + 1 < s.size() && s[i + 1] == '=') {
                throw SyntaxError(start, "unknown operator '=='");
            }
            push(Tok::eq, start);
            ++i;
            continue;
        case '<':
            if (i + 1 < s.size() && s[i + 1] == '>') {
                throw SyntaxError(start, "unknown operator '<>'");
            }
            if (i + 1 < s.size() && s[i + 1] == '=') {
                push(Tok::le, start);
                i += 2;
            } else {
                push(Tok::lt, start);
                ++i;
            }
            continue;
        case '>':
            if (i + 1 < s.size() && s[i + 1] == '=') {
                push(Tok::ge, start);
                i += 2;
            } else {
                push(Tok::gt, start);
                ++i;
            }
            continue;
        case '!':
        case '|':
        case '~':
        case '^': {
            std::size_t j = i + 1;
            while (j < s.size() && std::string_view("=!|&~^").find(s[j]) != std::string_view::npos) {
                ++j;
            }
            throw SyntaxError(start, "unknown operator '" + std::string(s.substr(i, j - i)) + "'");
        }
        case '\'':
        case '"': {
            const char q = c;
            std::string text;
            ++i;
            bool closed = false;
            while (i < s.size()) {
                if (s[i] == '\\' && i + 1 < s.size()) {
                    text.push_back(s[i + 1]);
                    i += 2;
                    continue;
                }
                if (s[i] == q) {
                    closed = true;
                    ++i;
                    break;
                }
                text.push_back(s[i++]);
            }
            if (!closed) {
                throw SyntaxError(start, "unterminated quoted text");
            }
            // Double quotes delimit feature names, single quotes delimit literals.
            push(q == '"' ? Tok::name : Tok::string, start, std::move(text));
            continue;
        }
        default: break;
        }
        const bool signed_number = (c == '-' || c == '+') && i + 1 < s.size() &&
                                   (std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '.' ||
                                    s.substr(i + 1, 3) == "inf");
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || signed_number) {
            std::size_t j = i + 1;
            if (signed_number && s.substr(i + 1, 3) == "inf") {
                j = i + 4;
            } else {
                while (j < s.size()) {
                    const char d = s[j];
                    const bool exp_sign = (d == '-' || d == '+') && (s[j - 1] == 'e' || s[j - 1] == 'E');
                    if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign) {
                        ++j;
                    } else {
                        break;
                    }
                }
            }
            const auto text = s.substr(i, j - i);
            std::optional<double> v;
            if (text == "-inf") {
                v = -HUGE_VAL;
            } else if (text == "+inf") {
                v = HUGE_VAL;
            } else {
                v = parse_real(text);
            }
            if (!v) {
                throw SyntaxError(start, "malformed number '" + std::string(text) + "'");
            }
            Token t{Tok::number, std::string(text), *v, start};
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (is_name_start(c)) {
            std::size_t j = i + 1;
            while (j < s.size() && is_name_char(s[j])) {
                ++j;
            }
            const auto word = s.substr(i, j - i);
            std::string lower(word);
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
            if (lower == "in") {
                push(Tok::kw_in, start);
            } else if (lower == "not") {
                push(Tok::kw_not, start);
            } else if (lower == "or") {
                push(Tok::kw_or, start);
            } else if (lower == "inf") {
                Token t{Tok::number, std::string(word), HUGE_VAL, start};
                out.push_back(std::move(t));
            } else if (lower == "and") {
                throw SyntaxError(start, "unknown operator 'and' (use '&')");
            } else {
                push(Tok::name, start, std::string(word));
            }
            i = j;
            continue;
        }
        throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    }
    push(Tok::end, s.size());
    return out;
}

bool is_relop(Tok t) { return t == Tok::lt || t == Tok::le || t == Tok::gt || t == Tok::ge; }

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    Predicate parse() {
        if (peek().kind == Tok::end) {
            throw SyntaxError(0, "empty predicate");
        }
        Predicate p = [&] {
            if (peek().kind == Tok::kw_not) {
                next();
                expect(Tok::lparen, "'(' after NOT");
                auto terms = body();
                expect(Tok::rparen, "')' closing NOT");
                return Predicate(std::move(terms), true);
            }
            return Predicate(body());
        }();
        if (peek().kind != Tok::end) {
            throw SyntaxError(peek().pos, "unexpected trailing input");
        }
        return p;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
    const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) {
            throw SyntaxError(peek().pos, std::string("expected ") + what);
        }
        return next();
    }

    std::vector<Conjunction> body() {
        std::vector<Conjunction> terms;
        terms.push_back(conj());
        while (peek().kind == Tok::kw_or) {
            next();
            terms.push_back(conj());
        }
        return terms;
    }

    Conjunction conj() {
        Conjunction out;
        auto add = [&](std::size_t pos, Clause c) {
            if (out.has_feature(c.feature())) {
                throw SyntaxError(pos, "feature '" + c.feature() + "' appears twice in one conjunction");
            }
            out.add(std::move(c));
        };
        std::size_t pos = peek().pos;
        add(pos, clause());
        while (peek().kind == Tok::amp) {
            next();
            pos = peek().pos;
            add(pos, clause());
        }
        return out;
    }

    Clause clause() {
        if (peek().kind == Tok::lparen) {
            next();
            Clause c = atom();
            expect(Tok::rparen, "')'");
            return c;
        }
        return atom();
    }

    // A bound literal: a number, or a quoted ISO-8601 datetime.
    std::pair<double, bool> bound() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            next();
            return {t.number, false};
        }
        if (t.kind == Tok::string) {
            const auto v = parse_iso8601(t.text);
            if (!v) {
                throw SyntaxError(t.pos, "expected a number or ISO-8601 datetime, found '" + t.text + "'");
            }
            next();
            return {static_cast<double>(*v), true};
        }
        throw SyntaxError(t.pos, "expected a number or quoted datetime");
    }

    std::string name() {
        const Token& t = peek();
        if (t.kind != Tok::name) {
            throw SyntaxError(t.pos, "expected a feature name");
        }
        next();
        return t.text;
    }

    std::string literal_text() {
        const Token& t = peek();
        if (t.kind == Tok::string || t.kind == Tok::number) {
            next();
            return t.text;
        }
        if (t.kind == Tok::name) {
            throw SyntaxError(t.pos, "string literals must be single-quoted");
        }
        throw SyntaxError(t.pos, "expected a literal");
    }

    Clause make_range(std::size_t pos, const std::string& feature, Range r) {
        try {
            return Clause(feature, r);
        } catch (const Error& e) {
            throw SyntaxError(pos, e.what());
        }
    }

    Clause atom() {
        const Token& first = peek();
        if (first.kind == Tok::number || first.kind == Tok::string) {
            const std::size_t pos = first.pos;
            const auto [lo, lo_dt] = bound();
            const Token op1 = peek();
            if (!is_relop(op1.kind)) {
                throw SyntaxError(op1.pos, "expected a comparison operator");
            }
            next();
            const std::string feature = name();
            const bool ascending = op1.kind == Tok::lt || op1.kind == Tok::le;
            const bool first_inclusive = op1.kind == Tok::le || op1.kind == Tok::ge;
            if (!is_relop(peek().kind)) {
                // number relop name
                Range r{ascending ? lo : -HUGE_VAL, ascending ? HUGE_VAL : lo, ascending ? first_inclusive : false,
                        ascending ? false : first_inclusive, lo_dt};
                return make_range(pos, feature, r);
            }
            const Token op2 = next();
            const bool ascending2 = op2.kind == Tok::lt || op2.kind == Tok::le;
            if (ascending != ascending2) {
                throw SyntaxError(op2.pos, "comparison operators must point the same way");
            }
            const auto [hi, hi_dt] = bound();
            if (lo_dt != hi_dt) {
                throw SyntaxError(pos, "range mixes datetime and numeric bounds");
            }
            const bool second_inclusive = op2.kind == Tok::le || op2.kind == Tok::ge;
            Range r = ascending ? Range{lo, hi, first_inclusive, second_inclusive, lo_dt}
                                : Range{hi, lo, second_inclusive, first_inclusive, lo_dt};
            return make_range(pos, feature, r);
        }

        const std::size_t pos = peek().pos;
        const std::string feature = name();
        const Token op = peek();
        if (op.kind == Tok::eq) {
            next();
            const Token& lit = peek();
            if (lit.kind == Tok::number) {
                next();
                return make_range(pos, feature, Range{lit.number, lit.number, true, true, false});
            }
            return Clause::equals(feature, literal_text());
        }
        if (op.kind == Tok::kw_in) {
            next();
            expect(Tok::lbrack, "'[' after in");
            std::vector<std::string> values;
            values.push_back(literal_text());
            while (peek().kind == Tok::comma) {
                next();
                values.push_back(literal_text());
            }
            expect(Tok::rbrack, "']'");
            return Clause::member_of(feature, std::move(values));
        }
        if (is_relop(op.kind)) {
            next();
            const auto [v, dt] = bound();
            switch (op.kind) {
            case Tok::lt: return make_range(pos, feature, Range{-HUGE_VAL, v, false, false, dt});
            case Tok::le: return make_range(pos, feature, Range{-HUGE_VAL, v, false, true, dt});
            case Tok::gt: return make_range(pos, feature, Range{v, HUGE_VAL, false, false, dt});
            default: return make_range(pos, feature, Range{v, HUGE_VAL, true, false, dt});
            }
        }
        if (op.kind == Tok::name) {
            throw SyntaxError(op.pos, "unknown operator '" + op.text + "'");
        }
        throw SyntaxError(op.pos, "expected '=', 'in' or a comparison operator");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

Predicate parse_predicate(std::string_view text) { return Parser(text).parse(); }

} // namespace predex
