#include "predex/datetime.hpp"

#include <cctype>
#include <cstdio>

namespace predex {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2 ? 1 : 0;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2 ? 1 : 0;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : table[m - 1];
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ == s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::optional<unsigned> digits(std::size_t n) {
        if (pos_ + n > s_.size()) {
            return std::nullopt;
        }
        unsigned v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const char c = s_[pos_ + i];
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                return std::nullopt;
            }
            v = v * 10 + static_cast<unsigned>(c - '0');
        }
        pos_ += n;
        return v;
    }
    void skip_digits() {
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    Cursor c(text);
    const auto year = c.digits(4);
    if (!year || !c.eat('-')) {
        return std::nullopt;
    }
    const auto month = c.digits(2);
    if (!month || !c.eat('-')) {
        return std::nullopt;
    }
    const auto day = c.digits(2);
    if (!day || *month < 1 || *month > 12 || *day < 1 || *day > days_in_month(*year, *month)) {
        return std::nullopt;
    }
    std::int64_t seconds = days_from_civil(*year, *month, *day) * 86400;
    if (c.done()) {
        return seconds;
    }
    if (!c.eat(' ') && !c.eat('T')) {
        return std::nullopt;
    }
    const auto hh = c.digits(2);
    if (!hh || !c.eat(':')) {
        return std::nullopt;
    }
    const auto mm = c.digits(2);
    if (!mm || *hh > 23 || *mm > 59) {
        return std::nullopt;
    }
    unsigned ss = 0;
    if (c.eat(':')) {
        const auto s = c.digits(2);
        if (!s || *s > 60) {
            return std::nullopt;
        }
        ss = *s;
        if (c.eat('.')) {
            if (!std::isdigit(static_cast<unsigned char>(c.peek()))) {
                return std::nullopt;
            }
            c.skip_digits();
        }
    }
    seconds += static_cast<std::int64_t>(*hh) * 3600 + static_cast<std::int64_t>(*mm) * 60 + ss;
    if (c.eat('Z')) {
        return c.done() ? std::optional(seconds) : std::nullopt;
    }
    if (c.peek() == '+' || c.peek() == '-') {
        const int sign = c.peek() == '+' ? 1 : -1;
        c.eat(c.peek());
        const auto oh = c.digits(2);
        if (!oh) {
            return std::nullopt;
        }
        c.eat(':');
        const auto om = c.digits(2);
        if (!om || !c.done()) {
            return std::nullopt;
        }
        return seconds - sign * (static_cast<std::int64_t>(*oh) * 3600 + *om * 60);
    }
    return c.done() ? std::optional(seconds) : std::nullopt;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y = 0;
    unsigned m = 0;
    unsigned d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02lld:%02lld:%02lld", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

} // namespace predex
