#include "predex/row_set.hpp"

#include <bit>
#include <cassert>

namespace predex {

RowSet::RowSet(std::size_t universe, bool filled)
    : universe_(universe), words_((universe + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
    trim();
}

RowSet RowSet::from_rows(std::size_t universe, std::span<const std::uint32_t> rows) {
    RowSet out(universe);
    for (auto r : rows) {
        assert(r < universe);
        out.insert(r);
    }
    return out;
}

std::size_t RowSet::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

RowSet& RowSet::operator&=(const RowSet& other) {
    assert(universe_ == other.universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] &= other.words_[i];
    }
    return *this;
}

RowSet& RowSet::operator|=(const RowSet& other) {
    assert(universe_ == other.universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] |= other.words_[i];
    }
    return *this;
}

RowSet RowSet::complement() const {
    RowSet out = *this;
    for (auto& w : out.words_) {
        w = ~w;
    }
    out.trim();
    return out;
}

bool RowSet::intersects(const RowSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if ((words_[i] & other.words_[i]) != 0) {
            return true;
        }
    }
    return false;
}

std::size_t RowSet::intersection_count(const RowSet& other) const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    }
    return n;
}

bool RowSet::is_subset_of(const RowSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if ((words_[i] & ~other.words_[i]) != 0) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint32_t> RowSet::to_vector() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for_each([&](std::uint32_t r) { out.push_back(r); });
    return out;
}

double RowSet::sum(std::span<const double> values) const {
    double s = 0.0;
    for_each([&](std::uint32_t r) { s += values[r]; });
    return s;
}

void RowSet::trim() noexcept {
    const std::size_t tail = universe_ & 63;
    if (tail != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
}

} // namespace predex
