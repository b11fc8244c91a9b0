#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace predex {

/// Dense bitset over dataset row-ids. This is the Selection p(D) of a predicate.
class RowSet {
public:
    RowSet() = default;
    explicit RowSet(std::size_t universe, bool filled = false);

    static RowSet from_rows(std::size_t universe, std::span<const std::uint32_t> rows);

    std::size_t universe() const noexcept { return universe_; }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    bool contains(std::size_t row) const noexcept {
        return (words_[row >> 6] >> (row & 63)) & 1u;
    }
    void insert(std::size_t row) noexcept { words_[row >> 6] |= std::uint64_t{1} << (row & 63); }
    void erase(std::size_t row) noexcept { words_[row >> 6] &= ~(std::uint64_t{1} << (row & 63)); }

    RowSet& operator&=(const RowSet& other);
    RowSet& operator|=(const RowSet& other);
    RowSet complement() const;

    friend RowSet operator&(RowSet a, const RowSet& b) { return a &= b; }
    friend RowSet operator|(RowSet a, const RowSet& b) { return a |= b; }
    friend bool operator==(const RowSet&, const RowSet&) = default;

    bool intersects(const RowSet& other) const noexcept;
    std::size_t intersection_count(const RowSet& other) const noexcept;
    bool is_subset_of(const RowSet& other) const noexcept;

    /// Rows in ascending order.
    std::vector<std::uint32_t> to_vector() const;

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int bit = __builtin_ctzll(bits);
                f(static_cast<std::uint32_t>((w << 6) + static_cast<std::size_t>(bit)));
                bits &= bits - 1;
            }
        }
    }

    /// Sum of values[i] over members, accumulated in ascending row order.
    double sum(std::span<const double> values) const;

private:
    void trim() noexcept;

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace predex
