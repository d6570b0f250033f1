#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace spatialq {

/// Append-only bit sequence backed by 64-bit words. Bit i lives in word
/// i/64 at position i%64 (LSB first); range counting uses word-level
/// population counts.
class BitVec {
public:
    BitVec() = default;

    void push_back(bool bit) {
        const std::size_t word = size_ / 64;
        if (word == words_.size()) words_.push_back(0);
        if (bit) words_[word] |= (std::uint64_t{1} << (size_ % 64));
        ++size_;
    }

    bool operator[](std::size_t i) const {
        return (words_[i / 64] >> (i % 64)) & 1u;
    }

    void set(std::size_t i, bool bit) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (bit)
            words_[i / 64] |= mask;
        else
            words_[i / 64] &= ~mask;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    /// Number of 1-bits in the half-open range [begin, end).
    std::uint64_t count_ones(std::size_t begin, std::size_t end) const {
        if (begin >= end) return 0;
        std::uint64_t total = 0;
        std::size_t w = begin / 64;
        const std::size_t w_last = (end - 1) / 64;
        std::uint64_t first_mask = ~std::uint64_t{0} << (begin % 64);
        for (; w <= w_last; ++w) {
            std::uint64_t bits = words_[w] & first_mask;
            if (w == w_last && end % 64 != 0)
                bits &= ~std::uint64_t{0} >> (64 - end % 64);
            total += static_cast<std::uint64_t>(std::popcount(bits));
            first_mask = ~std::uint64_t{0};
        }
        return total;
    }

    std::uint64_t count_zeros(std::size_t begin, std::size_t end) const {
        if (begin >= end) return 0;
        return (end - begin) - count_ones(begin, end);
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const BitVec& other) const {
        if (size_ != other.size_) return false;
        for (std::size_t i = 0; i < size_; ++i)
            if ((*this)[i] != other[i]) return false;
        return true;
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

}  // namespace spatialq
