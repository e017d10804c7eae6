#pragma once

// Fixed-length dynamic bitset. Used for subset-index vectors, whose length is
// the tile height m and therefore not known at compile time.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace prosparse {

class BitVector {
public:
    static constexpr std::size_t word_bits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_((size + word_bits - 1) / word_bits, 0) {}

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t i) const { return (words_[i / word_bits] >> (i % word_bits)) & 1u; }
    void set(std::size_t i) { words_[i / word_bits] |= std::uint64_t{1} << (i % word_bits); }
    void reset(std::size_t i) { words_[i / word_bits] &= ~(std::uint64_t{1} << (i % word_bits)); }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool none() const noexcept {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    // Calls f(index) for every set bit in ascending order.
    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w != 0) {
                f(wi * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for_each_set([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace prosparse
