#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace repairqa {

// Fixed-size dynamic bitset used for rule masks and atom sets.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t size, bool value = false)
        : size_(size), words_((size + 63) / 64, value ? ~0ULL : 0ULL) {
        trim();
    }

    static Bitset full(std::size_t size) { return Bitset(size, true); }

    std::size_t size() const { return size_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
    void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    bool none() const {
        for (std::uint64_t w : words_)
            if (w) return false;
        return true;
    }

    bool is_subset_of(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    bool intersects(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    Bitset operator~() const {
        Bitset r = *this;
        for (auto& w : r.words_) w = ~w;
        r.trim();
        return r;
    }

    Bitset operator&(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
        return r;
    }

    Bitset operator|(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
        return r;
    }

    bool operator==(const Bitset& o) const { return size_ == o.size_ && words_ == o.words_; }
    bool operator!=(const Bitset& o) const { return !(*this == o); }
    bool operator<(const Bitset& o) const {  // arbitrary total order for maps
        if (size_ != o.size_) return size_ < o.size_;
        return words_ < o.words_;
    }

    template <typename Fn>
    void for_each_set(Fn fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                unsigned bit = static_cast<unsigned>(__builtin_ctzll(w));
                fn(wi * 64 + bit);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> set_bits() const {
        std::vector<std::size_t> out;
        for_each_set([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    std::size_t hash() const {
        std::size_t h = size_;
        for (std::uint64_t w : words_)
            h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

private:
    void trim() {
        if (size_ & 63) words_.back() &= (1ULL << (size_ & 63)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace repairqa
