#ifndef COMPNET_BITSET_HPP
#define COMPNET_BITSET_HPP

#include <bit>
#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace compnet {

/// Fixed-width dynamic bitset. Used for markings, pre/post sets and boundary
/// port sets; bit i set means element i is a member.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

    static Bitset of(std::size_t width, std::initializer_list<std::size_t> members)
    {
        Bitset b(width);
        for (auto m : members) b.set(m);
        return b;
    }

    template <typename Range>
    static Bitset from_indices(std::size_t width, const Range& members)
    {
        Bitset b(width);
        for (auto m : members) b.set(static_cast<std::size_t>(m));
        return b;
    }

    /// Parses a string of '0'/'1' characters, character i giving bit i.
    static Bitset from_string(const std::string& bits)
    {
        Bitset b(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] == '1') b.set(i);
        return b;
    }

    std::size_t width() const { return width_; }

    bool test(std::size_t i) const
    {
        assert(i < width_);
        return (words_[i / 64] >> (i % 64)) & 1u;
    }

    void set(std::size_t i, bool value = true)
    {
        assert(i < width_);
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (value)
            words_[i / 64] |= mask;
        else
            words_[i / 64] &= ~mask;
    }

    void reset(std::size_t i) { set(i, false); }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool any() const
    {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool intersects(const Bitset& o) const
    {
        assert(width_ == o.width_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    bool is_subset_of(const Bitset& o) const
    {
        assert(width_ == o.width_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    Bitset& operator|=(const Bitset& o)
    {
        assert(width_ == o.width_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o)
    {
        assert(width_ == o.width_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    /// Set difference.
    Bitset& operator-=(const Bitset& o)
    {
        assert(width_ == o.width_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator-(Bitset a, const Bitset& b) { return a -= b; }

    /// Concatenation: bits of *this occupy [0, width()), bits of tail follow.
    Bitset concat(const Bitset& tail) const
    {
        Bitset r(width_ + tail.width_);
        for_each([&](std::size_t i) { r.set(i); });
        tail.for_each([&](std::size_t i) { r.set(width_ + i); });
        return r;
    }

    /// Bits [from, from + len) as a new bitset.
    Bitset slice(std::size_t from, std::size_t len) const
    {
        assert(from + len <= width_);
        Bitset r(len);
        for (std::size_t i = 0; i < len; ++i)
            if (test(from + i)) r.set(i);
        return r;
    }

    template <typename F>
    void for_each(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(word));
                f(w * 64 + bit);
                word &= word - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    /// '0'/'1' string, bit 0 first.
    std::string to_string() const
    {
        std::string s(width_, '0');
        for_each([&](std::size_t i) { s[i] = '1'; });
        return s;
    }

    std::size_t hash() const
    {
        std::size_t h = std::hash<std::size_t>{}(width_);
        for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

    friend bool operator==(const Bitset&, const Bitset&) = default;

    /// Total order: by width, then lexicographically by bit string.
    friend std::strong_ordering operator<=>(const Bitset& a, const Bitset& b)
    {
        if (auto c = a.width_ <=> b.width_; c != 0) return c;
        for (std::size_t i = 0; i < a.width_; ++i) {
            const bool x = a.test(i), y = b.test(i);
            if (x != y) return x ? std::strong_ordering::greater : std::strong_ordering::less;
        }
        return std::strong_ordering::equal;
    }

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

} // namespace compnet

#endif
