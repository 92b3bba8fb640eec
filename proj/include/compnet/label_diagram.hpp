#ifndef COMPNET_LABEL_DIAGRAM_HPP
#define COMPNET_LABEL_DIAGRAM_HPP

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitset.hpp"

namespace compnet {

using StateId = std::uint32_t;
/// Sorted, duplicate-free list of states.
using StateSet = std::vector<StateId>;

inline StateSet set_union(const StateSet& a, const StateSet& b)
{
    StateSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct StateSetHash {
    std::size_t operator()(const StateSet& s) const
    {
        std::size_t h = s.size();
        for (auto x : s) h ^= std::hash<StateId>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

struct PairHash {
    std::size_t operator()(const std::pair<std::uint32_t, std::uint32_t>& p) const
    {
        return std::hash<std::uint64_t>{}((std::uint64_t{p.first} << 32) | p.second);
    }
};

/// Node store for reduced ordered decision diagrams whose terminals are sets of
/// states rather than booleans. A diagram over `n` variables denotes a function
/// {0,1}^n -> 2^States; variable 0 is tested first. Unions are pointwise.
///
/// Each automaton owns its store; there is no global unique table.
class DiagramStore {
public:
    using Ref = std::uint32_t;
    static constexpr std::uint32_t terminal_var = std::numeric_limits<std::uint32_t>::max();

    DiagramStore() { terminal(StateSet{}); }

    /// The diagram mapping every label to the empty set.
    static constexpr Ref empty() { return 0; }

    Ref terminal(const StateSet& s)
    {
        auto [it, inserted] = terminal_index_.try_emplace(s, static_cast<Ref>(nodes_.size()));
        if (inserted) {
            nodes_.push_back(Node{terminal_var, static_cast<Ref>(sets_.size()), 0});
            sets_.push_back(s);
        }
        return it->second;
    }

    Ref node(std::uint32_t var, Ref lo, Ref hi)
    {
        if (lo == hi) return lo;
        assert(is_terminal(lo) || this->var(lo) > var);
        assert(is_terminal(hi) || this->var(hi) > var);
        const Key key{var, lo, hi};
        auto [it, inserted] = node_index_.try_emplace(key, static_cast<Ref>(nodes_.size()));
        if (inserted) nodes_.push_back(Node{var, lo, hi});
        return it->second;
    }

    bool is_terminal(Ref r) const { return nodes_[r].var == terminal_var; }
    std::uint32_t var(Ref r) const { return nodes_[r].var; }
    Ref lo(Ref r) const { return nodes_[r].lo; }
    Ref hi(Ref r) const { return nodes_[r].hi; }
    const StateSet& set_of(Ref r) const
    {
        assert(is_terminal(r));
        return sets_[nodes_[r].lo];
    }
    std::size_t node_count() const { return nodes_.size(); }

    /// Branch of r for `var` = bit, where r does not test any variable below var.
    Ref cofactor(Ref r, std::uint32_t v, bool bit) const
    {
        if (is_terminal(r) || var(r) != v) return r;
        return bit ? hi(r) : lo(r);
    }

    const StateSet& lookup(Ref r, const Bitset& label) const
    {
        while (!is_terminal(r)) r = label.test(var(r)) ? hi(r) : lo(r);
        return set_of(r);
    }

    Ref unite(Ref a, Ref b)
    {
        if (a == b || b == empty()) return a;
        if (a == empty()) return b;
        if (a > b) std::swap(a, b);
        if (auto it = union_cache_.find({a, b}); it != union_cache_.end()) return it->second;
        Ref out;
        if (is_terminal(a) && is_terminal(b)) {
            out = terminal(set_union(set_of(a), set_of(b)));
        } else {
            const std::uint32_t va = var(a), vb = var(b);
            const std::uint32_t v = std::min(va, vb);
            const Ref a0 = cofactor(a, v, false), a1 = cofactor(a, v, true);
            const Ref b0 = cofactor(b, v, false), b1 = cofactor(b, v, true);
            const Ref lo_r = unite(a0, b0);
            const Ref hi_r = unite(a1, b1);
            out = node(v, lo_r, hi_r);
        }
        union_cache_.emplace(std::pair{a, b}, out);
        return out;
    }

    /// Diagram over `vars` variables mapping the cube `pattern` to s and every
    /// other label to the empty set. pattern[i] is 0, 1, or -1 (don't care).
    Ref cube(const std::vector<signed char>& pattern, const StateSet& s)
    {
        Ref r = terminal(s);
        if (s.empty()) return r;
        for (std::size_t i = pattern.size(); i-- > 0;) {
            if (pattern[i] < 0) continue;
            r = pattern[i] ? node(static_cast<std::uint32_t>(i), empty(), r)
                           : node(static_cast<std::uint32_t>(i), r, empty());
        }
        return r;
    }

    /// Diagram mapping each listed label to its set (labels must be distinct)
    /// and every other label to the empty set.
    Ref from_entries(std::size_t vars, std::vector<std::pair<Bitset, StateSet>> entries)
    {
        std::sort(entries.begin(), entries.end());
        return build_range(entries, 0, entries.size(), 0, vars);
    }

    /// Calls f(pattern, set) for each maximal path to a non-empty terminal, in
    /// lexicographic order of the smallest label of each cube.
    template <typename F>
    void for_each_cube(Ref r, std::size_t vars, F&& f) const
    {
        std::vector<signed char> pattern(vars, -1);
        walk_cubes(r, 0, pattern, f);
    }

    /// Every distinct terminal set reachable from r, in lexicographic order of
    /// first occurrence.
    std::vector<Ref> terminals_of(Ref r) const
    {
        std::vector<Ref> out;
        std::vector<bool> seen(nodes_.size(), false);
        auto rec = [&](auto&& self, Ref x) -> void {
            if (seen[x]) return;
            seen[x] = true;
            if (is_terminal(x)) {
                out.push_back(x);
                return;
            }
            self(self, lo(x));
            self(self, hi(x));
        };
        rec(rec, r);
        return out;
    }

    /// Copies r from src into this store, replacing every terminal set S by
    /// map(S) and renaming variable v to rename(v) (rename must be monotone).
    template <typename MapFn, typename RenameFn>
    Ref import(const DiagramStore& src, Ref r, MapFn&& map, RenameFn&& rename)
    {
        std::unordered_map<Ref, Ref> memo;
        return import_rec(src, r, map, rename, memo);
    }

    template <typename MapFn>
    Ref import(const DiagramStore& src, Ref r, MapFn&& map)
    {
        return import(src, r, std::forward<MapFn>(map), [](std::uint32_t v) { return v; });
    }

private:
    struct Node {
        std::uint32_t var;
        Ref lo;
        Ref hi;
    };
    struct Key {
        std::uint32_t var;
        Ref lo, hi;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            std::size_t h = std::hash<std::uint64_t>{}((std::uint64_t{k.lo} << 32) | k.hi);
            return h ^ (std::hash<std::uint32_t>{}(k.var) * 0x9e3779b97f4a7c15ULL);
        }
    };

    Ref build_range(const std::vector<std::pair<Bitset, StateSet>>& e, std::size_t begin, std::size_t end,
                    std::size_t v, std::size_t vars)
    {
        if (begin == end) return empty();
        if (v == vars) {
            assert(end - begin == 1);
            return terminal(e[begin].second);
        }
        // entries are sorted with bit v ascending inside the shared prefix
        std::size_t mid = begin;
        while (mid < end && !e[mid].first.test(v)) ++mid;
        const Ref lo_r = build_range(e, begin, mid, v + 1, vars);
        const Ref hi_r = build_range(e, mid, end, v + 1, vars);
        return node(static_cast<std::uint32_t>(v), lo_r, hi_r);
    }

    template <typename F>
    void walk_cubes(Ref r, std::size_t v, std::vector<signed char>& pattern, F& f) const
    {
        if (is_terminal(r)) {
            if (!set_of(r).empty()) f(static_cast<const std::vector<signed char>&>(pattern), set_of(r));
            return;
        }
        const std::uint32_t rv = var(r);
        for (std::size_t i = v; i < rv; ++i) pattern[i] = -1;
        pattern[rv] = 0;
        walk_cubes(lo(r), rv + 1, pattern, f);
        pattern[rv] = 1;
        walk_cubes(hi(r), rv + 1, pattern, f);
        pattern[rv] = -1;
    }

    template <typename MapFn, typename RenameFn>
    Ref import_rec(const DiagramStore& src, Ref r, MapFn& map, RenameFn& rename, std::unordered_map<Ref, Ref>& memo)
    {
        if (auto it = memo.find(r); it != memo.end()) return it->second;
        Ref out;
        if (src.is_terminal(r)) {
            out = terminal(map(src.set_of(r)));
        } else {
            const Ref lo_r = import_rec(src, src.lo(r), map, rename, memo);
            const Ref hi_r = import_rec(src, src.hi(r), map, rename, memo);
            out = node(rename(src.var(r)), lo_r, hi_r);
        }
        memo.emplace(r, out);
        return out;
    }

    std::vector<Node> nodes_;
    std::vector<StateSet> sets_;
    std::unordered_map<StateSet, Ref, StateSetHash> terminal_index_;
    std::unordered_map<Key, Ref, KeyHash> node_index_;
    std::unordered_map<std::pair<Ref, Ref>, Ref, PairHash> union_cache_;
};

/// Renders a cube pattern as "alpha/beta" with '*' for don't-care bits.
inline std::string cube_label(const std::vector<signed char>& pattern, std::size_t left_width)
{
    std::string s;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (i == left_width) s += '/';
        s += pattern[i] < 0 ? '*' : static_cast<char>('0' + pattern[i]);
    }
    if (left_width == pattern.size()) s += '/';
    return s;
}

} // namespace compnet

#endif
