#ifndef COMPNET_NFA_HPP
#define COMPNET_NFA_HPP

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "label_diagram.hpp"
#include "net.hpp"

namespace compnet {

/// NFA with boundaries A : k -> l. Labels are bit strings of length k + l
/// (left bits first); each state's transition function is a decision diagram
/// from labels to successor sets.
class BoundedNfa {
public:
    using Ref = DiagramStore::Ref;

    BoundedNfa() = default;
    BoundedNfa(std::size_t left, std::size_t right) : left_(left), right_(right) {}

    std::size_t left_width() const { return left_; }
    std::size_t right_width() const { return right_; }
    std::size_t label_bits() const { return left_ + right_; }
    std::size_t size() const { return delta_.size(); }

    StateId add_state(bool accepting = false)
    {
        delta_.push_back(DiagramStore::empty());
        final_.push_back(accepting);
        return static_cast<StateId>(delta_.size() - 1);
    }

    void set_delta(StateId s, Ref r) { delta_[s] = r; }
    void set_final(StateId s, bool f) { final_[s] = f; }
    void set_initial(StateSet init) { initial_ = std::move(init); }

    Ref delta(StateId s) const { return delta_[s]; }
    bool is_final(StateId s) const { return final_[s]; }
    const StateSet& initial() const { return initial_; }

    DiagramStore& store() { return store_; }
    const DiagramStore& store() const { return store_; }

    /// Successors of s under a label of label_bits() bits.
    const StateSet& successors(StateId s, const Bitset& label) const { return store_.lookup(delta_[s], label); }
    const StateSet& successors(StateId s, const StepLabel& label) const { return successors(s, label.flat()); }

    Bitset epsilon() const { return Bitset(label_bits()); }

    /// Optional human-readable state names (markings, product pairs).
    void set_state_names(std::vector<std::string> names) { names_ = std::move(names); }
    std::string state_name(StateId s) const { return s < names_.size() ? names_[s] : std::to_string(s); }

    /// Rebuilds the store keeping only nodes reachable from the state diagrams.
    void compact()
    {
        DiagramStore fresh;
        for (auto& d : delta_) d = fresh.import(store_, d, [](const StateSet& s) { return s; });
        store_ = std::move(fresh);
    }

private:
    std::size_t left_ = 0;
    std::size_t right_ = 0;
    DiagramStore store_;
    std::vector<Ref> delta_;
    std::vector<bool> final_;
    StateSet initial_;
    std::vector<std::string> names_;
};

/// The reachable part of the step transition system of n as an NFA. States are
/// the markings reachable from `initial` in breadth-first order; accepting
/// states are those in `final`.
inline BoundedNfa net_to_nfa(const Net& n, const std::vector<Marking>& initial, const std::vector<Marking>& final)
{
    if (initial.empty()) throw ValidationError("net_to_nfa: empty set of initial markings");
    for (const auto& m : initial)
        if (m.width() != n.place_count()) throw ValidationError("net_to_nfa: initial marking of wrong width");
    std::unordered_map<Marking, StateId, BitsetHash> index;
    std::unordered_map<Marking, bool, BitsetHash> is_final;
    for (const auto& m : final) is_final.emplace(m, true);

    BoundedNfa a(n.left_width(), n.right_width());
    std::vector<Marking> markings;
    std::deque<StateId> queue;
    auto intern = [&](const Marking& m) {
        auto [it, inserted] = index.try_emplace(m, static_cast<StateId>(markings.size()));
        if (inserted) {
            markings.push_back(m);
            a.add_state(is_final.count(m) > 0);
            queue.push_back(it->second);
        }
        return it->second;
    };
    StateSet init;
    for (const auto& m : initial) init.push_back(intern(m));
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    a.set_initial(init);

    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        std::map<Bitset, StateSet> by_label;
        for (const auto& step : step_successors(n, Marking(markings[s]))) {
            const StateId t = intern(step.target);
            auto& targets = by_label[step.label.flat()];
            targets.insert(std::lower_bound(targets.begin(), targets.end(), t), t);
        }
        std::vector<std::pair<Bitset, StateSet>> entries(by_label.begin(), by_label.end());
        a.set_delta(s, a.store().from_entries(a.label_bits(), std::move(entries)));
    }
    std::vector<std::string> names;
    names.reserve(markings.size());
    for (const auto& m : markings) {
        std::string name = "{";
        for (const auto& p : n.place_ids(m)) name += (name.size() > 1 ? "," : "") + p;
        names.push_back(name + "}");
    }
    a.set_state_names(std::move(names));
    return a;
}

namespace detail {

/// Numbering of product states discovered during a reachable-product build.
class PairIndex {
public:
    StateId get(StateId x, StateId y, bool& created)
    {
        auto [it, inserted] = index_.try_emplace({x, y}, static_cast<StateId>(pairs_.size()));
        created = inserted;
        if (inserted) pairs_.emplace_back(x, y);
        return it->second;
    }
    const std::pair<StateId, StateId>& pair(StateId s) const { return pairs_[s]; }
    std::size_t size() const { return pairs_.size(); }

private:
    std::unordered_map<std::pair<std::uint32_t, std::uint32_t>, StateId, PairHash> index_;
    std::vector<std::pair<StateId, StateId>> pairs_;
};

template <typename Step>
BoundedNfa build_product(const BoundedNfa& a, const BoundedNfa& b, std::size_t left, std::size_t right, Step&& step)
{
    BoundedNfa out(left, right);
    PairIndex pairs;
    std::deque<StateId> queue;
    auto intern = [&](StateId x, StateId y) {
        bool created = false;
        const StateId s = pairs.get(x, y, created);
        if (created) {
            out.add_state(a.is_final(x) && b.is_final(y));
            queue.push_back(s);
        }
        return s;
    };
    StateSet init;
    for (auto x : a.initial())
        for (auto y : b.initial()) init.push_back(intern(x, y));
    std::sort(init.begin(), init.end());
    out.set_initial(init);
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        const auto [x, y] = pairs.pair(s);
        out.set_delta(s, step(out.store(), a.delta(x), b.delta(y), intern));
    }
    std::vector<std::string> names;
    for (std::size_t s = 0; s < pairs.size(); ++s)
        names.push_back("(" + a.state_name(pairs.pair(static_cast<StateId>(s)).first) + "," +
                        b.state_name(pairs.pair(static_cast<StateId>(s)).second) + ")");
    out.set_state_names(std::move(names));
    out.compact();
    return out;
}

} // namespace detail

/// Synchronous product over a shared boundary:
/// (x,y) --a/b--> (x',y') iff exists g. x --a/g--> x' and y --g/b--> y'.
///
/// The middle bits are conjoined and projected out directly on the diagrams:
/// a's variables are alpha (k) then gamma (l); b's are gamma (l) then beta (m).
inline BoundedNfa nfa_seq(const BoundedNfa& a, const BoundedNfa& b)
{
    if (a.right_width() != b.left_width())
        throw WidthMismatch("nfa_seq: right width " + std::to_string(a.right_width()) + " differs from left width " +
                            std::to_string(b.left_width()));
    using Ref = DiagramStore::Ref;
    const auto k = static_cast<std::uint32_t>(a.left_width());
    const auto l = static_cast<std::uint32_t>(a.right_width());
    const DiagramStore& sa = a.store();
    const DiagramStore& sb = b.store();

    std::unordered_map<std::pair<Ref, Ref>, Ref, PairHash> alpha_memo, gamma_memo, pair_memo;

    auto step = [&](DiagramStore& out, Ref da, Ref db, auto& intern) -> Ref {
        // pair_map: b's beta-diagram with terminals T replaced by Sa x T
        auto pair_map = [&](auto&& self, Ref sa_term, Ref rb) -> Ref {
            if (auto it = pair_memo.find({sa_term, rb}); it != pair_memo.end()) return it->second;
            Ref r;
            if (sb.is_terminal(rb)) {
                StateSet s;
                for (auto x : sa.set_of(sa_term))
                    for (auto y : sb.set_of(rb)) s.push_back(intern(x, y));
                std::sort(s.begin(), s.end());
                s.erase(std::unique(s.begin(), s.end()), s.end());
                r = out.terminal(s);
            } else {
                const Ref lo_r = self(self, sa_term, sb.lo(rb));
                const Ref hi_r = self(self, sa_term, sb.hi(rb));
                r = out.node(k + sb.var(rb) - l, lo_r, hi_r);
            }
            pair_memo.emplace(std::pair{sa_term, rb}, r);
            return r;
        };
        auto gamma_join = [&](auto&& self, Ref ra, Ref rb) -> Ref {
            if (ra == DiagramStore::empty() || rb == DiagramStore::empty()) return DiagramStore::empty();
            if (auto it = gamma_memo.find({ra, rb}); it != gamma_memo.end()) return it->second;
            const std::uint32_t va = sa.is_terminal(ra) ? l : sa.var(ra) - k;
            const std::uint32_t vb = (sb.is_terminal(rb) || sb.var(rb) >= l) ? l : sb.var(rb);
            const std::uint32_t v = std::min(va, vb);
            Ref r;
            if (v == l) {
                r = pair_map(pair_map, ra, rb);
            } else {
                const Ref a0 = sa.cofactor(ra, k + v, false), a1 = sa.cofactor(ra, k + v, true);
                const Ref b0 = sb.cofactor(rb, v, false), b1 = sb.cofactor(rb, v, true);
                const Ref r0 = self(self, a0, b0);
                const Ref r1 = self(self, a1, b1);
                r = out.unite(r0, r1);
            }
            gamma_memo.emplace(std::pair{ra, rb}, r);
            return r;
        };
        auto alpha_walk = [&](auto&& self, Ref ra) -> Ref {
            if (sa.is_terminal(ra) || sa.var(ra) >= k) return gamma_join(gamma_join, ra, db);
            if (auto it = alpha_memo.find({ra, db}); it != alpha_memo.end()) return it->second;
            const Ref lo_r = self(self, sa.lo(ra));
            const Ref hi_r = self(self, sa.hi(ra));
            const Ref r = out.node(sa.var(ra), lo_r, hi_r);
            alpha_memo.emplace(std::pair{ra, db}, r);
            return r;
        };
        return alpha_walk(alpha_walk, da);
    };
    return detail::build_product(a, b, a.left_width(), b.right_width(), step);
}

/// Unsynchronised product: (x,y) --ag/bd--> (x',y') iff x --a/b--> x' and
/// y --g/d--> y'. Result label order is a-left, b-left, a-right, b-right.
inline BoundedNfa nfa_tensor(const BoundedNfa& a, const BoundedNfa& b)
{
    using Ref = DiagramStore::Ref;
    const auto k = static_cast<std::uint32_t>(a.left_width());
    const auto l = static_cast<std::uint32_t>(a.right_width());
    const auto p = static_cast<std::uint32_t>(b.left_width());
    constexpr std::uint32_t none = DiagramStore::terminal_var;
    const DiagramStore& sa = a.store();
    const DiagramStore& sb = b.store();
    auto map_a = [&](Ref r) { return sa.is_terminal(r) ? none : (sa.var(r) < k ? sa.var(r) : sa.var(r) + p); };
    auto map_b = [&](Ref r) { return sb.is_terminal(r) ? none : (sb.var(r) < p ? k + sb.var(r) : sb.var(r) + k + l); };

    std::unordered_map<std::pair<Ref, Ref>, Ref, PairHash> memo;
    auto step = [&](DiagramStore& out, Ref da, Ref db, auto& intern) -> Ref {
        auto rec = [&](auto&& self, Ref ra, Ref rb) -> Ref {
            if (ra == DiagramStore::empty() || rb == DiagramStore::empty()) return DiagramStore::empty();
            if (auto it = memo.find({ra, rb}); it != memo.end()) return it->second;
            Ref r;
            const std::uint32_t va = map_a(ra), vb = map_b(rb);
            if (va == none && vb == none) {
                StateSet s;
                for (auto x : sa.set_of(ra))
                    for (auto y : sb.set_of(rb)) s.push_back(intern(x, y));
                std::sort(s.begin(), s.end());
                r = out.terminal(s);
            } else if (va < vb) {
                const Ref lo_r = self(self, sa.lo(ra), rb);
                const Ref hi_r = self(self, sa.hi(ra), rb);
                r = out.node(va, lo_r, hi_r);
            } else {
                const Ref lo_r = self(self, ra, sb.lo(rb));
                const Ref hi_r = self(self, ra, sb.hi(rb));
                r = out.node(vb, lo_r, hi_r);
            }
            memo.emplace(std::pair{ra, rb}, r);
            return r;
        };
        return rec(rec, da, db);
    };
    return detail::build_product(a, b, a.left_width() + b.left_width(), a.right_width() + b.right_width(), step);
}

/// Explicit (label, successor) edges of state s, labels enumerated in
/// lexicographic order. Intended for small automata and tests.
inline std::vector<std::pair<Bitset, StateId>> explicit_edges(const BoundedNfa& a, StateId s)
{
    std::vector<std::pair<Bitset, StateId>> out;
    const std::size_t bits = a.label_bits();
    a.store().for_each_cube(a.delta(s), bits, [&](const std::vector<signed char>& pattern, const StateSet& set) {
        std::vector<std::size_t> free;
        Bitset base(bits);
        for (std::size_t i = 0; i < bits; ++i) {
            if (pattern[i] < 0) free.push_back(i);
            else if (pattern[i] == 1) base.set(i);
        }
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << free.size()); ++m) {
            Bitset label = base;
            for (std::size_t j = 0; j < free.size(); ++j)
                if ((m >> j) & 1u) label.set(free[j]);
            for (auto t : set) out.emplace_back(label, t);
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace compnet

#endif
