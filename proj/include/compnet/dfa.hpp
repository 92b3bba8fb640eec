#ifndef COMPNET_DFA_HPP
#define COMPNET_DFA_HPP

#include <algorithm>
#include <cstdio>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "error.hpp"
#include "nfa.hpp"

namespace compnet {

namespace detail {

/// States reachable from `seed` by zero or more epsilon-labelled edges.
inline StateSet epsilon_closure(const BoundedNfa& a, const StateSet& seed)
{
    const Bitset eps = a.epsilon();
    std::vector<bool> in(a.size(), false);
    std::vector<StateId> stack(seed.begin(), seed.end());
    for (auto s : seed) in[s] = true;
    while (!stack.empty()) {
        const StateId s = stack.back();
        stack.pop_back();
        for (auto t : a.successors(s, eps))
            if (!in[t]) {
                in[t] = true;
                stack.push_back(t);
            }
    }
    StateSet out;
    for (StateId s = 0; s < a.size(); ++s)
        if (in[s]) out.push_back(s);
    return out;
}

/// Subset construction over the diagrams of `a`. Each subset-state's diagram is
/// the union of its members' diagrams with every terminal set T replaced by the
/// subset-state for close(T). Empty successor sets are not materialised.
template <typename Close>
BoundedNfa subset_construction(const BoundedNfa& a, const StateSet& start, Close&& close)
{
    BoundedNfa out(a.left_width(), a.right_width());
    DiagramStore scratch = a.store();
    std::unordered_map<StateSet, StateId, StateSetHash> index;
    std::vector<StateSet> subsets;
    std::deque<StateId> queue;
    auto intern = [&](StateSet s) -> StateId {
        auto [it, inserted] = index.try_emplace(s, static_cast<StateId>(subsets.size()));
        if (inserted) {
            bool accepting = false;
            for (auto x : s) accepting = accepting || a.is_final(x);
            out.add_state(accepting);
            subsets.push_back(std::move(s));
            queue.push_back(it->second);
        }
        return it->second;
    };
    std::unordered_map<StateSet, StateSet, StateSetHash> closed_target;
    auto map_terminal = [&](const StateSet& t) -> StateSet {
        if (t.empty()) return {};
        auto it = closed_target.find(t);
        if (it == closed_target.end()) {
            StateSet c = close(t);
            if (c.empty()) it = closed_target.emplace(t, StateSet{}).first;
            else it = closed_target.emplace(t, StateSet{intern(std::move(c))}).first;
        }
        return it->second;
    };

    const StateSet init = close(start);
    if (init.empty()) return out;
    out.set_initial({intern(init)});
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        DiagramStore::Ref u = DiagramStore::empty();
        for (auto x : subsets[s]) u = scratch.unite(u, a.delta(x));
        out.set_delta(s, out.store().import(scratch, u, map_terminal));
    }
    std::vector<std::string> names;
    for (const auto& s : subsets) {
        std::string name = "{";
        for (auto x : s) name += (name.size() > 1 ? "," : "") + std::to_string(x);
        names.push_back(name + "}");
    }
    out.set_state_names(std::move(names));
    return out;
}

inline BoundedNfa determinise(const BoundedNfa& a)
{
    return subset_construction(a, a.initial(), [](const StateSet& s) { return s; });
}

/// The reverse automaton: every edge flipped, initial and final swapped.
inline BoundedNfa reverse(const BoundedNfa& a)
{
    BoundedNfa out(a.left_width(), a.right_width());
    StateSet init;
    for (StateId s = 0; s < a.size(); ++s) {
        out.add_state(false);
        if (a.is_final(s)) init.push_back(s);
    }
    for (auto s : a.initial()) out.set_final(s, true);
    out.set_initial(init);
    std::vector<DiagramStore::Ref> acc(a.size(), DiagramStore::empty());
    for (StateId s = 0; s < a.size(); ++s) {
        a.store().for_each_cube(a.delta(s), a.label_bits(),
                                [&](const std::vector<signed char>& pattern, const StateSet& targets) {
                                    const auto c = out.store().cube(pattern, StateSet{s});
                                    for (auto t : targets) acc[t] = out.store().unite(acc[t], c);
                                });
    }
    for (StateId s = 0; s < a.size(); ++s) out.set_delta(s, acc[s]);
    out.compact();
    return out;
}

} // namespace detail

/// Weak closure: the subset automaton started from the epsilon-closure of the
/// initial states, in which the successor of a subset under any label (the
/// all-zero label included) is the epsilon-closure of its one-step image. A
/// subset is accepting iff it contains an accepting state; subsets are
/// epsilon-closed, so initial states that reach acceptance silently accept.
inline BoundedNfa epsilon_close(const BoundedNfa& a)
{
    return detail::subset_construction(a, a.initial(),
                                       [&](const StateSet& s) { return detail::epsilon_closure(a, s); });
}

/// Complete deterministic automaton with canonical state numbering: state 0 is
/// initial and the rest are numbered breadth-first, successors taken in
/// lexicographic order of labels. Labels outside the behaviour lead to a
/// non-accepting sink, present only when some label needs it.
class MinimalDfa {
public:
    MinimalDfa() = default;

    std::size_t left_width() const { return nfa_.left_width(); }
    std::size_t right_width() const { return nfa_.right_width(); }
    std::size_t size() const { return nfa_.size(); }
    StateId initial() const { return 0; }
    bool is_final(StateId s) const { return nfa_.is_final(s); }
    std::optional<StateId> sink() const { return sink_; }

    StateId next(StateId s, const Bitset& label) const { return nfa_.successors(s, label).front(); }
    StateId next(StateId s, const StepLabel& label) const { return next(s, label.flat()); }

    bool accepts(const std::vector<Bitset>& word) const
    {
        StateId s = initial();
        for (const auto& l : word) s = next(s, l);
        return is_final(s);
    }

    /// View as an NFA (singleton successor sets) for products.
    const BoundedNfa& as_nfa() const { return nfa_; }

    /// Byte string determined by widths, finals, sink and transition table in
    /// canonical order; equal iff the automata are structurally identical.
    std::string canonical_bytes() const
    {
        std::string out = std::to_string(left_width()) + ":" + std::to_string(right_width()) + ":" +
                          std::to_string(size()) + ":" + (sink_ ? std::to_string(*sink_) : "-") + ":";
        for (StateId s = 0; s < size(); ++s) out += is_final(s) ? '1' : '0';
        for (StateId s = 0; s < size(); ++s) {
            out += '|';
            nfa_.store().for_each_cube(nfa_.delta(s), nfa_.label_bits(),
                                       [&](const std::vector<signed char>& pattern, const StateSet& t) {
                                           out += cube_label(pattern, left_width()) + ">" + std::to_string(t.front()) + ";";
                                       });
        }
        return out;
    }

    friend bool operator==(const MinimalDfa& a, const MinimalDfa& b) { return a.canonical_bytes() == b.canonical_bytes(); }

    /// Canonicalises a complete DFA given as an NFA with singleton successor
    /// sets (the empty set standing for "go to the sink").
    static MinimalDfa from_partial(const BoundedNfa& d)
    {
        MinimalDfa out;
        // breadth-first renumbering; a missing initial state means the empty language
        constexpr StateId unseen = DiagramStore::terminal_var;
        std::vector<StateId> order;
        std::vector<StateId> number(d.size(), unseen);
        bool needs_sink = d.initial().empty();
        StateId sink_number = unseen;
        if (!d.initial().empty()) {
            number[d.initial().front()] = 0;
            order.push_back(d.initial().front());
        }
        std::size_t assigned = order.size();
        auto visit_sink = [&] {
            if (sink_number == unseen) {
                sink_number = static_cast<StateId>(assigned++);
                order.push_back(unseen);
            }
        };
        if (needs_sink) visit_sink();
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == unseen) continue;
            const auto r = d.delta(order[i]);
            // walk the diagram in label order, including the empty terminal
            auto rec = [&](auto&& self, DiagramStore::Ref x) -> void {
                if (d.store().is_terminal(x)) {
                    const auto& set = d.store().set_of(x);
                    if (set.empty()) {
                        visit_sink();
                    } else if (number[set.front()] == unseen) {
                        number[set.front()] = static_cast<StateId>(assigned++);
                        order.push_back(set.front());
                    }
                    return;
                }
                self(self, d.store().lo(x));
                self(self, d.store().hi(x));
            };
            rec(rec, r);
        }
        BoundedNfa n(d.left_width(), d.right_width());
        for (std::size_t i = 0; i < order.size(); ++i) n.add_state(order[i] != unseen && d.is_final(order[i]));
        if (!order.empty()) n.set_initial({0});
        auto map = [&](const StateSet& s) -> StateSet {
            if (s.empty()) return {sink_number};
            return {number[s.front()]};
        };
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == unseen) n.set_delta(static_cast<StateId>(i), n.store().terminal({sink_number}));
            else n.set_delta(static_cast<StateId>(i), n.store().import(d.store(), d.delta(order[i]), map));
        }
        out.nfa_ = std::move(n);
        if (sink_number != unseen) out.sink_ = sink_number;
        return out;
    }

private:
    BoundedNfa nfa_;
    std::optional<StateId> sink_;
};

/// Brzozowski minimisation: determinise(reverse(determinise(reverse(a)))),
/// then completion with a sink and canonical renumbering. The input is
/// expected to be epsilon-closed already.
inline MinimalDfa minimise(const BoundedNfa& a)
{
    const BoundedNfa once = detail::determinise(detail::reverse(a));
    const BoundedNfa twice = detail::determinise(detail::reverse(once));
    return MinimalDfa::from_partial(twice);
}

/// Epsilon-closure followed by minimisation.
inline MinimalDfa epsmin(const BoundedNfa& a) { return minimise(epsilon_close(a)); }

/// For an automaton 0 -> 0: whether the initial state, or a state reachable
/// from it by the (only) label, accepts.
inline bool is_accepting_verdict(const MinimalDfa& d)
{
    if (d.left_width() != 0 || d.right_width() != 0)
        throw WidthMismatch("verdict requires a 0 -> 0 automaton, got " + std::to_string(d.left_width()) + " -> " +
                            std::to_string(d.right_width()));
    const Bitset eps(0);
    StateId s = d.initial();
    for (std::size_t i = 0; i <= d.size(); ++i) {
        if (d.is_final(s)) return true;
        s = d.next(s, eps);
    }
    return false;
}

/// SHA-256 of the canonical bytes, as lowercase hex.
inline std::string canonical_signature(const MinimalDfa& d)
{
    const std::string bytes = d.canonical_bytes();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

} // namespace compnet

#endif
