#ifndef COMPNET_ORACLE_HPP
#define COMPNET_ORACLE_HPP

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "marked_net.hpp"
#include "net.hpp"

namespace compnet {

/// Explicit exploration refuses nets with more places than this.
inline constexpr std::size_t oracle_place_cap = 24;

struct ReachabilityResult {
    bool reachable = false;
    /// Fired transition sets (transition indices), one per step, from an
    /// initial marking to a target marking.
    std::optional<std::vector<std::vector<std::size_t>>> witness;
    std::optional<Marking> witness_start;
    std::size_t explored = 0;
    std::optional<std::size_t> shortest_length;
};

namespace detail {

inline void require_closed_and_small(const Net& n)
{
    if (n.left_width() != 0 || n.right_width() != 0)
        throw WidthMismatch("explicit exploration needs a closed net, got " + std::to_string(n.left_width()) +
                            " -> " + std::to_string(n.right_width()));
    if (n.place_count() > oracle_place_cap)
        throw CapacityError("explicit exploration refused: " + std::to_string(n.place_count()) +
                            " places exceeds the cap of " + std::to_string(oracle_place_cap));
}

} // namespace detail

/// Breadth-first search over markings, firing one transition at a time.
/// Transitions are tried in index order, so the witness is deterministic.
inline ReachabilityResult oracle_reach(const Net& n, const std::vector<Marking>& init,
                                       const std::function<bool(const Marking&)>& is_target)
{
    detail::require_closed_and_small(n);
    struct Visit {
        std::optional<Marking> parent;
        std::size_t via = 0;
        std::size_t depth = 0;
    };
    std::unordered_map<Marking, Visit, BitsetHash> seen;
    std::deque<Marking> queue;
    for (const auto& m : init)
        if (seen.emplace(m, Visit{}).second) queue.push_back(m);

    ReachabilityResult out;
    while (!queue.empty()) {
        Marking x = std::move(queue.front());
        queue.pop_front();
        ++out.explored;
        const std::size_t depth = seen.at(x).depth;
        if (is_target(x)) {
            out.reachable = true;
            out.shortest_length = depth;
            std::vector<std::vector<std::size_t>> steps;
            Marking cur = x;
            while (seen.at(cur).parent) {
                const Visit& v = seen.at(cur);
                steps.push_back({v.via});
                cur = *v.parent;
            }
            out.witness = std::vector<std::vector<std::size_t>>(steps.rbegin(), steps.rend());
            out.witness_start = cur;
            return out;
        }
        for (std::size_t i = 0; i < n.transition_count(); ++i) {
            const Transition& t = n.transition(i);
            if (!individually_enabled(t, x)) continue;
            Marking y = (x - t.pre) | t.post;
            if (seen.emplace(y, Visit{x, i, depth + 1}).second) queue.push_back(std::move(y));
        }
    }
    return out;
}

inline ReachabilityResult oracle_reach(const Net& n, const std::vector<Marking>& init,
                                       const std::vector<PlaceTarget>& targets)
{
    if (targets.size() != n.place_count())
        throw ValidationError("expected " + std::to_string(n.place_count()) + " place targets");
    return oracle_reach(n, init, [&](const Marking& x) { return satisfies(x, targets); });
}

inline ReachabilityResult oracle_reach(const MarkedNet& m) { return oracle_reach(m.net, {m.initial}, m.targets); }

/// All markings reachable from init, firing single transitions or, with
/// `steps`, arbitrary mutually independent sets.
inline std::set<Marking> reachable_markings(const Net& n, const std::vector<Marking>& init, bool steps)
{
    detail::require_closed_and_small(n);
    std::set<Marking> seen(init.begin(), init.end());
    std::deque<Marking> queue(seen.begin(), seen.end());
    while (!queue.empty()) {
        const Marking x = queue.front();
        queue.pop_front();
        auto visit = [&](Marking y) {
            if (seen.insert(y).second) queue.push_back(std::move(y));
        };
        if (steps) {
            for (const auto& s : step_successors(n, x)) visit(s.target);
        } else {
            for (const auto& t : n.transitions())
                if (individually_enabled(t, x)) visit((x - t.pre) | t.post);
        }
    }
    return seen;
}

} // namespace compnet

#endif
