#ifndef COMPNET_DECOMPOSER_HPP
#define COMPNET_DECOMPOSER_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "marked_net.hpp"
#include "net.hpp"
#include "wiring.hpp"

namespace compnet {

/// A cut candidate: the removed element, how the remaining places fall into
/// two groups (0 or 1; -1 for a removed place) and the quality measures.
struct CutCandidate {
    std::size_t index = 0;
    std::size_t balance = 0;      // |places in group 0 - places in group 1|
    std::size_t middle_width = 0; // ports created between the two sides
    std::vector<int> group;
};

/// Work done by a search: candidates examined and connectivity-test visits
/// (one per place initialised, one per transition scanned).
struct SearchStats {
    std::size_t candidates = 0;
    std::size_t visits = 0;
};

struct DecompositionStep {
    std::string kind; // transition-cut, place-cut, forced-place-removal or leaf
    std::string element;
    std::size_t places = 0;
    std::optional<std::size_t> balance;
    /// Boundary widths of the parts, in expression order.
    std::vector<std::pair<std::size_t, std::size_t>> widths;
    SearchStats transition_search;
    SearchStats place_search;
    std::string note;
};

struct DecompositionResult {
    WiringExpr expr = WiringExpr::var("x0");
    Assignments assign;
    std::vector<DecompositionStep> report;
};

inline constexpr std::size_t default_leaf_budget = 2;

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

/// Connected components of the places of n, ignoring one transition and one
/// place. Returns the component id per place (-1 for the skipped place) and
/// the component count.
inline std::pair<std::vector<int>, std::size_t> components(const Net& n, std::optional<std::size_t> skip_transition,
                                                           std::optional<std::size_t> skip_place,
                                                           SearchStats& stats)
{
    UnionFind uf(n.place_count());
    stats.visits += n.place_count() - (skip_place ? 1 : 0);
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        if (skip_transition && *skip_transition == i) continue;
        ++stats.visits;
        std::optional<std::size_t> first;
        n.transition(i).touched().for_each([&](std::size_t p) {
            if (skip_place && *skip_place == p) return;
            if (first)
                uf.unite(*first, p);
            else
                first = p;
        });
    }
    std::vector<int> id(n.place_count(), -1);
    std::vector<int> root_id(n.place_count(), -1);
    int count = 0;
    for (std::size_t p = 0; p < n.place_count(); ++p) {
        if (skip_place && *skip_place == p) continue;
        const std::size_t r = uf.find(p);
        if (root_id[r] < 0) root_id[r] = count++;
        id[p] = root_id[r];
    }
    return {id, static_cast<std::size_t>(count)};
}

/// Splits components into two groups of similar total size: largest first,
/// each into the currently smaller group. Group 0 holds the lowest place.
inline std::vector<int> balance_groups(const std::vector<int>& component, std::size_t count)
{
    std::vector<std::size_t> size(count, 0), lowest(count, component.size());
    for (std::size_t p = 0; p < component.size(); ++p)
        if (component[p] >= 0) {
            ++size[component[p]];
            lowest[component[p]] = std::min(lowest[component[p]], p);
        }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return size[a] != size[b] ? size[a] > size[b] : lowest[a] < lowest[b];
    });
    std::vector<int> side(count, 0);
    std::size_t load[2] = {0, 0};
    for (auto c : order) {
        const int g = load[1] < load[0] ? 1 : 0;
        side[c] = g;
        load[g] += size[c];
    }
    std::vector<int> group(component.size(), -1);
    int low_group = -1;
    for (std::size_t p = 0; p < component.size(); ++p)
        if (component[p] >= 0) {
            group[p] = side[component[p]];
            if (low_group < 0) low_group = group[p];
        }
    if (low_group == 1)
        for (auto& g : group)
            if (g >= 0) g = 1 - g;
    return group;
}

inline std::size_t group_balance(const std::vector<int>& group)
{
    const auto a = static_cast<std::size_t>(std::count(group.begin(), group.end(), 0));
    const auto b = static_cast<std::size_t>(std::count(group.begin(), group.end(), 1));
    return a > b ? a - b : b - a;
}

/// Number of transitions that would need a middle port if places with
/// in_first[p] went to the first half of a sequential split.
inline std::size_t middle_width(const Net& n, const std::vector<bool>& in_first)
{
    std::size_t w = 0;
    for (const auto& t : n.transitions()) {
        bool a = t.source.any(), b = t.target.any();
        t.touched().for_each([&](std::size_t p) { (in_first[p] ? a : b) = true; });
        if (a && b) ++w;
    }
    return w;
}

inline Bitset restrict_to(const Bitset& bits, const std::vector<std::size_t>& kept)
{
    Bitset out(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j)
        if (bits.test(kept[j])) out.set(j);
    return out;
}

inline Bitset single_port(std::size_t width, std::size_t port) { return Bitset::of(width, {port}); }

struct SequentialSplit {
    Net first, second;
    std::vector<std::size_t> first_places, second_places; // indices into the split net
};

/// n = first ; second up to identifier tags. Each transition is cut into the
/// part over first-half places and left ports and the part over second-half
/// places and right ports; when both parts are non-empty they are joined by a
/// fresh middle port. Middle ports are ordered by (key(transition), index).
template <typename Key>
SequentialSplit split_sequential(const Net& n, const std::vector<bool>& in_first, Key&& key)
{
    SequentialSplit s;
    for (std::size_t p = 0; p < n.place_count(); ++p) (in_first[p] ? s.first_places : s.second_places).push_back(p);
    const Bitset first_mask = Bitset::from_indices(n.place_count(), s.first_places);
    const Bitset second_mask = Bitset::from_indices(n.place_count(), s.second_places);

    std::vector<std::size_t> split;
    std::vector<char> has_a(n.transition_count()), has_b(n.transition_count());
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        const auto& t = n.transition(i);
        has_a[i] = t.source.any() || t.touched().intersects(first_mask);
        has_b[i] = t.target.any() || t.touched().intersects(second_mask);
        if (has_a[i] && has_b[i]) split.push_back(i);
    }
    std::stable_sort(split.begin(), split.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    std::vector<std::size_t> port(n.transition_count(), 0);
    for (std::size_t m = 0; m < split.size(); ++m) port[split[m]] = m;
    const std::size_t mid = split.size();

    std::vector<Transition> first_ts, second_ts;
    std::vector<std::string> first_ids, second_ids;
    for (auto p : s.first_places) first_ids.push_back(n.places()[p]);
    for (auto p : s.second_places) second_ids.push_back(n.places()[p]);
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        const auto& t = n.transition(i);
        const bool both = has_a[i] && has_b[i];
        if (both || !has_b[i])
            first_ts.push_back(Transition{t.id, restrict_to(t.pre, s.first_places), restrict_to(t.post, s.first_places),
                                          t.source, both ? single_port(mid, port[i]) : Bitset(mid)});
        if (both || (has_b[i] && !has_a[i]))
            second_ts.push_back(Transition{t.id, restrict_to(t.pre, s.second_places),
                                           restrict_to(t.post, s.second_places),
                                           both ? single_port(mid, port[i]) : Bitset(mid), t.target});
    }
    s.first = Net(n.left_width(), mid, std::move(first_ids), std::move(first_ts));
    s.second = Net(mid, n.right_width(), std::move(second_ids), std::move(second_ts));
    return s;
}

struct TensorSplit {
    Net first, second;
    std::optional<Net> permutation; // present when the right ports interleave
    std::vector<std::size_t> first_places, second_places;
};

/// n = (first * second) [; permutation], given a place grouping in which no
/// transition touches both groups and every group-0 transition's left ports
/// precede every group-1 transition's. Place-less transitions and unattached
/// right ports go with group 0.
inline TensorSplit split_tensor(const Net& n, const std::vector<int>& group)
{
    TensorSplit s;
    for (std::size_t p = 0; p < n.place_count(); ++p) (group[p] == 0 ? s.first_places : s.second_places).push_back(p);
    std::vector<int> tgroup(n.transition_count(), 0);
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        n.transition(i).touched().for_each([&](std::size_t p) { tgroup[i] = group[p]; });

    std::size_t w1 = 0;
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        if (tgroup[i] == 0) n.transition(i).source.for_each([&](std::size_t port) { w1 = std::max(w1, port + 1); });

    std::vector<int> port_group(n.right_width(), 0);
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        n.transition(i).target.for_each([&](std::size_t port) { port_group[port] = tgroup[i]; });
    std::vector<std::size_t> order; // position in (first ++ second) -> original port
    for (int g : {0, 1})
        for (std::size_t r = 0; r < n.right_width(); ++r)
            if (port_group[r] == g) order.push_back(r);
    const auto l1 = static_cast<std::size_t>(std::count(port_group.begin(), port_group.end(), 0));
    std::vector<std::size_t> position(n.right_width());
    for (std::size_t j = 0; j < order.size(); ++j) position[order[j]] = j;

    std::vector<Transition> ts[2];
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        const auto& t = n.transition(i);
        const int g = tgroup[i];
        const auto& kept = g == 0 ? s.first_places : s.second_places;
        const std::size_t left_off = g == 0 ? 0 : w1;
        const std::size_t left_w = g == 0 ? w1 : n.left_width() - w1;
        const std::size_t right_off = g == 0 ? 0 : l1;
        const std::size_t right_w = g == 0 ? l1 : n.right_width() - l1;
        Bitset src(left_w), tgt(right_w);
        t.source.for_each([&](std::size_t port) { src.set(port - left_off); });
        t.target.for_each([&](std::size_t port) { tgt.set(position[port] - right_off); });
        ts[g].push_back(Transition{t.id, restrict_to(t.pre, kept), restrict_to(t.post, kept), src, tgt});
    }
    std::vector<std::string> ids[2];
    for (auto p : s.first_places) ids[0].push_back(n.places()[p]);
    for (auto p : s.second_places) ids[1].push_back(n.places()[p]);
    s.first = Net(w1, l1, std::move(ids[0]), std::move(ts[0]));
    s.second = Net(n.left_width() - w1, n.right_width() - l1, std::move(ids[1]), std::move(ts[1]));

    bool identity = true;
    for (std::size_t j = 0; j < order.size(); ++j) identity = identity && order[j] == j;
    if (!identity) {
        std::vector<TransitionSpec> wires;
        for (std::size_t j = 0; j < order.size(); ++j)
            wires.push_back({"w" + std::to_string(j), {}, {}, {j}, {order[j]}});
        s.permutation = Net(n.right_width(), n.right_width(), {}, wires);
    }
    return s;
}

} // namespace detail

/// The transition whose removal disconnects the places most evenly; ties go
/// to the smaller middle width, then the lower index.
inline std::optional<CutCandidate> separating_transition(const Net& n, SearchStats* stats = nullptr)
{
    SearchStats local;
    SearchStats& st = stats ? *stats : local;
    std::optional<CutCandidate> best;
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        ++st.candidates;
        const auto [comp, count] = detail::components(n, i, std::nullopt, st);
        if (count < 2) continue;
        CutCandidate c{i, 0, 0, detail::balance_groups(comp, count)};
        c.balance = detail::group_balance(c.group);
        std::vector<bool> in0(n.place_count()), in1(n.place_count());
        for (std::size_t p = 0; p < n.place_count(); ++p) {
            in0[p] = c.group[p] == 0;
            in1[p] = c.group[p] == 1;
        }
        const std::size_t w0 = detail::middle_width(n, in0), w1 = detail::middle_width(n, in1);
        c.middle_width = std::min(w0, w1);
        if (w1 < w0)
            for (auto& g : c.group) g = 1 - g;
        if (!best || std::tie(c.balance, c.middle_width) < std::tie(best->balance, best->middle_width))
            best = std::move(c);
    }
    return best;
}

/// The place whose removal disconnects the remaining places most evenly;
/// ties go to the smaller middle width, then the lower index.
inline std::optional<CutCandidate> separating_place(const Net& n, SearchStats* stats = nullptr)
{
    SearchStats local;
    SearchStats& st = stats ? *stats : local;
    std::optional<CutCandidate> best;
    for (std::size_t p = 0; p < n.place_count(); ++p) {
        ++st.candidates;
        const auto [comp, count] = detail::components(n, std::nullopt, p, st);
        if (count < 2) continue;
        CutCandidate c{p, 0, 0, detail::balance_groups(comp, count)};
        c.balance = detail::group_balance(c.group);
        std::vector<bool> carrier(n.place_count(), false);
        carrier[p] = true;
        c.middle_width = detail::middle_width(n, carrier);
        if (!best || std::tie(c.balance, c.middle_width) < std::tie(best->balance, best->middle_width))
            best = std::move(c);
    }
    return best;
}

namespace detail {

class Decomposer {
public:
    Decomposer(std::size_t budget, DecompositionResult& out) : budget_(budget), out_(out) {}

    WiringExpr run(const Net& n, const Marking& init, const std::vector<PlaceTarget>& targets)
    {
        if (n.place_count() <= budget_) return leaf(n, init, targets);

        DecompositionStep step;
        step.places = n.place_count();
        if (auto t = separating_transition(n, &step.transition_search)) {
            std::vector<bool> in_first(n.place_count());
            for (std::size_t p = 0; p < n.place_count(); ++p) in_first[p] = t->group[p] == 0;
            auto s = split_sequential(n, in_first, [](std::size_t) { return 0; });
            step.kind = "transition-cut";
            step.element = n.transition(t->index).id;
            step.balance = t->balance;
            step.widths = {widths(s.first), widths(s.second)};
            record(std::move(step));
            auto a = run(s.first, pick(init, s.first_places), pick(targets, s.first_places));
            auto b = run(s.second, pick(init, s.second_places), pick(targets, s.second_places));
            return WiringExpr::seq(std::move(a), std::move(b));
        }
        if (auto p = separating_place(n, &step.place_search)) {
            step.kind = "place-cut";
            step.element = n.places()[p->index];
            step.balance = p->balance;
            return carrier_split(n, init, targets, p->index, &p->group, std::move(step));
        }
        // forced removal: the place leaving the narrowest middle boundary
        std::size_t best = 0, best_w = SIZE_MAX;
        for (std::size_t q = 0; q < n.place_count(); ++q) {
            std::vector<bool> carrier(n.place_count(), false);
            carrier[q] = true;
            const std::size_t w = middle_width(n, carrier);
            if (w < best_w) {
                best = q;
                best_w = w;
            }
        }
        step.kind = "forced-place-removal";
        step.element = n.places()[best];
        return carrier_split(n, init, targets, best, nullptr, std::move(step));
    }

private:
    static std::pair<std::size_t, std::size_t> widths(const Net& n) { return {n.left_width(), n.right_width()}; }

    static Marking pick(const Marking& m, const std::vector<std::size_t>& kept) { return restrict_to(m, kept); }
    static std::vector<PlaceTarget> pick(const std::vector<PlaceTarget>& t, const std::vector<std::size_t>& kept)
    {
        std::vector<PlaceTarget> out;
        for (auto p : kept) out.push_back(t[p]);
        return out;
    }

    void record(DecompositionStep s) { out_.report.push_back(std::move(s)); }

    WiringExpr leaf(const Net& n, const Marking& init, const std::vector<PlaceTarget>& targets)
    {
        const std::string name = "x" + std::to_string(next_leaf_++);
        out_.assign.assign(name, n, {init}, markings_satisfying(targets));
        DecompositionStep s;
        s.kind = "leaf";
        s.element = name;
        s.places = n.place_count();
        s.widths = {widths(n)};
        record(std::move(s));
        return WiringExpr::var(name);
    }

    /// carrier{p} ; rest, where rest is further split as a tensor when a
    /// place grouping is given.
    WiringExpr carrier_split(const Net& n, const Marking& init, const std::vector<PlaceTarget>& targets,
                             std::size_t p, const std::vector<int>* group, DecompositionStep step)
    {
        std::vector<bool> in_first(n.place_count(), false);
        in_first[p] = true;
        // middle ports ordered by the group of the transition's second part
        auto key = [&](std::size_t i) {
            int g = 0;
            if (group)
                n.transition(i).touched().for_each([&](std::size_t q) {
                    if (q != p) g = (*group)[q];
                });
            return g;
        };
        auto s = split_sequential(n, in_first, key);
        const Marking rest_init = pick(init, s.second_places);
        const auto rest_targets = pick(targets, s.second_places);
        if (!group) {
            step.widths = {widths(s.first), widths(s.second)};
            record(std::move(step));
            auto c = leaf(s.first, pick(init, s.first_places), pick(targets, s.first_places));
            return WiringExpr::seq(std::move(c), run(s.second, rest_init, rest_targets));
        }
        std::vector<int> rest_group;
        for (auto q : s.second_places) rest_group.push_back((*group)[q]);
        auto t = split_tensor(s.second, rest_group);
        step.widths = {widths(s.first), widths(t.first), widths(t.second)};
        if (t.permutation) step.widths.push_back(widths(*t.permutation));
        step.note = "left tensor operand holds the group containing place '" + n.places()[s.second_places[t.first_places.front()]] +
                    "'; its severed arcs take the lower middle ports";
        record(std::move(step));
        auto c = leaf(s.first, pick(init, s.first_places), pick(targets, s.first_places));
        auto e1 = run(t.first, pick(rest_init, t.first_places), pick(rest_targets, t.first_places));
        auto e2 = run(t.second, pick(rest_init, t.second_places), pick(rest_targets, t.second_places));
        WiringExpr body = WiringExpr::tensor(std::move(e1), std::move(e2));
        if (t.permutation) body = WiringExpr::seq(std::move(body), leaf(*t.permutation, Bitset(0), {}));
        return WiringExpr::seq(std::move(c), std::move(body));
    }

    std::size_t budget_;
    DecompositionResult& out_;
    std::size_t next_leaf_ = 0;
};

} // namespace detail

/// Recursive decomposition of a closed marked net: transition cuts first,
/// then place cuts, then forced place removal, until every component has at
/// most leaf_budget places. Leaf markings are the restriction of the initial
/// marking and every local marking meeting the targets.
inline DecompositionResult decompose(const MarkedNet& m, std::size_t leaf_budget = default_leaf_budget)
{
    require_well_formed(m);
    if (leaf_budget < 1) throw ValidationError("leaf budget must be at least 1");
    if (m.net.left_width() != 0 || m.net.right_width() != 0)
        throw WidthMismatch("decomposition needs a closed net, got " + std::to_string(m.net.left_width()) + " -> " +
                            std::to_string(m.net.right_width()));
    DecompositionResult out;
    detail::Decomposer d(leaf_budget, out);
    out.expr = d.run(m.net, m.initial, m.targets);
    return out;
}

/// Whether the term denotes the given net, comparing places by identifier with
/// composition tags removed and transitions by their arcs and ports.
inline bool denotes(const WiringExpr& t, const Assignments& a, const Net& n)
{
    const auto key = [](const std::string& id) { return strip_tags(id); };
    return canonical_form_by(net_semantics(t, a), key) == canonical_form_by(n, key);
}

} // namespace compnet

#endif
