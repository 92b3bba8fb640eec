// Explicit-state reference implementations and random instance generators
// shared by the unit and acceptance tests. Everything here works on plain
// bitmasks and tables, independently of the library's decision diagrams.
#ifndef COMPNET_TESTS_EXPLICIT_HPP
#define COMPNET_TESTS_EXPLICIT_HPP

#include <compnet/compnet.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace support {

using compnet::Bitset;
using compnet::Marking;
using compnet::Net;
using Mask = std::uint32_t;

inline Mask to_mask(const Bitset& b)
{
    Mask m = 0;
    b.for_each([&](std::size_t i) { m |= Mask{1} << i; });
    return m;
}

inline Bitset from_mask(std::size_t width, Mask m)
{
    Bitset b(width);
    for (std::size_t i = 0; i < width; ++i)
        if ((m >> i) & 1u) b.set(i);
    return b;
}

/// Label code: bit i is left port i for i < k, right port i - k otherwise.
inline Mask label_code(const Bitset& left, const Bitset& right) { return to_mask(left) | (to_mask(right) << left.width()); }

// ---------------------------------------------------------------------------
// Step semantics by subset enumeration

struct Edge {
    Mask label;
    Mask target;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Every step at x: all transition subsets whose members are individually
/// enabled and pairwise disjoint on pre and post places.
inline std::set<Edge> steps_at(const Net& n, Mask x)
{
    const std::size_t t = n.transition_count();
    std::vector<Mask> pre(t), post(t), src(t), tgt(t);
    for (std::size_t i = 0; i < t; ++i) {
        pre[i] = to_mask(n.transition(i).pre);
        post[i] = to_mask(n.transition(i).post);
        src[i] = to_mask(n.transition(i).source);
        tgt[i] = to_mask(n.transition(i).target);
    }
    std::set<Edge> out;
    for (Mask u = 0; u < (Mask{1} << t); ++u) {
        bool ok = true;
        Mask used = 0, p = 0, q = 0, a = 0, b = 0;
        for (std::size_t i = 0; i < t && ok; ++i) {
            if (!((u >> i) & 1u)) continue;
            const bool enabled = (pre[i] & x) == pre[i] && (post[i] & x) == 0;
            const Mask touched = pre[i] | post[i];
            ok = enabled && (touched & used) == 0;
            used |= touched;
            p |= pre[i];
            q |= post[i];
            a |= src[i];
            b |= tgt[i];
        }
        if (ok) out.insert(Edge{a | (b << n.left_width()), (x & ~p) | q});
    }
    return out;
}

/// Explicit NFA: states are arbitrary ids, labels are codes of k + l bits.
struct Nfa {
    std::size_t k = 0, l = 0;
    std::vector<std::set<Edge>> edges; // Edge::target is a state id
    std::vector<bool> final;
    std::set<Mask> initial;
    std::vector<Mask> marking; // state -> marking, when built from a net

    std::size_t size() const { return edges.size(); }
};

inline Nfa net_nfa(const Net& n, const std::vector<Mask>& init, const std::vector<Mask>& fin)
{
    Nfa a;
    a.k = n.left_width();
    a.l = n.right_width();
    std::map<Mask, Mask> index;
    std::deque<Mask> queue;
    const std::set<Mask> finals(fin.begin(), fin.end());
    auto intern = [&](Mask m) {
        auto [it, inserted] = index.emplace(m, static_cast<Mask>(a.marking.size()));
        if (inserted) {
            a.marking.push_back(m);
            a.edges.emplace_back();
            a.final.push_back(finals.count(m) > 0);
            queue.push_back(m);
        }
        return it->second;
    };
    for (auto m : init) a.initial.insert(intern(m));
    while (!queue.empty()) {
        const Mask x = queue.front();
        queue.pop_front();
        const Mask s = index.at(x);
        for (const auto& e : steps_at(n, x)) {
            const Mask t = intern(e.target);
            a.edges[s].insert(Edge{e.label, t});
        }
    }
    return a;
}

/// Synchronous product on the shared boundary of a : k -> l and b : l -> m.
inline Nfa product_seq(const Nfa& a, const Nfa& b)
{
    Nfa out;
    out.k = a.k;
    out.l = b.l;
    std::map<std::pair<Mask, Mask>, Mask> index;
    std::deque<std::pair<Mask, Mask>> queue;
    auto intern = [&](Mask x, Mask y) {
        auto [it, inserted] = index.emplace(std::pair{x, y}, static_cast<Mask>(out.edges.size()));
        if (inserted) {
            out.edges.emplace_back();
            out.final.push_back(a.final[x] && b.final[y]);
            queue.emplace_back(x, y);
        }
        return it->second;
    };
    for (auto x : a.initial)
        for (auto y : b.initial) out.initial.insert(intern(x, y));
    const Mask mid = (Mask{1} << a.l) - 1;
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        const Mask s = index.at({x, y});
        for (const auto& e : a.edges[x])
            for (const auto& f : b.edges[y]) {
                if ((e.label >> a.k) != (f.label & mid)) continue;
                const Mask label = (e.label & ((Mask{1} << a.k) - 1)) | ((f.label >> b.k) << a.k);
                const Mask target = intern(e.target, f.target);
                out.edges[s].insert(Edge{label, target});
            }
    }
    return out;
}

/// Independent product of a : k -> l and b : p -> q as k + p -> l + q.
inline Nfa product_tensor(const Nfa& a, const Nfa& b)
{
    Nfa out;
    out.k = a.k + b.k;
    out.l = a.l + b.l;
    std::map<std::pair<Mask, Mask>, Mask> index;
    std::deque<std::pair<Mask, Mask>> queue;
    auto intern = [&](Mask x, Mask y) {
        auto [it, inserted] = index.emplace(std::pair{x, y}, static_cast<Mask>(out.edges.size()));
        if (inserted) {
            out.edges.emplace_back();
            out.final.push_back(a.final[x] && b.final[y]);
            queue.emplace_back(x, y);
        }
        return it->second;
    };
    for (auto x : a.initial)
        for (auto y : b.initial) out.initial.insert(intern(x, y));
    const auto low = [](Mask v, std::size_t w) { return v & ((Mask{1} << w) - 1); };
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        const Mask s = index.at({x, y});
        for (const auto& e : a.edges[x])
            for (const auto& f : b.edges[y]) {
                const Mask left = low(e.label, a.k) | (low(f.label, b.k) << a.k);
                const Mask right = (e.label >> a.k) | ((f.label >> b.k) << a.l);
                const Mask target = intern(e.target, f.target);
                out.edges[s].insert(Edge{left | (right << out.k), target});
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weak closure, Moore minimisation, canonical numbering

/// Complete canonical DFA as a dense table.
struct Dfa {
    std::size_t k = 0, l = 0;
    std::vector<bool> final;
    std::vector<std::vector<Mask>> next; // next[state][label code]
    std::optional<Mask> sink;

    std::size_t size() const { return final.size(); }
};

/// Flat-label bit i of a label taken in canonical order: bit 0 is the most
/// significant, so position r enumerates labels lexicographically.
inline Mask canonical_label(Mask r, std::size_t bits)
{
    Mask code = 0;
    for (std::size_t i = 0; i < bits; ++i)
        if ((r >> (bits - 1 - i)) & 1u) code |= Mask{1} << i;
    return code;
}

inline Dfa weak_minimal(const Nfa& a)
{
    const std::size_t bits = a.k + a.l;
    const Mask labels = Mask{1} << bits;
    auto close = [&](std::set<Mask> s) {
        std::vector<Mask> stack(s.begin(), s.end());
        while (!stack.empty()) {
            const Mask x = stack.back();
            stack.pop_back();
            for (const auto& e : a.edges[x])
                if (e.label == 0 && s.insert(e.target).second) stack.push_back(e.target);
        }
        return s;
    };
    // subset construction, the empty subset included as an ordinary state
    std::map<std::set<Mask>, Mask> index;
    std::vector<std::set<Mask>> subsets;
    std::vector<std::vector<Mask>> table;
    std::deque<Mask> queue;
    auto intern = [&](std::set<Mask> s) {
        auto [it, inserted] = index.emplace(s, static_cast<Mask>(subsets.size()));
        if (inserted) {
            subsets.push_back(std::move(s));
            table.emplace_back(labels, 0);
            queue.push_back(it->second);
        }
        return it->second;
    };
    intern(close(a.initial));
    while (!queue.empty()) {
        const Mask s = queue.front();
        queue.pop_front();
        for (Mask c = 0; c < labels; ++c) {
            std::set<Mask> image;
            for (auto x : subsets[s])
                for (const auto& e : a.edges[x])
                    if (e.label == c) image.insert(e.target);
            const Mask t = intern(close(std::move(image)));
            table[s][c] = t;
        }
    }
    const std::size_t n = subsets.size();
    std::vector<bool> accepting(n, false);
    for (std::size_t s = 0; s < n; ++s)
        for (auto x : subsets[s]) accepting[s] = accepting[s] || a.final[x];

    // Moore refinement
    std::vector<Mask> cls(n);
    for (std::size_t s = 0; s < n; ++s) cls[s] = accepting[s] ? 1 : 0;
    for (;;) {
        std::map<std::vector<Mask>, Mask> sig;
        std::vector<Mask> refined(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<Mask> key{cls[s]};
            for (Mask c = 0; c < labels; ++c) key.push_back(cls[table[s][c]]);
            refined[s] = sig.emplace(std::move(key), static_cast<Mask>(sig.size())).first->second;
        }
        const std::size_t before = std::set<Mask>(cls.begin(), cls.end()).size();
        cls = std::move(refined);
        if (sig.size() == before) break;
    }

    // canonical breadth-first numbering over classes
    std::map<Mask, Mask> number;
    std::vector<Mask> rep;
    number[cls[0]] = 0;
    rep.push_back(0);
    for (std::size_t i = 0; i < rep.size(); ++i)
        for (Mask r = 0; r < labels; ++r) {
            const Mask t = table[rep[i]][canonical_label(r, bits)];
            if (number.emplace(cls[t], static_cast<Mask>(rep.size())).second) rep.push_back(t);
        }
    Dfa d;
    d.k = a.k;
    d.l = a.l;
    for (std::size_t i = 0; i < rep.size(); ++i) {
        d.final.push_back(accepting[rep[i]]);
        std::vector<Mask> row(labels);
        for (Mask c = 0; c < labels; ++c) row[c] = number.at(cls[table[rep[i]][c]]);
        d.next.push_back(std::move(row));
    }
    // the sink: the class that cannot reach acceptance
    for (std::size_t s = 0; s < d.size(); ++s) {
        std::set<Mask> seen{static_cast<Mask>(s)};
        std::vector<Mask> stack{static_cast<Mask>(s)};
        bool live = false;
        while (!stack.empty() && !live) {
            const Mask x = stack.back();
            stack.pop_back();
            live = d.final[x];
            for (auto y : d.next[x])
                if (seen.insert(y).second) stack.push_back(y);
        }
        if (!live) d.sink = static_cast<Mask>(s);
    }
    return d;
}

/// Empty string when `m` has exactly the states, finals, sink and dense
/// transition table of `d`; otherwise a description of the first difference.
inline std::string compare(const Dfa& d, const compnet::MinimalDfa& m)
{
    if (m.left_width() != d.k || m.right_width() != d.l) return "widths differ";
    if (m.size() != d.size())
        return "state count " + std::to_string(m.size()) + " vs reference " + std::to_string(d.size());
    const std::optional<Mask> sink = m.sink() ? std::optional<Mask>(*m.sink()) : std::nullopt;
    if (sink != d.sink) return "sink differs";
    const std::size_t bits = d.k + d.l;
    for (Mask s = 0; s < d.size(); ++s) {
        if (m.is_final(s) != d.final[s]) return "finality of state " + std::to_string(s) + " differs";
        for (Mask c = 0; c < (Mask{1} << bits); ++c)
            if (m.next(s, from_mask(bits, c)) != d.next[s][c])
                return "edge " + std::to_string(s) + " --" + from_mask(bits, c).to_string() + "--> differs";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Synchronisations by brute force

using SyncMask = std::pair<Mask, Mask>; // (transitions of n, transitions of m)

inline bool mi_mask(const Net& n, Mask u)
{
    Mask used = 0;
    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        if (!((u >> i) & 1u)) continue;
        const Mask touched = to_mask(n.transition(i).touched());
        if (touched & used) return false;
        used |= touched;
    }
    return true;
}

inline Mask ports_of(const Net& n, Mask u, bool right)
{
    Mask p = 0;
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        if ((u >> i) & 1u) p |= to_mask(right ? n.transition(i).target : n.transition(i).source);
    return p;
}

/// Every non-trivial synchronisation of n : k -> l and m : l -> r.
inline std::vector<SyncMask> all_synchronisations(const Net& n, const Net& m)
{
    std::vector<SyncMask> out;
    for (Mask u = 0; u < (Mask{1} << n.transition_count()); ++u) {
        if (!mi_mask(n, u)) continue;
        const Mask gamma = ports_of(n, u, true);
        for (Mask v = 0; v < (Mask{1} << m.transition_count()); ++v)
            if ((u | v) && mi_mask(m, v) && ports_of(m, v, false) == gamma) out.emplace_back(u, v);
    }
    return out;
}

inline std::set<SyncMask> minimal_synchronisations(const Net& n, const Net& m)
{
    const auto all = all_synchronisations(n, m);
    std::set<SyncMask> out;
    for (const auto& [u, v] : all) {
        bool minimal = true;
        for (const auto& [u2, v2] : all)
            if ((u2 | v2) && (u2 != u || v2 != v) && (u2 & ~u) == 0 && (v2 & ~v) == 0) {
                minimal = false;
                break;
            }
        if (minimal) out.emplace(u, v);
    }
    return out;
}

inline Mask sync_places(const Net& n, const Net& m, const SyncMask& s)
{
    Mask a = 0, b = 0;
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        if ((s.first >> i) & 1u) a |= to_mask(n.transition(i).touched());
    for (std::size_t i = 0; i < m.transition_count(); ++i)
        if ((s.second >> i) & 1u) b |= to_mask(m.transition(i).touched());
    return a | (b << n.place_count());
}

/// Whether (u, v) is the union of a pairwise independent family drawn from
/// `minimal` (exact-cover search).
inline bool covered_by_minimal(const Net& n, const Net& m, const SyncMask& target, const std::set<SyncMask>& minimal)
{
    std::vector<SyncMask> parts;
    for (const auto& s : minimal)
        if ((s.first & ~target.first) == 0 && (s.second & ~target.second) == 0) parts.push_back(s);
    auto rec = [&](auto&& self, std::size_t i, Mask u, Mask v, Mask places) -> bool {
        if (u == target.first && v == target.second) return true;
        if (i == parts.size()) return false;
        const auto& p = parts[i];
        const Mask pl = sync_places(n, m, p);
        if ((p.first & u) == 0 && (p.second & v) == 0 && (pl & places) == 0 &&
            self(self, i + 1, u | p.first, v | p.second, places | pl))
            return true;
        return self(self, i + 1, u, v, places);
    };
    return rec(rec, 0, 0, 0, 0);
}

// ---------------------------------------------------------------------------
// Full relations over all markings

using Triple = std::tuple<Mask, Mask, Mask>; // (from, label, to)

inline std::set<Triple> strong_relation(const Net& n)
{
    std::set<Triple> out;
    for (Mask x = 0; x < (Mask{1} << n.place_count()); ++x)
        for (const auto& e : steps_at(n, x)) out.emplace(x, e.label, e.target);
    return out;
}

/// eps* label eps*, with eps the all-zero label; label 0 includes the
/// reflexive closure.
inline std::set<Triple> weak_relation(const std::set<Triple>& strong, std::size_t states)
{
    std::vector<std::set<Mask>> eps(states);
    for (Mask x = 0; x < states; ++x) eps[x].insert(x);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [x, c, y] : strong)
            if (c == 0)
                for (Mask z = 0; z < states; ++z)
                    if (eps[z].count(x))
                        for (auto w : std::set<Mask>(eps[y])) changed |= eps[z].insert(w).second;
    }
    std::set<Triple> out;
    for (Mask x = 0; x < states; ++x)
        for (auto y : eps[x]) out.emplace(x, 0, y);
    for (const auto& [x, c, y] : strong)
        for (Mask z = 0; z < states; ++z)
            if (eps[z].count(x))
                for (auto w : eps[y]) out.emplace(z, c, w);
    return out;
}

/// Composite relation of n ; m assembled from the components: boundary labels
/// agree on the shared ports, places concatenate.
inline std::set<Triple> synchronised(const std::set<Triple>& rn, const std::set<Triple>& rm, std::size_t pn,
                                     std::size_t k, std::size_t l)
{
    std::set<Triple> out;
    const Mask left = (Mask{1} << k) - 1, mid = (Mask{1} << l) - 1;
    std::map<Mask, std::vector<Triple>> by_input;
    for (const auto& t : rm) by_input[std::get<1>(t) & mid].push_back(t);
    for (const auto& [x, a, x2] : rn) {
        auto it = by_input.find(a >> k);
        if (it == by_input.end()) continue;
        for (const auto& [y, b, y2] : it->second)
            out.emplace(x | (y << pn), (a & left) | ((b >> l) << k), x2 | (y2 << pn));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random instances

inline Net random_net(std::mt19937& rng, std::size_t places, std::size_t k, std::size_t l, std::size_t max_transitions,
                      const std::string& prefix = "p")
{
    std::uniform_int_distribution<std::size_t> count(0, max_transitions);
    std::bernoulli_distribution attach(0.75);
    std::discrete_distribution<int> role({5, 3, 3, 1}); // none, pre, post, both
    const std::size_t t = std::max<std::size_t>(count(rng), 1);
    std::vector<compnet::TransitionSpec> ts(t);
    for (std::size_t i = 0; i < t; ++i) {
        ts[i].id = "t" + std::to_string(i);
        for (std::size_t p = 0; p < places; ++p) {
            const int r = role(rng);
            if (r & 1) ts[i].pre.push_back(p);
            if (r & 2) ts[i].post.push_back(p);
        }
    }
    std::uniform_int_distribution<std::size_t> which(0, t - 1);
    for (std::size_t p = 0; p < k; ++p)
        if (attach(rng)) ts[which(rng)].source.push_back(p);
    for (std::size_t p = 0; p < l; ++p)
        if (attach(rng)) ts[which(rng)].target.push_back(p);
    std::vector<std::string> ids;
    for (std::size_t p = 0; p < places; ++p) ids.push_back(prefix + std::to_string(p));
    return Net(k, l, std::move(ids), ts);
}

inline std::vector<Marking> random_markings(std::mt19937& rng, std::size_t places, std::size_t lo, std::size_t hi)
{
    std::uniform_int_distribution<std::size_t> count(lo, hi);
    std::uniform_int_distribution<Mask> pick(0, (Mask{1} << places) - 1);
    std::set<Mask> chosen;
    const std::size_t c = count(rng);
    for (std::size_t i = 0; i < c; ++i) chosen.insert(pick(rng));
    std::vector<Marking> out;
    for (auto m : chosen) out.push_back(from_mask(places, m));
    return out;
}

/// Up to `count` markings reachable from `init` with the boundary left free.
inline std::vector<Marking> reachable_sample(std::mt19937& rng, const Net& n, const std::vector<Marking>& init,
                                             std::size_t count)
{
    std::set<Mask> seen;
    std::vector<Mask> todo;
    for (const auto& m : init)
        if (seen.insert(to_mask(m)).second) todo.push_back(to_mask(m));
    while (!todo.empty()) {
        const Mask x = todo.back();
        todo.pop_back();
        for (const auto& e : steps_at(n, x))
            if (seen.insert(e.target).second) todo.push_back(e.target);
    }
    std::vector<Mask> all(seen.begin(), seen.end());
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(all.size(), count));
    std::sort(all.begin(), all.end());
    std::vector<Marking> out;
    for (auto m : all) out.push_back(from_mask(n.place_count(), m));
    return out;
}

struct RandomDecomposition {
    compnet::WiringExpr expr = compnet::WiringExpr::var("x0");
    compnet::Assignments assign;
};

/// A random wiring expression of type k -> l whose leaves hold at most
/// `place_budget` places in total, with random initial and final sets.
inline RandomDecomposition random_decomposition(std::mt19937& rng, std::size_t k, std::size_t l,
                                                std::size_t place_budget, std::size_t max_width = 3)
{
    RandomDecomposition out;
    std::size_t leaves = 0;
    auto rec = [&](auto&& self, std::size_t kk, std::size_t ll, std::size_t budget,
                   std::size_t depth) -> compnet::WiringExpr {
        std::uniform_int_distribution<int> choice(0, 5);
        const int c = depth >= 3 || budget <= 1 ? 0 : choice(rng);
        if (c <= 1) {
            std::uniform_int_distribution<std::size_t> pc(budget ? 1 : 0, std::min<std::size_t>(budget, 3));
            const std::size_t places = pc(rng);
            const std::string name = "x" + std::to_string(leaves++);
            Net n = random_net(rng, places, kk, ll, 4, name + "_");
            auto init = random_markings(rng, places, 1, 2);
            auto fin = reachable_sample(rng, n, init, 2);
            for (const auto& m : random_markings(rng, places, 0, 1))
                if (std::find(fin.begin(), fin.end(), m) == fin.end()) fin.push_back(m);
            out.assign.assign(name, n, std::move(init), std::move(fin));
            return compnet::WiringExpr::var(name);
        }
        std::uniform_int_distribution<std::size_t> half(1, budget - 1);
        const std::size_t b1 = half(rng), b2 = budget - b1;
        if (c <= 3) {
            std::uniform_int_distribution<std::size_t> mid(0, max_width);
            const std::size_t m = mid(rng);
            auto a = self(self, kk, m, b1, depth + 1);
            auto b = self(self, m, ll, b2, depth + 1);
            return compnet::WiringExpr::seq(std::move(a), std::move(b));
        }
        std::uniform_int_distribution<std::size_t> sk(0, kk), sl(0, ll);
        const std::size_t k1 = sk(rng), l1 = sl(rng);
        auto a = self(self, k1, l1, b1, depth + 1);
        auto b = self(self, kk - k1, ll - l1, b2, depth + 1);
        return compnet::WiringExpr::tensor(std::move(a), std::move(b));
    };
    out.expr = rec(rec, k, l, place_budget, 0);
    return out;
}

/// Initial and final masks of the composite net denoted by a decomposition.
inline std::pair<std::vector<Mask>, std::vector<Mask>> composite_markings(const compnet::WiringExpr& t,
                                                                         const compnet::Assignments& a)
{
    std::map<std::string, std::vector<Marking>> init, fin;
    for (const auto& x : t.leaves()) {
        init[x] = a.initial_of(x);
        fin[x] = a.final_of(x);
    }
    std::pair<std::vector<Mask>, std::vector<Mask>> out;
    for (const auto& m : compnet::combined_markings(t, init)) out.first.push_back(to_mask(m));
    for (const auto& m : compnet::combined_markings(t, fin)) out.second.push_back(to_mask(m));
    return out;
}

/// Reference automaton for a decomposition, built from explicit products of
/// the leaves' step systems rather than from composed nets.
inline Nfa explicit_semantics(const compnet::WiringExpr& t, const compnet::Assignments& a)
{
    if (t.is_var()) {
        std::vector<Mask> init, fin;
        for (const auto& m : a.initial_of(t.name())) init.push_back(to_mask(m));
        for (const auto& m : a.final_of(t.name())) fin.push_back(to_mask(m));
        return net_nfa(a.net(t.name()), init, fin);
    }
    const Nfa l = explicit_semantics(t.left(), a);
    const Nfa r = explicit_semantics(t.right(), a);
    return t.kind() == compnet::WiringExpr::Kind::seq ? product_seq(l, r) : product_tensor(l, r);
}

} // namespace support

#endif
