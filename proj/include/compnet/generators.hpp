#ifndef COMPNET_GENERATORS_HPP
#define COMPNET_GENERATORS_HPP

#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "marked_net.hpp"
#include "net.hpp"
#include "wiring.hpp"

namespace compnet {

/// A benchmark instance: a hand-written wiring decomposition (absent for
/// families that only exist flat) and the equivalent flat marked net.
struct Family {
    std::optional<WiringExpr> expr;
    Assignments assign;
    MarkedNet flat;
};

enum class BufferShape { flat, left, right, balanced };

inline BufferShape parse_buffer_shape(const std::string& s)
{
    if (s == "flat") return BufferShape::flat;
    if (s == "left") return BufferShape::left;
    if (s == "right") return BufferShape::right;
    if (s == "balanced") return BufferShape::balanced;
    throw ParseError("unknown buffer shape '" + s + "' (expected flat, left, right or balanced)");
}

namespace components {

/// top : 0 -> 1, a transition that may always emit on its right port.
inline Net top() { return Net(0, 1, {}, std::vector<TransitionSpec>{{"t", {}, {}, {}, {0}}}); }

/// bottom : 1 -> 0, a transition that may always absorb on its left port.
inline Net bottom() { return Net(1, 0, {}, std::vector<TransitionSpec>{{"t", {}, {}, {0}, {}}}); }

/// One buffer cell b1 : 1 -> 1 holding a single token in u ("up") or d
/// ("down"). Receiving on the left moves d to u; emitting right moves u to d.
inline Net cell()
{
    return Net(1, 1, {"u", "d"},
               std::vector<TransitionSpec>{{"in", {1}, {0}, {0}, {}}, {"out", {0}, {1}, {}, {0}}});
}

/// Tree node carriers. Ports towards a child c come in pairs: even port
/// "down" moves the token from this node into c, odd port "up" moves it back.
/// The root additionally has a generator g refilling its place.
inline Net tree_root()
{
    return Net(0, 4, {"p"},
               std::vector<TransitionSpec>{{"g", {}, {0}, {}, {}},
                                           {"dl", {0}, {}, {}, {0}},
                                           {"ul", {}, {0}, {}, {1}},
                                           {"dr", {0}, {}, {}, {2}},
                                           {"ur", {}, {0}, {}, {3}}});
}

inline Net tree_node()
{
    return Net(2, 4, {"p"},
               std::vector<TransitionSpec>{{"in", {}, {0}, {0}, {}},
                                           {"out", {0}, {}, {1}, {}},
                                           {"dl", {0}, {}, {}, {0}},
                                           {"ul", {}, {0}, {}, {1}},
                                           {"dr", {0}, {}, {}, {2}},
                                           {"ur", {}, {0}, {}, {3}}});
}

inline Net tree_leaf()
{
    return Net(2, 0, {"p"}, std::vector<TransitionSpec>{{"in", {}, {0}, {0}, {}}, {"out", {0}, {}, {1}, {}}});
}

/// The depth-1 tree: one place and its generator.
inline Net tree_single() { return Net(0, 0, {"p"}, std::vector<TransitionSpec>{{"g", {}, {0}, {}, {}}}); }

/// Philosopher ph : 3 -> 3. Left ports talk to the fork on the left, right
/// ports to the fork on the right: port 0 takes a fork first, port 1 takes it
/// second, port 2 returns it. Either fork may be taken first.
inline Net philosopher()
{
    return Net(3, 3, {"think", "hasL", "hasR", "eat"},
               std::vector<TransitionSpec>{{"takeL1", {0}, {1}, {0}, {}},
                                           {"takeR1", {0}, {2}, {}, {0}},
                                           {"takeR2", {1}, {3}, {}, {1}},
                                           {"takeL2", {2}, {3}, {1}, {}},
                                           {"release", {3}, {0}, {2}, {2}}});
}

/// Fork fk : 3 -> 3 shared by the philosopher on its left (left ports) and
/// the one on its right (right ports), with the port roles of ph mirrored.
inline Net fork()
{
    return Net(3, 3, {"f"},
               std::vector<TransitionSpec>{{"giveL1", {0}, {}, {0}, {}},
                                           {"giveL2", {0}, {}, {1}, {}},
                                           {"backL", {}, {0}, {2}, {}},
                                           {"giveR1", {0}, {}, {}, {0}},
                                           {"giveR2", {0}, {}, {}, {1}},
                                           {"backR", {}, {0}, {}, {2}}});
}

/// d3 : 0 -> 6, duplicating each of three wires.
inline Net duplicate3()
{
    std::vector<TransitionSpec> ts;
    for (std::size_t j = 0; j < 3; ++j) ts.push_back({"c" + std::to_string(j), {}, {}, {}, {j, 3 + j}});
    return Net(0, 6, {}, ts);
}

/// i3 : 3 -> 3, three identity wires.
inline Net identity3()
{
    std::vector<TransitionSpec> ts;
    for (std::size_t j = 0; j < 3; ++j) ts.push_back({"w" + std::to_string(j), {}, {}, {j}, {j}});
    return Net(3, 3, {}, ts);
}

/// e3 : 6 -> 0, joining each of three wire pairs.
inline Net join3()
{
    std::vector<TransitionSpec> ts;
    for (std::size_t j = 0; j < 3; ++j) ts.push_back({"s" + std::to_string(j), {}, {}, {j, 3 + j}, {}});
    return Net(6, 0, {}, ts);
}

} // namespace components

namespace detail {

inline std::vector<Marking> only(const Net& n, std::initializer_list<std::size_t> marked)
{
    return {Bitset::of(n.place_count(), marked)};
}

inline void require_size(std::size_t n, std::size_t min, const char* family)
{
    if (n < min)
        throw ValidationError(std::string(family) + " size must be at least " + std::to_string(min) + ", got " +
                              std::to_string(n));
}

inline WiringExpr balanced_seq(const std::vector<WiringExpr>& xs, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1) return xs[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return WiringExpr::seq(balanced_seq(xs, lo, mid), balanced_seq(xs, mid, hi));
}

} // namespace detail

/// Flat buffer B_n: places u1, d1, ..., un, dn; every cell starts up and the
/// target is every cell down.
inline MarkedNet buffer_flat(std::size_t n)
{
    detail::require_size(n, 1, "buffer");
    std::vector<std::string> places;
    for (std::size_t i = 1; i <= n; ++i) {
        places.push_back("u" + std::to_string(i));
        places.push_back("d" + std::to_string(i));
    }
    auto u = [](std::size_t i) { return 2 * (i - 1); };
    auto d = [](std::size_t i) { return 2 * (i - 1) + 1; };
    std::vector<TransitionSpec> ts;
    ts.push_back({"t0", {d(1)}, {u(1)}, {}, {}});
    for (std::size_t i = 1; i < n; ++i)
        ts.push_back({"t" + std::to_string(i), {u(i), d(i + 1)}, {d(i), u(i + 1)}, {}, {}});
    ts.push_back({"t" + std::to_string(n), {u(n)}, {d(n)}, {}, {}});
    MarkedNet m{Net(0, 0, places, ts), Marking(2 * n), {}};
    for (std::size_t i = 1; i <= n; ++i) {
        m.initial.set(u(i));
        m.targets.push_back(PlaceTarget::no);
        m.targets.push_back(PlaceTarget::yes);
    }
    return m;
}

/// The chain b ; (b ; ... (b ; bottom)) over n cells, as used inside the
/// right-shaped buffer.
inline WiringExpr buffer_tail(std::size_t n)
{
    WiringExpr e = WiringExpr::var("bot");
    for (std::size_t i = 0; i < n; ++i) e = WiringExpr::seq(WiringExpr::var("b"), e);
    return e;
}

inline Assignments buffer_assignments()
{
    Assignments a;
    const Net b = components::cell();
    a.assign("top", components::top(), {Marking(0)}, {Marking(0)});
    a.assign("bot", components::bottom(), {Marking(0)}, {Marking(0)});
    a.assign("b", b, detail::only(b, {0}), detail::only(b, {1}));
    return a;
}

/// Buffer B_n = top ; b ; ... ; b ; bottom with n cells, bracketed as asked.
inline Family gen_buffer(std::size_t n, BufferShape shape)
{
    detail::require_size(n, 1, "buffer");
    Family f{std::nullopt, buffer_assignments(), buffer_flat(n)};
    std::vector<WiringExpr> xs{WiringExpr::var("top")};
    for (std::size_t i = 0; i < n; ++i) xs.push_back(WiringExpr::var("b"));
    xs.push_back(WiringExpr::var("bot"));
    switch (shape) {
    case BufferShape::flat: f.assign = {}; break;
    case BufferShape::right: f.expr = WiringExpr::seq(xs.front(), buffer_tail(n)); break;
    case BufferShape::left: {
        WiringExpr e = xs.front();
        for (std::size_t i = 1; i < xs.size(); ++i) e = WiringExpr::seq(e, xs[i]);
        f.expr = e;
        break;
    }
    case BufferShape::balanced: f.expr = detail::balanced_seq(xs, 0, xs.size()); break;
    }
    return f;
}

/// Tree T_n of depth n with 2^n - 1 places in pre-order (ids p<heap index>).
/// A generator feeds the root; every edge has a move down and a move up. The
/// target asks for every place to be marked at once.
inline Family gen_tree(std::size_t n)
{
    detail::require_size(n, 1, "tree");
    Family f;
    const std::size_t count = (std::size_t{1} << n) - 1;
    std::vector<std::string> places;
    std::vector<std::size_t> heap_of;
    auto preorder = [&](auto&& self, std::size_t h) -> void {
        if (h > count) return;
        places.push_back("p" + std::to_string(h));
        heap_of.push_back(h);
        self(self, 2 * h);
        self(self, 2 * h + 1);
    };
    preorder(preorder, 1);
    std::vector<std::size_t> pos(count + 1);
    for (std::size_t i = 0; i < heap_of.size(); ++i) pos[heap_of[i]] = i;
    std::vector<TransitionSpec> ts{{"g", {}, {pos[1]}, {}, {}}};
    for (std::size_t h = 2; h <= count; ++h) {
        const std::string edge = std::to_string(h / 2) + "_" + std::to_string(h);
        ts.push_back({"down" + edge, {pos[h / 2]}, {pos[h]}, {}, {}});
        ts.push_back({"up" + edge, {pos[h]}, {pos[h / 2]}, {}, {}});
    }
    f.flat = MarkedNet{Net(0, 0, places, ts), Marking(count), std::vector<PlaceTarget>(count, PlaceTarget::yes)};

    const std::vector<Marking> none{Bitset(1)}, full{Bitset::of(1, {0})};
    if (n == 1) {
        f.assign.assign("single", components::tree_single(), none, full);
        f.expr = WiringExpr::var("single");
        return f;
    }
    f.assign.assign("root", components::tree_root(), none, full);
    f.assign.assign("node", components::tree_node(), none, full);
    f.assign.assign("leaf", components::tree_leaf(), none, full);
    auto build = [&](auto&& self, std::size_t h, std::size_t depth) -> WiringExpr {
        if (depth == n) return WiringExpr::var("leaf");
        const auto children = WiringExpr::tensor(self(self, 2 * h, depth + 1), self(self, 2 * h + 1, depth + 1));
        return WiringExpr::seq(WiringExpr::var(depth == 1 ? "root" : "node"), children);
    };
    f.expr = build(build, 1, 1);
    return f;
}

/// PhRow_1 = ph ; fk and PhRow_{k+1} = ph ; (fk ; PhRow_k).
inline WiringExpr philosopher_row(std::size_t k)
{
    detail::require_size(k, 1, "philosopher row");
    const auto ph = WiringExpr::var("ph"), fk = WiringExpr::var("fk");
    WiringExpr row = WiringExpr::seq(ph, fk);
    for (std::size_t i = 1; i < k; ++i) row = WiringExpr::seq(ph, WiringExpr::seq(fk, row));
    return row;
}

inline Assignments philosopher_assignments()
{
    Assignments a;
    const Net ph = components::philosopher(), fk = components::fork();
    a.assign("ph", ph, detail::only(ph, {0}), {Bitset::of(4, {1}), Bitset::of(4, {2})});
    a.assign("fk", fk, detail::only(fk, {0}), {Bitset(1)});
    a.assign("d3", components::duplicate3(), {Bitset(0)}, {Bitset(0)});
    a.assign("i3", components::identity3(), {Bitset(0)}, {Bitset(0)});
    a.assign("e3", components::join3(), {Bitset(0)}, {Bitset(0)});
    return a;
}

/// Dining philosophers Ph_n = d3 ; ((i3 * PhRow_n) ; e3). The target is the
/// deadlock: every philosopher holds exactly one fork and no fork is free.
/// The flat net lists, per philosopher i, think_i, hasL_i, hasR_i, eat_i and
/// then the fork f_i to its right; philosopher i's left fork is f_{i-1}
/// (cyclically).
inline Family gen_philosophers(std::size_t n)
{
    detail::require_size(n, 1, "philosophers");
    Family f;
    f.assign = philosopher_assignments();
    const auto row = philosopher_row(n);
    f.expr = WiringExpr::seq(WiringExpr::var("d3"),
                             WiringExpr::seq(WiringExpr::tensor(WiringExpr::var("i3"), row), WiringExpr::var("e3")));

    std::vector<std::string> places;
    std::vector<TransitionSpec> ts;
    auto base = [](std::size_t i) { return 5 * i; };
    for (std::size_t i = 0; i < n; ++i) {
        const std::string s = std::to_string(i + 1);
        for (const char* p : {"think", "hasL", "hasR", "eat", "f"}) places.push_back(p + s);
        const std::size_t b = base(i);
        const std::size_t right_fork = b + 4;
        const std::size_t left_fork = base((i + n - 1) % n) + 4;
        ts.push_back({"takeL1_" + s, {b, left_fork}, {b + 1}, {}, {}});
        ts.push_back({"takeR1_" + s, {b, right_fork}, {b + 2}, {}, {}});
        ts.push_back({"takeR2_" + s, {b + 1, right_fork}, {b + 3}, {}, {}});
        ts.push_back({"takeL2_" + s, {b + 2, left_fork}, {b + 3}, {}, {}});
        ts.push_back({"release_" + s, {b + 3}, {b, left_fork, right_fork}, {}, {}});
    }
    MarkedNet m{Net(0, 0, places, ts), Marking(5 * n), std::vector<PlaceTarget>(5 * n, PlaceTarget::no)};
    for (std::size_t i = 0; i < n; ++i) {
        m.initial.set(base(i));
        m.initial.set(base(i) + 4);
        // each philosopher holds exactly one token, so with think and eat empty
        // exactly one of hasL / hasR is marked
        m.targets[base(i) + 1] = PlaceTarget::dont_care;
        m.targets[base(i) + 2] = PlaceTarget::dont_care;
    }
    f.flat = std::move(m);
    return f;
}

/// Clique K_n: places c0..c(n-1) and a transition for every ordered pair.
/// Starts with c0 marked; the target asks for the token in c(n-1).
inline MarkedNet gen_clique(std::size_t n)
{
    detail::require_size(n, 2, "clique");
    std::vector<std::string> places;
    for (std::size_t i = 0; i < n; ++i) places.push_back("c" + std::to_string(i));
    std::vector<TransitionSpec> ts;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) ts.push_back({"t" + std::to_string(i) + "_" + std::to_string(j), {i}, {j}, {}, {}});
    MarkedNet m{Net(0, 0, places, ts), Bitset::of(n, {0}), std::vector<PlaceTarget>(n, PlaceTarget::no)};
    m.targets[n - 1] = PlaceTarget::yes;
    return m;
}

} // namespace compnet

#endif
