#include <catch_amalgamated.hpp>

#include "support/explicit.hpp"

using namespace compnet;

namespace {

// Two-place net 0 -> 2 whose move from place 0 to place 1 emits on port 0
// while an unrelated transition emits on port 1.
Net n0()
{
    return Net(0, 2, {"a", "b"},
               std::vector<TransitionSpec>{{"t1", {0}, {1}, {}, {0}}, {"t2", {}, {}, {}, {1}}});
}

// Net 2 -> 0 with a single transition consuming both ports.
Net n1() { return Net(2, 0, {}, std::vector<TransitionSpec>{{"t3", {}, {}, {0, 1}, {}}}); }

std::vector<std::pair<std::string, std::string>> edges(const Net& n, const Marking& x)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : step_successors(n, x)) out.emplace_back(s.label.to_string(), s.target.to_string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("validate_net reports multiply connected ports")
{
    const Net bad(0, 1, {"p"}, std::vector<TransitionSpec>{{"a", {}, {0}, {}, {0}}, {"b", {0}, {}, {}, {0}}});
    const auto report = validate_net(bad);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().find("port 0 multiply connected") != std::string::npos);
    CHECK_THROWS_AS(require_valid(bad), ValidationError);
}

TEST_CASE("validate_net accepts the empty net and generated buffers")
{
    CHECK(validate_net(Net(0, 0, {}, std::vector<TransitionSpec>{})).ok());
    CHECK(validate_net(buffer_flat(4).net).ok());
}

TEST_CASE("validate_net reports duplicate identifiers")
{
    const Net dup(0, 0, {"p", "p"}, std::vector<TransitionSpec>{{"t", {}, {}, {}, {}}, {"t", {}, {}, {}, {}}});
    CHECK(validate_net(dup).violations.size() == 2);
}

TEST_CASE("out-of-range indices are rejected on construction")
{
    CHECK_THROWS_AS(Net(0, 0, {"p"}, std::vector<TransitionSpec>{{"t", {1}, {}, {}, {}}}), ValidationError);
    CHECK_THROWS_AS(Net(1, 0, {}, std::vector<TransitionSpec>{{"t", {}, {}, {1}, {}}}), ValidationError);
}

TEST_CASE("cell at its initial marking steps to the complementary marking on 0/1")
{
    const Net b = components::cell();
    const Marking up = Bitset::of(2, {0});
    const auto e = edges(b, up);
    REQUIRE(e.size() == 2);
    CHECK(e[0] == std::pair<std::string, std::string>{"0/0", "10"});
    CHECK(e[1] == std::pair<std::string, std::string>{"0/1", "01"});
}

TEST_CASE("step_successors always contains the empty step")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Net n = support::random_net(rng, 4, 2, 2, 5);
        for (support::Mask x = 0; x < 16; ++x) {
            const Marking m = support::from_mask(4, x);
            const auto succ = step_successors(n, m);
            CHECK(std::find(succ.begin(), succ.end(), Step{StepLabel::epsilon(2, 2), m}) != succ.end());
        }
    }
}

TEST_CASE("simultaneous firing of t1 and t2 is a single /11 step")
{
    const Net n = n0();
    const auto e = edges(n, Bitset::of(2, {0}));
    CHECK(std::find(e.begin(), e.end(), std::pair<std::string, std::string>{"/11", "01"}) != e.end());
    CHECK(std::find(e.begin(), e.end(), std::pair<std::string, std::string>{"/10", "01"}) != e.end());
    CHECK(std::find(e.begin(), e.end(), std::pair<std::string, std::string>{"/01", "10"}) != e.end());
    CHECK(e.size() == 4);
}

TEST_CASE("transitions with a place in both pre and post never fire")
{
    const Net n(0, 0, {"p", "q"}, std::vector<TransitionSpec>{{"loop", {0}, {0}, {}, {}}, {"mv", {0}, {1}, {}, {}}});
    for (support::Mask x = 0; x < 4; ++x)
        for (const auto& u : enabled_steps(n, support::from_mask(2, x)))
            CHECK(std::find(u.begin(), u.end(), std::size_t{0}) == u.end());
}

TEST_CASE("step_successors agrees with subset enumeration")
{
    std::mt19937 rng(12);
    for (int i = 0; i < 300; ++i) {
        const Net n = support::random_net(rng, 5, 2, 2, 6);
        for (support::Mask x = 0; x < 32; ++x) {
            std::set<support::Edge> lib;
            for (const auto& s : step_successors(n, support::from_mask(5, x)))
                lib.insert({support::label_code(s.label.left, s.label.right), support::to_mask(s.target)});
            REQUIRE(lib == support::steps_at(n, x));
        }
    }
}

TEST_CASE("minimal synchronisation of the two-port example")
{
    const auto syncs = minimal_synchronisations(n0(), n1());
    REQUIRE(syncs.size() == 1);
    CHECK(syncs[0].left == std::vector<std::size_t>{0, 1});
    CHECK(syncs[0].right == std::vector<std::size_t>{0});
}

TEST_CASE("without boundary coupling every transition is its own synchronisation")
{
    const Net n(0, 1, {"p"}, std::vector<TransitionSpec>{{"a", {0}, {}, {}, {}}, {"b", {}, {0}, {}, {}}});
    const Net m(1, 0, {"q"}, std::vector<TransitionSpec>{{"c", {0}, {}, {}, {}}});
    auto syncs = minimal_synchronisations(n, m);
    std::sort(syncs.begin(), syncs.end());
    REQUIRE(syncs.size() == 3);
    CHECK(syncs[0] == Synchronisation{{}, {0}});
    CHECK(syncs[1] == Synchronisation{{0}, {}});
    CHECK(syncs[2] == Synchronisation{{1}, {}});
}

TEST_CASE("minimal synchronisations agree with brute-force subset scan")
{
    std::mt19937 rng(13);
    for (int i = 0; i < 400; ++i) {
        std::uniform_int_distribution<std::size_t> w(0, 3);
        const std::size_t k = w(rng), l = w(rng), m = w(rng);
        const Net a = support::random_net(rng, 4, k, l, 5);
        const Net b = support::random_net(rng, 4, l, m, 5);
        std::set<support::SyncMask> lib;
        for (const auto& s : minimal_synchronisations(a, b)) {
            support::Mask u = 0, v = 0;
            for (auto t : s.left) u |= support::Mask{1} << t;
            for (auto t : s.right) v |= support::Mask{1} << t;
            lib.emplace(u, v);
        }
        REQUIRE(lib == support::minimal_synchronisations(a, b));
    }
}

TEST_CASE("compose_seq tags places and fuses the shared boundary")
{
    const Net c = compose_seq(n0(), n1());
    CHECK(c.left_width() == 0);
    CHECK(c.right_width() == 0);
    CHECK(c.places() == std::vector<std::string>{"L.a", "L.b"});
    REQUIRE(c.transition_count() == 1);
    CHECK(c.transition(0).id == "L.t1+L.t2+R.t3");
    CHECK(c.transition(0).pre == Bitset::of(2, {0}));
    CHECK(c.transition(0).post == Bitset::of(2, {1}));
    CHECK_THROWS_AS(compose_seq(n0(), n0()), WidthMismatch);
}

TEST_CASE("cell ; cell is the two-cell chain")
{
    const Net b = components::cell();
    const Net two = compose_seq(b, b);
    const Net expected(1, 1, {"u1", "d1", "u2", "d2"},
                       std::vector<TransitionSpec>{{"in", {1}, {0}, {0}, {}},
                                                   {"mid", {0, 3}, {1, 2}, {}, {}},
                                                   {"out", {2}, {3}, {}, {0}}});
    CHECK(canonical_form(two) == canonical_form(expected));
}

TEST_CASE("top ; b ; b ; b ; b ; bottom is the flat four-cell buffer")
{
    const Net b = components::cell();
    Net acc = components::top();
    for (int i = 0; i < 4; ++i) acc = compose_seq(acc, b);
    acc = compose_seq(acc, components::bottom());
    CHECK(canonical_form(acc) == canonical_form(buffer_flat(4).net));
}

TEST_CASE("composition with a port-only net keeps internal transitions")
{
    const Net n(0, 2, {"p", "q"}, std::vector<TransitionSpec>{{"a", {0}, {1}, {}, {}}, {"b", {1}, {0}, {}, {}}});
    const Net idle(2, 0, {}, std::vector<TransitionSpec>{});
    const Net c = compose_seq(n, idle);
    REQUIRE(c.transition_count() == 2);
    CHECK(canonical_form(c) == canonical_form(Net(0, 0, {"p", "q"}, std::vector<TransitionSpec>{
                                                                        {"a", {0}, {1}, {}, {}},
                                                                        {"b", {1}, {0}, {}, {}}})));
}

TEST_CASE("compose_tensor shifts ports and has the empty net as unit")
{
    const Net a(2, 1, {"p"}, std::vector<TransitionSpec>{{"x", {0}, {}, {1}, {0}}});
    const Net b(1, 2, {"q"}, std::vector<TransitionSpec>{{"y", {}, {0}, {0}, {1}}});
    const Net t = compose_tensor(a, b);
    CHECK(t.left_width() == 3);
    CHECK(t.right_width() == 3);
    CHECK(t.transition(1).source == Bitset::of(3, {2}));
    CHECK(t.transition(1).target == Bitset::of(3, {2}));
    CHECK(t.transition(1).post == Bitset::of(2, {1}));
    const Net unit(0, 0, {}, std::vector<TransitionSpec>{});
    CHECK(canonical_form(compose_tensor(a, unit)) == canonical_form(a));
    CHECK(canonical_form(compose_tensor(unit, a)) == canonical_form(a));
}

TEST_CASE("identity and row tensor as used for philosophers")
{
    const Net i3 = components::identity3();
    const Net ph = components::philosopher();
    const Net t = compose_tensor(i3, ph);
    CHECK(t.left_width() == 6);
    CHECK(t.right_width() == 6);
    CHECK(t.place_count() == 4);
    CHECK(validate_net(t).ok());
}

TEST_CASE("strip_tags removes every leading composition tag")
{
    CHECK(strip_tags("L.R.L.p") == "p");
    CHECK(strip_tags("Lp") == "Lp");
    CHECK(strip_tags("R.x.y") == "x.y");
}

TEST_CASE("tensor step relation is the unsynchronised product")
{
    std::mt19937 rng(14);
    for (int i = 0; i < 150; ++i) {
        const Net a = support::random_net(rng, 3, 1, 2, 4);
        const Net b = support::random_net(rng, 3, 2, 1, 4);
        const Net t = compose_tensor(a, b);
        const auto ra = support::strong_relation(a);
        const auto rb = support::strong_relation(b);
        std::set<support::Triple> expected;
        for (const auto& [x, c, x2] : ra)
            for (const auto& [y, d, y2] : rb) {
                const support::Mask left = (c & 1u) | ((d & 3u) << 1);
                const support::Mask right = (c >> 1) | ((d >> 2) << 2);
                expected.emplace(x | (y << 3), left | (right << 3), x2 | (y2 << 3));
            }
        REQUIRE(support::strong_relation(t) == expected);
    }
}
