#ifndef COMPNET_NET_HPP
#define COMPNET_NET_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitset.hpp"
#include "error.hpp"

namespace compnet {

/// A marking of a 1-bounded net: bit i set iff place i holds a token.
using Marking = Bitset;

/// Boundary label alpha/beta: `left` has one bit per left port, `right` one
/// bit per right port.
struct StepLabel {
    Bitset left;
    Bitset right;

    static StepLabel epsilon(std::size_t k, std::size_t l) { return {Bitset(k), Bitset(l)}; }
    bool is_epsilon() const { return left.none() && right.none(); }
    /// Left bits followed by right bits.
    Bitset flat() const { return left.concat(right); }
    std::string to_string() const { return left.to_string() + "/" + right.to_string(); }

    friend bool operator==(const StepLabel&, const StepLabel&) = default;
    friend auto operator<=>(const StepLabel&, const StepLabel&) = default;
};

struct TransitionSpec {
    std::string id;
    std::vector<std::size_t> pre;
    std::vector<std::size_t> post;
    std::vector<std::size_t> source;
    std::vector<std::size_t> target;
};

struct Transition {
    std::string id;
    Bitset pre;    // over places
    Bitset post;   // over places
    Bitset source; // over left ports
    Bitset target; // over right ports

    Bitset touched() const { return pre | post; }
};

/// A net with boundaries N : k -> l. Immutable once constructed.
class Net {
public:
    Net() = default;

    Net(std::size_t left, std::size_t right, std::vector<std::string> places,
        const std::vector<TransitionSpec>& transitions)
        : left_(left), right_(right), places_(std::move(places))
    {
        transitions_.reserve(transitions.size());
        for (const auto& spec : transitions) {
            auto check = [&](const std::vector<std::size_t>& v, std::size_t bound, const char* what) {
                for (auto i : v)
                    if (i >= bound)
                        throw ValidationError("transition '" + spec.id + "': " + what + " index " +
                                              std::to_string(i) + " out of range");
            };
            check(spec.pre, places_.size(), "pre-place");
            check(spec.post, places_.size(), "post-place");
            check(spec.source, left_, "left port");
            check(spec.target, right_, "right port");
            transitions_.push_back(Transition{spec.id, Bitset::from_indices(places_.size(), spec.pre),
                                              Bitset::from_indices(places_.size(), spec.post),
                                              Bitset::from_indices(left_, spec.source),
                                              Bitset::from_indices(right_, spec.target)});
        }
    }

    Net(std::size_t left, std::size_t right, std::vector<std::string> places, std::vector<Transition> transitions)
        : left_(left), right_(right), places_(std::move(places)), transitions_(std::move(transitions))
    {
        for (const auto& t : transitions_)
            if (t.pre.width() != places_.size() || t.post.width() != places_.size() ||
                t.source.width() != left_ || t.target.width() != right_)
                throw ValidationError("transition '" + t.id + "' has sets of the wrong width");
    }

    std::size_t left_width() const { return left_; }
    std::size_t right_width() const { return right_; }
    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }
    const std::vector<std::string>& places() const { return places_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const Transition& transition(std::size_t i) const { return transitions_[i]; }

    std::optional<std::size_t> place_index(const std::string& id) const
    {
        auto it = std::find(places_.begin(), places_.end(), id);
        if (it == places_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - places_.begin());
    }

    Marking empty_marking() const { return Marking(places_.size()); }

    Marking marking_of(const std::vector<std::string>& ids) const
    {
        Marking m = empty_marking();
        for (const auto& id : ids) {
            auto idx = place_index(id);
            if (!idx) throw ValidationError("unknown place '" + id + "'");
            m.set(*idx);
        }
        return m;
    }

    std::vector<std::string> place_ids(const Marking& m) const
    {
        std::vector<std::string> out;
        m.for_each([&](std::size_t i) { out.push_back(places_[i]); });
        return out;
    }

private:
    std::size_t left_ = 0;
    std::size_t right_ = 0;
    std::vector<std::string> places_;
    std::vector<Transition> transitions_;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_net(const Net& n)
{
    ValidationReport report;
    std::set<std::string> place_ids;
    for (const auto& p : n.places())
        if (!place_ids.insert(p).second) report.violations.push_back("duplicate place id '" + p + "'");
    std::set<std::string> transition_ids;
    for (const auto& t : n.transitions())
        if (!transition_ids.insert(t.id).second)
            report.violations.push_back("duplicate transition id '" + t.id + "'");

    auto check_side = [&](std::size_t width, bool left) {
        for (std::size_t port = 0; port < width; ++port) {
            std::vector<std::string> attached;
            for (const auto& t : n.transitions())
                if ((left ? t.source : t.target).test(port)) attached.push_back(t.id);
            if (attached.size() > 1) {
                std::string msg = std::string(left ? "left" : "right") + " port " + std::to_string(port) +
                                  " multiply connected (";
                for (std::size_t i = 0; i < attached.size(); ++i) msg += (i ? ", " : "") + attached[i];
                report.violations.push_back(msg + ")");
            }
        }
    };
    check_side(n.left_width(), true);
    check_side(n.right_width(), false);
    return report;
}

inline void require_valid(const Net& n)
{
    auto report = validate_net(n);
    if (!report.ok()) throw ValidationError(report.violations.front());
}

// ---------------------------------------------------------------------------
// Step semantics

/// A transition is individually enabled at x when pre(t) is marked and post(t)
/// is empty. Transitions with pre(t) and post(t) overlapping are never enabled.
inline bool individually_enabled(const Transition& t, const Marking& x)
{
    return t.pre.is_subset_of(x) && !t.post.intersects(x);
}

/// Every mutually independent set U of transitions enabled at x, including the
/// empty set, each as a sorted list of transition indices.
inline std::vector<std::vector<std::size_t>> enabled_steps(const Net& n, const Marking& x)
{
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        if (individually_enabled(n.transition(i), x)) enabled.push_back(i);

    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> chosen;
    Bitset used(n.place_count());
    auto rec = [&](auto&& self, std::size_t pos) -> void {
        if (pos == enabled.size()) {
            out.push_back(chosen);
            return;
        }
        self(self, pos + 1);
        const auto& t = n.transition(enabled[pos]);
        const Bitset touched = t.touched();
        if (touched.intersects(used)) return;
        chosen.push_back(enabled[pos]);
        Bitset saved = used;
        used |= touched;
        self(self, pos + 1);
        used = std::move(saved);
        chosen.pop_back();
    };
    rec(rec, 0);
    return out;
}

struct Step {
    StepLabel label;
    Marking target;

    friend bool operator==(const Step&, const Step&) = default;
};

/// Result of firing the step `fired` (assumed enabled) at x.
inline Step fire_step(const Net& n, const Marking& x, const std::vector<std::size_t>& fired)
{
    Step s{StepLabel::epsilon(n.left_width(), n.right_width()), x};
    Bitset pre(n.place_count()), post(n.place_count());
    for (auto i : fired) {
        const auto& t = n.transition(i);
        pre |= t.pre;
        post |= t.post;
        s.label.left |= t.source;
        s.label.right |= t.target;
    }
    s.target -= pre;
    s.target |= post;
    return s;
}

/// All (label, successor) pairs of the step transition relation at x, with
/// duplicates collapsed. Always contains the empty-step self-loop.
inline std::vector<Step> step_successors(const Net& n, const Marking& x)
{
    std::vector<Step> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& u : enabled_steps(n, x)) {
        Step s = fire_step(n, x, u);
        if (seen.emplace(s.label.flat().to_string(), s.target.to_string()).second) out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synchronisations and composition

struct Synchronisation {
    std::vector<std::size_t> left;  // transitions of the left operand
    std::vector<std::size_t> right; // transitions of the right operand

    friend bool operator==(const Synchronisation&, const Synchronisation&) = default;
    friend auto operator<=>(const Synchronisation&, const Synchronisation&) = default;
};

inline bool mutually_independent(const Net& n, const std::vector<std::size_t>& set)
{
    Bitset used(n.place_count());
    for (auto i : set) {
        const Bitset touched = n.transition(i).touched();
        if (touched.intersects(used)) return false;
        used |= touched;
    }
    return true;
}

/// The minimal non-trivial synchronisations of n : k -> l and m : l -> r.
///
/// Port injectivity means a transition on the shared boundary forces the
/// unique partner attached to each of its ports; the forced closure of a
/// boundary transition is therefore the only minimal synchronisation that can
/// contain it.
inline std::vector<Synchronisation> minimal_synchronisations(const Net& n, const Net& m)
{
    if (n.right_width() != m.left_width())
        throw WidthMismatch("cannot synchronise: right width " + std::to_string(n.right_width()) +
                            " differs from left width " + std::to_string(m.left_width()));
    const std::size_t shared = n.right_width();
    std::vector<std::optional<std::size_t>> at_n(shared), at_m(shared);
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        n.transition(i).target.for_each([&](std::size_t p) { at_n[p] = i; });
    for (std::size_t j = 0; j < m.transition_count(); ++j)
        m.transition(j).source.for_each([&](std::size_t p) { at_m[p] = j; });

    std::set<Synchronisation> found;
    for (std::size_t i = 0; i < n.transition_count(); ++i)
        if (n.transition(i).target.none()) found.insert({{i}, {}});
    for (std::size_t j = 0; j < m.transition_count(); ++j)
        if (m.transition(j).source.none()) found.insert({{}, {j}});

    auto close = [&](std::vector<bool> in_u, std::vector<bool> in_v) -> std::optional<Synchronisation> {
        std::vector<bool> port_done(shared, false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t p = 0; p < shared; ++p) {
                if (port_done[p]) continue;
                bool demanded = false;
                for (std::size_t i = 0; i < in_u.size() && !demanded; ++i)
                    demanded = in_u[i] && n.transition(i).target.test(p);
                for (std::size_t j = 0; j < in_v.size() && !demanded; ++j)
                    demanded = in_v[j] && m.transition(j).source.test(p);
                if (!demanded) continue;
                if (!at_n[p] || !at_m[p]) return std::nullopt;
                port_done[p] = true;
                if (!in_u[*at_n[p]]) in_u[*at_n[p]] = true;
                if (!in_v[*at_m[p]]) in_v[*at_m[p]] = true;
                changed = true;
            }
        }
        Synchronisation s;
        for (std::size_t i = 0; i < in_u.size(); ++i)
            if (in_u[i]) s.left.push_back(i);
        for (std::size_t j = 0; j < in_v.size(); ++j)
            if (in_v[j]) s.right.push_back(j);
        if (!mutually_independent(n, s.left) || !mutually_independent(m, s.right)) return std::nullopt;
        return s;
    };

    for (std::size_t i = 0; i < n.transition_count(); ++i) {
        if (n.transition(i).target.none()) continue;
        std::vector<bool> u(n.transition_count(), false), v(m.transition_count(), false);
        u[i] = true;
        if (auto s = close(u, v)) found.insert(*s);
    }
    for (std::size_t j = 0; j < m.transition_count(); ++j) {
        if (m.transition(j).source.none()) continue;
        std::vector<bool> u(n.transition_count(), false), v(m.transition_count(), false);
        v[j] = true;
        if (auto s = close(u, v)) found.insert(*s);
    }
    return {found.begin(), found.end()};
}

namespace detail {

inline std::string tagged_ids(const Net& n, const std::vector<std::size_t>& ts, const char* tag)
{
    std::string out;
    for (auto i : ts) out += (out.empty() ? "" : "+") + std::string(tag) + n.transition(i).id;
    return out;
}

} // namespace detail

/// Sequential composition n ; m. Places of n are tagged "L.", places of m "R.";
/// the marking X + Y of the composite is the concatenation of X and Y.
inline Net compose_seq(const Net& n, const Net& m)
{
    const auto syncs = minimal_synchronisations(n, m);
    std::vector<std::string> places;
    places.reserve(n.place_count() + m.place_count());
    for (const auto& p : n.places()) places.push_back("L." + p);
    for (const auto& p : m.places()) places.push_back("R." + p);

    std::vector<Transition> ts;
    ts.reserve(syncs.size());
    for (const auto& s : syncs) {
        Bitset pre_n(n.place_count()), post_n(n.place_count()), src(n.left_width());
        Bitset pre_m(m.place_count()), post_m(m.place_count()), tgt(m.right_width());
        for (auto i : s.left) {
            pre_n |= n.transition(i).pre;
            post_n |= n.transition(i).post;
            src |= n.transition(i).source;
        }
        for (auto j : s.right) {
            pre_m |= m.transition(j).pre;
            post_m |= m.transition(j).post;
            tgt |= m.transition(j).target;
        }
        std::string id = detail::tagged_ids(n, s.left, "L.");
        const std::string rid = detail::tagged_ids(m, s.right, "R.");
        if (!rid.empty()) id += (id.empty() ? "" : "+") + rid;
        ts.push_back(Transition{std::move(id), pre_n.concat(pre_m), post_n.concat(post_m), src, tgt});
    }
    return Net(n.left_width(), m.right_width(), std::move(places), std::move(ts));
}

/// Parallel composition n (x) m : (k+p) -> (l+q); ports of m are shifted past
/// those of n.
inline Net compose_tensor(const Net& n, const Net& m)
{
    std::vector<std::string> places;
    places.reserve(n.place_count() + m.place_count());
    for (const auto& p : n.places()) places.push_back("L." + p);
    for (const auto& p : m.places()) places.push_back("R." + p);
    const Bitset no_places_n(n.place_count()), no_places_m(m.place_count());
    const Bitset no_left_n(n.left_width()), no_left_m(m.left_width());
    const Bitset no_right_n(n.right_width()), no_right_m(m.right_width());

    std::vector<Transition> ts;
    ts.reserve(n.transition_count() + m.transition_count());
    for (const auto& t : n.transitions())
        ts.push_back(Transition{"L." + t.id, t.pre.concat(no_places_m), t.post.concat(no_places_m),
                                t.source.concat(no_left_m), t.target.concat(no_right_m)});
    for (const auto& t : m.transitions())
        ts.push_back(Transition{"R." + t.id, no_places_n.concat(t.pre), no_places_n.concat(t.post),
                                no_left_n.concat(t.source), no_right_n.concat(t.target)});
    return Net(n.left_width() + m.left_width(), n.right_width() + m.right_width(), std::move(places),
               std::move(ts));
}

// ---------------------------------------------------------------------------
// Canonical forms

/// Identifier-free description of a net: widths, place count and the sorted
/// multiset of transitions over place *positions*. Two nets with equal forms
/// are isomorphic via the positional place bijection.
struct CanonicalForm {
    std::size_t left = 0, right = 0, places = 0;
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> transitions;

    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;

    std::string to_string() const
    {
        std::ostringstream os;
        os << left << ':' << right << ':' << places;
        for (const auto& [pre, post, src, tgt] : transitions)
            os << '|' << pre << ',' << post << ',' << src << ',' << tgt;
        return os.str();
    }
};

inline CanonicalForm canonical_form(const Net& n)
{
    CanonicalForm f{n.left_width(), n.right_width(), n.place_count(), {}};
    for (const auto& t : n.transitions())
        f.transitions.emplace_back(t.pre.to_string(), t.post.to_string(), t.source.to_string(),
                                   t.target.to_string());
    std::sort(f.transitions.begin(), f.transitions.end());
    return f;
}

/// Canonical form after reordering places by a key (typically an identifier
/// with composition tags stripped). Keys must be unique within each net.
template <typename KeyFn>
CanonicalForm canonical_form_by(const Net& n, KeyFn&& key)
{
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < n.place_count(); ++i) order.emplace_back(key(n.places()[i]), i);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> position(n.place_count());
    for (std::size_t r = 0; r < order.size(); ++r) position[order[r].second] = r;
    auto remap = [&](const Bitset& b) {
        Bitset out(n.place_count());
        b.for_each([&](std::size_t i) { out.set(position[i]); });
        return out.to_string();
    };
    CanonicalForm f{n.left_width(), n.right_width(), n.place_count(), {}};
    for (const auto& t : n.transitions())
        f.transitions.emplace_back(remap(t.pre), remap(t.post), t.source.to_string(), t.target.to_string());
    std::sort(f.transitions.begin(), f.transitions.end());
    return f;
}

/// Strips leading "L." / "R." composition tags from an identifier.
inline std::string strip_tags(std::string id)
{
    while (id.size() >= 2 && (id[0] == 'L' || id[0] == 'R') && id[1] == '.') id.erase(0, 2);
    return id;
}

} // namespace compnet

#endif
