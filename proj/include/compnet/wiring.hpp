#ifndef COMPNET_WIRING_HPP
#define COMPNET_WIRING_HPP

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dfa.hpp"
#include "error.hpp"
#include "net.hpp"

namespace compnet {

/// Term of the grammar  T ::= x | T ; T | T * T  (the last being the tensor).
/// Immutable and cheap to copy; subterms may be shared.
class WiringExpr {
public:
    enum class Kind { var, seq, tensor };

    static WiringExpr var(std::string name) { return WiringExpr(std::make_shared<Node>(Node{Kind::var, std::move(name), {}, {}})); }
    static WiringExpr seq(WiringExpr a, WiringExpr b) { return binary(Kind::seq, std::move(a), std::move(b)); }
    static WiringExpr tensor(WiringExpr a, WiringExpr b) { return binary(Kind::tensor, std::move(a), std::move(b)); }

    Kind kind() const { return node_->kind; }
    bool is_var() const { return kind() == Kind::var; }
    const std::string& name() const { return node_->name; }
    const WiringExpr& left() const { return *node_->left; }
    const WiringExpr& right() const { return *node_->right; }

    /// Variables in left-to-right order, repeats included.
    std::vector<std::string> leaves() const
    {
        std::vector<std::string> out;
        collect(out);
        return out;
    }

    std::size_t size() const { return is_var() ? 1 : 1 + left().size() + right().size(); }

    std::string to_string() const
    {
        if (is_var()) return name();
        return "(" + left().to_string() + (kind() == Kind::seq ? " ; " : " * ") + right().to_string() + ")";
    }

    friend bool operator==(const WiringExpr& a, const WiringExpr& b)
    {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind()) return false;
        if (a.is_var()) return a.name() == b.name();
        return a.left() == b.left() && a.right() == b.right();
    }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const WiringExpr> left, right;
    };

    explicit WiringExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static WiringExpr binary(Kind k, WiringExpr a, WiringExpr b)
    {
        return WiringExpr(std::make_shared<Node>(
            Node{k, {}, std::make_shared<const WiringExpr>(std::move(a)), std::make_shared<const WiringExpr>(std::move(b))}));
    }

    void collect(std::vector<std::string>& out) const
    {
        if (is_var()) {
            out.push_back(name());
            return;
        }
        left().collect(out);
        right().collect(out);
    }

    std::shared_ptr<const Node> node_;
};

/// Variable assignment together with per-variable initial and final markings.
struct Assignments {
    std::map<std::string, Net> nets;
    std::map<std::string, std::vector<Marking>> initial;
    std::map<std::string, std::vector<Marking>> final;

    void assign(const std::string& x, Net n, std::vector<Marking> init, std::vector<Marking> fin)
    {
        nets.insert_or_assign(x, std::move(n));
        initial.insert_or_assign(x, std::move(init));
        final.insert_or_assign(x, std::move(fin));
    }

    const Net& net(const std::string& x) const
    {
        auto it = nets.find(x);
        if (it == nets.end()) throw ValidationError("variable '" + x + "' is not assigned a net");
        return it->second;
    }

    const std::vector<Marking>& initial_of(const std::string& x) const { return lookup(initial, x, "initial"); }
    const std::vector<Marking>& final_of(const std::string& x) const { return lookup(final, x, "final"); }

private:
    static const std::vector<Marking>& lookup(const std::map<std::string, std::vector<Marking>>& m,
                                              const std::string& x, const char* what)
    {
        auto it = m.find(x);
        if (it == m.end()) throw ValidationError("variable '" + x + "' has no " + what + " markings");
        return it->second;
    }
};

/// Boundary widths of a term under an assignment. Throws on unassigned
/// variables and on `;` nodes whose inner widths disagree.
inline std::pair<std::size_t, std::size_t> expr_widths(const WiringExpr& t, const Assignments& a)
{
    if (t.is_var()) {
        const Net& n = a.net(t.name());
        return {n.left_width(), n.right_width()};
    }
    const auto [k1, l1] = expr_widths(t.left(), a);
    const auto [k2, l2] = expr_widths(t.right(), a);
    if (t.kind() == WiringExpr::Kind::tensor) return {k1 + k2, l1 + l2};
    if (l1 != k2)
        throw WidthMismatch("width mismatch in " + t.to_string() + ": " + std::to_string(l1) + " vs " +
                            std::to_string(k2));
    return {k1, l2};
}

/// Checks every leaf's markings for well-formedness and ℐ non-emptiness.
inline void validate_assignments(const WiringExpr& t, const Assignments& a)
{
    expr_widths(t, a);
    for (const auto& x : t.leaves()) {
        const Net& n = a.net(x);
        const auto& init = a.initial_of(x);
        if (init.empty()) throw ValidationError("variable '" + x + "' has an empty set of initial markings");
        for (const auto* set : {&init, &a.final_of(x)})
            for (const auto& m : *set)
                if (m.width() != n.place_count())
                    throw ValidationError("variable '" + x + "': marking of width " + std::to_string(m.width()) +
                                          " for a net with " + std::to_string(n.place_count()) + " places");
    }
}

/// The composite net denoted by the term.
inline Net net_semantics(const WiringExpr& t, const Assignments& a)
{
    if (t.is_var()) return a.net(t.name());
    const Net l = net_semantics(t.left(), a);
    const Net r = net_semantics(t.right(), a);
    return t.kind() == WiringExpr::Kind::seq ? compose_seq(l, r) : compose_tensor(l, r);
}

/// Markings of the composite net: every concatenation of one marking per leaf,
/// in leaf order (matching the place order of net_semantics).
inline std::vector<Marking> combined_markings(const WiringExpr& t,
                                              const std::map<std::string, std::vector<Marking>>& m)
{
    if (t.is_var()) {
        auto it = m.find(t.name());
        if (it == m.end()) throw ValidationError("variable '" + t.name() + "' has no markings");
        return it->second;
    }
    const auto l = combined_markings(t.left(), m);
    const auto r = combined_markings(t.right(), m);
    std::vector<Marking> out;
    out.reserve(l.size() * r.size());
    for (const auto& x : l)
        for (const auto& y : r) out.push_back(x.concat(y));
    return out;
}

/// Thread-safe map from evaluation keys to minimal automata.
class MemoTable {
public:
    std::shared_ptr<const MinimalDfa> find(const std::string& key) const
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(key);
        return it == table_.end() ? nullptr : it->second;
    }

    void insert(const std::string& key, std::shared_ptr<const MinimalDfa> d)
    {
        std::lock_guard lock(mutex_);
        table_.insert_or_assign(key, std::move(d));
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return table_.size();
    }

    void clear()
    {
        std::lock_guard lock(mutex_);
        table_.clear();
    }

    /// canonical_signature(d); debug builds also check that no two
    /// structurally different automata seen by this table share a digest.
    std::string signature(const MinimalDfa& d)
    {
        std::string sig = canonical_signature(d);
#ifndef NDEBUG
        std::lock_guard lock(mutex_);
        auto [it, inserted] = seen_.try_emplace(sig, d.canonical_bytes());
        if (!inserted && it->second != d.canonical_bytes()) throw Error("signature collision on " + sig);
#endif
        return sig;
    }

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<const MinimalDfa>> table_;
#ifndef NDEBUG
    std::unordered_map<std::string, std::string> seen_;
#endif
};

/// Key of a leaf: the net up to identifier renaming, plus its markings.
inline std::string leaf_key(const Net& n, const std::vector<Marking>& init, const std::vector<Marking>& fin)
{
    auto render = [](const std::vector<Marking>& ms) {
        std::vector<std::string> s;
        for (const auto& m : ms) s.push_back(m.to_string());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        std::string out;
        for (const auto& x : s) out += x + ",";
        return out;
    };
    return "leaf|" + canonical_form(n).to_string() + "|I:" + render(init) + "|F:" + render(fin);
}

struct NodeStats {
    std::string op;          // "var", "seq" or "tensor"
    std::string name;        // variable name for leaves
    std::size_t depth = 0;
    bool memo_hit = false;
    std::size_t nfa_states = 0; // automaton handed to epsmin; 0 on a hit
    std::size_t dfa_states = 0;
    std::size_t left_width = 0, right_width = 0;
    double millis = 0;
};

struct EvalStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t leaf_misses = 0;
    std::size_t seq_misses = 0;
    std::size_t tensor_misses = 0;
    std::size_t max_nfa_states = 0;
    double millis = 0;
    std::vector<NodeStats> nodes; // post-order
};

struct EvalOptions {
    bool memoise = true;
    /// Largest admissible k + l over all nodes; checked before any work.
    std::optional<std::size_t> max_width;
    /// Called after each node with its statistics and result.
    std::function<void(const NodeStats&, const MinimalDfa&)> on_node;
};

/// Throws WidthGuardError naming the first node (post-order) whose total
/// boundary width exceeds the cap.
inline void check_width_guard(const WiringExpr& t, const Assignments& a, std::size_t cap)
{
    auto rec = [&](auto&& self, const WiringExpr& e) -> std::pair<std::size_t, std::size_t> {
        std::pair<std::size_t, std::size_t> w;
        if (e.is_var()) {
            w = {a.net(e.name()).left_width(), a.net(e.name()).right_width()};
        } else {
            const auto x = self(self, e.left());
            const auto y = self(self, e.right());
            w = e.kind() == WiringExpr::Kind::seq ? std::pair{x.first, y.second}
                                                  : std::pair{x.first + y.first, x.second + y.second};
        }
        const auto [k, l] = w;
        if (k + l > cap) {
            const std::string what = e.is_var() ? "leaf '" + e.name() + "'" : "node " + e.to_string();
            throw WidthGuardError("width guard: " + what + " has boundary " + std::to_string(k) + " -> " +
                                  std::to_string(l) + " (" + std::to_string(k + l) + " > max width " +
                                  std::to_string(cap) + ")");
        }
        return w;
    };
    rec(rec, t);
}

namespace detail {

inline double millis_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline std::shared_ptr<const MinimalDfa> evaluate_rec(const WiringExpr& t, const Assignments& a, MemoTable& memo,
                                                      const EvalOptions& opt, EvalStats& stats, std::size_t depth)
{
    std::shared_ptr<const MinimalDfa> l, r;
    if (!t.is_var()) {
        l = evaluate_rec(t.left(), a, memo, opt, stats, depth + 1);
        r = evaluate_rec(t.right(), a, memo, opt, stats, depth + 1);
    }
    const auto start = std::chrono::steady_clock::now();
    NodeStats ns;
    ns.depth = depth;
    std::string key;
    if (t.is_var()) {
        ns.op = "var";
        ns.name = t.name();
        key = leaf_key(a.net(t.name()), a.initial_of(t.name()), a.final_of(t.name()));
    } else {
        ns.op = t.kind() == WiringExpr::Kind::seq ? "seq" : "tensor";
        key = ns.op + "|" + memo.signature(*l) + "|" + memo.signature(*r);
    }

    std::shared_ptr<const MinimalDfa> result = opt.memoise ? memo.find(key) : nullptr;
    if (result) {
        ns.memo_hit = true;
        ++stats.hits;
    } else {
        BoundedNfa nfa;
        if (t.is_var()) {
            nfa = net_to_nfa(a.net(t.name()), a.initial_of(t.name()), a.final_of(t.name()));
            ++stats.leaf_misses;
        } else if (t.kind() == WiringExpr::Kind::seq) {
            nfa = nfa_seq(l->as_nfa(), r->as_nfa());
            ++stats.seq_misses;
        } else {
            nfa = nfa_tensor(l->as_nfa(), r->as_nfa());
            ++stats.tensor_misses;
        }
        ++stats.misses;
        ns.nfa_states = nfa.size();
        stats.max_nfa_states = std::max(stats.max_nfa_states, nfa.size());
        result = std::make_shared<const MinimalDfa>(epsmin(nfa));
        if (opt.memoise) memo.insert(key, result);
    }
    ns.dfa_states = result->size();
    ns.left_width = result->left_width();
    ns.right_width = result->right_width();
    ns.millis = millis_since(start);
    if (opt.on_node) opt.on_node(ns, *result);
    stats.nodes.push_back(std::move(ns));
    return result;
}

} // namespace detail

/// Post-order evaluation: leaves are translated and minimised, internal nodes
/// compose their children's automata and minimise the product. With memoising
/// on, each distinct leaf and each distinct (operator, child signatures) pair
/// is minimised once per table.
inline MinimalDfa evaluate(const WiringExpr& t, const Assignments& a, MemoTable& memo, const EvalOptions& opt = {},
                           EvalStats* stats = nullptr)
{
    validate_assignments(t, a);
    if (opt.max_width) check_width_guard(t, a, *opt.max_width);
    EvalStats local;
    EvalStats& s = stats ? *stats : local;
    const auto start = std::chrono::steady_clock::now();
    auto d = detail::evaluate_rec(t, a, memo, opt, s, 0);
    s.millis += detail::millis_since(start);
    return *d;
}

inline MinimalDfa evaluate(const WiringExpr& t, const Assignments& a, const EvalOptions& opt = {},
                           EvalStats* stats = nullptr)
{
    MemoTable memo;
    return evaluate(t, a, memo, opt, stats);
}

struct ReachabilityReport {
    bool reachable = false;
    EvalStats stats;
};

/// Whether some final marking is reachable in the closed net denoted by t.
inline ReachabilityReport check_reachability(const WiringExpr& t, const Assignments& a, const EvalOptions& opt = {})
{
    const auto [k, l] = expr_widths(t, a);
    if (k != 0 || l != 0)
        throw WidthMismatch("reachability needs a closed net, got " + std::to_string(k) + " -> " + std::to_string(l));
    ReachabilityReport rep;
    MemoTable memo;
    rep.reachable = is_accepting_verdict(evaluate(t, a, memo, opt, &rep.stats));
    return rep;
}

} // namespace compnet

#endif
