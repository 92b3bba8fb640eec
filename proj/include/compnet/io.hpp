#ifndef COMPNET_IO_HPP
#define COMPNET_IO_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decomposer.hpp"
#include "error.hpp"
#include "marked_net.hpp"
#include "net.hpp"
#include "wiring.hpp"

namespace compnet::io {

using nlohmann::json;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

inline json parse_json(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
}

namespace detail {

template <typename T>
T field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    return field<T>(j, key, where);
}

inline std::vector<std::size_t> place_indices(const std::map<std::string, std::size_t>& index,
                                              const std::vector<std::string>& ids, const std::string& where)
{
    std::vector<std::size_t> out;
    for (const auto& id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw ValidationError(where + ": unknown place '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

/// The net part of a net document; places keep their flags in `places_json`.
inline Net net_from_json(const json& j, const std::string& where)
{
    const auto left = field<std::size_t>(j, "left", where);
    const auto right = field<std::size_t>(j, "right", where);
    std::vector<std::string> places;
    std::map<std::string, std::size_t> index;
    for (const auto& p : field<json>(j, "places", where)) {
        auto id = field<std::string>(p, "id", where + ": place");
        if (!index.emplace(id, places.size()).second) throw ValidationError(where + ": duplicate place id '" + id + "'");
        places.push_back(std::move(id));
    }
    std::vector<TransitionSpec> ts;
    for (const auto& t : field<json>(j, "transitions", where)) {
        TransitionSpec s;
        s.id = field<std::string>(t, "id", where + ": transition");
        const std::string tw = where + ": transition '" + s.id + "'";
        s.pre = place_indices(index, field_or<std::vector<std::string>>(t, "pre", {}, tw), tw);
        s.post = place_indices(index, field_or<std::vector<std::string>>(t, "post", {}, tw), tw);
        s.source = field_or<std::vector<std::size_t>>(t, "source", {}, tw);
        s.target = field_or<std::vector<std::size_t>>(t, "target_ports", {}, tw);
        ts.push_back(std::move(s));
    }
    Net n(left, right, std::move(places), ts);
    require_valid(n);
    return n;
}

inline json transitions_to_json(const Net& n)
{
    json ts = json::array();
    for (const auto& t : n.transitions()) {
        json source = json::array(), target = json::array();
        for (auto i : t.source.indices()) source.push_back(i);
        for (auto i : t.target.indices()) target.push_back(i);
        ts.push_back({{"id", t.id},
                      {"pre", n.place_ids(t.pre)},
                      {"post", n.place_ids(t.post)},
                      {"source", source},
                      {"target_ports", target}});
    }
    return ts;
}

inline json markings_to_json(const Net& n, const std::vector<Marking>& ms)
{
    json out = json::array();
    for (const auto& m : ms) out.push_back(n.place_ids(m));
    return out;
}

inline std::vector<Marking> markings_from_json(const Net& n, const json& j, const std::string& where)
{
    if (!j.is_array()) throw ParseError(where + ": expected an array of markings");
    std::vector<Marking> out;
    for (const auto& m : j) {
        if (!m.is_array()) throw ParseError(where + ": a marking is an array of place ids");
        out.push_back(n.marking_of(m.get<std::vector<std::string>>()));
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Net files

inline json to_json(const MarkedNet& m)
{
    json places = json::array();
    for (std::size_t i = 0; i < m.net.place_count(); ++i)
        places.push_back({{"id", m.net.places()[i]}, {"initial", m.initial.test(i)}, {"target", to_string(m.targets[i])}});
    return {{"left", m.net.left_width()},
            {"right", m.net.right_width()},
            {"places", places},
            {"transitions", detail::transitions_to_json(m.net)}};
}

inline MarkedNet marked_net_from_json(const json& j, const std::string& where = "net")
{
    MarkedNet m{detail::net_from_json(j, where), {}, {}};
    m.initial = m.net.empty_marking();
    std::size_t i = 0;
    for (const auto& p : j.at("places")) {
        if (detail::field_or<bool>(p, "initial", false, where)) m.initial.set(i);
        m.targets.push_back(parse_place_target(detail::field_or<std::string>(p, "target", "dontcare", where)));
        ++i;
    }
    return m;
}

inline MarkedNet load_net(const std::string& path) { return marked_net_from_json(parse_json(read_file(path), path), path); }

inline void save_net(const std::string& path, const MarkedNet& m) { write_file(path, to_json(m).dump(2)); }

// ---------------------------------------------------------------------------
// Decomposition files

inline json to_json(const WiringExpr& t)
{
    if (t.is_var()) return {{"op", "var"}, {"name", t.name()}};
    return {{"op", t.kind() == WiringExpr::Kind::seq ? "seq" : "tensor"}, {"left", to_json(t.left())}, {"right", to_json(t.right())}};
}

inline WiringExpr expr_from_json(const json& j)
{
    const auto op = detail::field<std::string>(j, "op", "expr");
    if (op == "var") return WiringExpr::var(detail::field<std::string>(j, "name", "expr"));
    if (op != "seq" && op != "tensor") throw ParseError("expr: unknown op '" + op + "'");
    auto l = expr_from_json(detail::field<json>(j, "left", "expr " + op));
    auto r = expr_from_json(detail::field<json>(j, "right", "expr " + op));
    return op == "seq" ? WiringExpr::seq(std::move(l), std::move(r)) : WiringExpr::tensor(std::move(l), std::move(r));
}

/// Decomposition document: the expression and, per variable, its net with
/// explicit initial and final marking sets. Only variables occurring in the
/// expression are written.
inline json to_json(const WiringExpr& t, const Assignments& a)
{
    json leaves = json::object();
    for (const auto& x : t.leaves()) {
        if (leaves.contains(x)) continue;
        const Net& n = a.net(x);
        json places = json::array();
        for (const auto& p : n.places()) places.push_back({{"id", p}});
        leaves[x] = {{"left", n.left_width()},
                     {"right", n.right_width()},
                     {"places", places},
                     {"transitions", detail::transitions_to_json(n)},
                     {"initial_markings", detail::markings_to_json(n, a.initial_of(x))},
                     {"final_markings", detail::markings_to_json(n, a.final_of(x))}};
    }
    return {{"expr", to_json(t)}, {"leaves", leaves}};
}

struct Decomposition {
    WiringExpr expr = WiringExpr::var("x0");
    Assignments assign;
};

/// Leaves may give explicit "initial_markings" / "final_markings"; otherwise
/// the per-place "initial" flags and "target" labels are used.
inline Decomposition decomposition_from_json(const json& j, const std::string& where = "decomposition")
{
    Decomposition d{expr_from_json(detail::field<json>(j, "expr", where)), {}};
    const auto leaves = detail::field<json>(j, "leaves", where);
    if (!leaves.is_object()) throw ParseError(where + ": 'leaves' must be an object");
    for (const auto& [name, leaf] : leaves.items()) {
        const std::string lw = where + ": leaf '" + name + "'";
        MarkedNet m = marked_net_from_json(leaf, lw);
        std::vector<Marking> init = leaf.contains("initial_markings")
                                        ? detail::markings_from_json(m.net, leaf.at("initial_markings"), lw)
                                        : std::vector<Marking>{m.initial};
        std::vector<Marking> fin = leaf.contains("final_markings")
                                       ? detail::markings_from_json(m.net, leaf.at("final_markings"), lw)
                                       : markings_satisfying(m.targets);
        d.assign.assign(name, std::move(m.net), std::move(init), std::move(fin));
    }
    validate_assignments(d.expr, d.assign);
    return d;
}

inline Decomposition load_decomposition(const std::string& path)
{
    return decomposition_from_json(parse_json(read_file(path), path), path);
}

inline void save_decomposition(const std::string& path, const WiringExpr& t, const Assignments& a)
{
    write_file(path, to_json(t, a).dump(2));
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const EvalStats& s)
{
    json nodes = json::array();
    for (const auto& n : s.nodes) {
        json j = {{"op", n.op},
                  {"depth", n.depth},
                  {"memo_hit", n.memo_hit},
                  {"nfa_states", n.nfa_states},
                  {"dfa_states", n.dfa_states},
                  {"left_width", n.left_width},
                  {"right_width", n.right_width},
                  {"millis", n.millis}};
        if (!n.name.empty()) j["name"] = n.name;
        nodes.push_back(std::move(j));
    }
    return {{"memo_hits", s.hits},
            {"memo_misses", s.misses},
            {"leaf_misses", s.leaf_misses},
            {"seq_misses", s.seq_misses},
            {"tensor_misses", s.tensor_misses},
            {"max_nfa_states", s.max_nfa_states},
            {"millis", s.millis},
            {"nodes", nodes}};
}

inline json to_json(const std::vector<DecompositionStep>& report)
{
    json out = json::array();
    for (const auto& s : report) {
        json widths = json::array();
        for (auto [k, l] : s.widths) widths.push_back({k, l});
        json j = {{"kind", s.kind}, {"element", s.element}, {"places", s.places}, {"widths", widths}};
        if (s.balance) j["balance"] = *s.balance;
        if (s.kind != "leaf") {
            j["transition_search"] = {{"candidates", s.transition_search.candidates},
                                      {"visits", s.transition_search.visits}};
            j["place_search"] = {{"candidates", s.place_search.candidates}, {"visits", s.place_search.visits}};
        }
        if (!s.note.empty()) j["note"] = s.note;
        out.push_back(std::move(j));
    }
    return out;
}

} // namespace compnet::io

#endif
