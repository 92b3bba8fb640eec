#ifndef COMPNET_DOT_HPP
#define COMPNET_DOT_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dfa.hpp"

namespace compnet {

/// GraphViz rendering of a minimal DFA. Cubes sharing an edge are listed
/// together; '*' marks a don't-care port. The sink is left out unless asked.
inline std::string to_dot(const MinimalDfa& d, const std::string& name = "dfa", bool emit_sink = false)
{
    const auto hidden = [&](StateId s) { return !emit_sink && d.sink() && *d.sink() == s; };
    std::string out = "digraph \"" + name + "\" {\n  rankdir=LR;\n  start [shape=point];\n";
    for (StateId s = 0; s < d.size(); ++s) {
        if (hidden(s)) continue;
        out += "  s" + std::to_string(s) + " [shape=" + (d.is_final(s) ? "doublecircle" : "circle") + ", label=\"" +
               std::to_string(s) + "\"];\n";
    }
    out += "  start -> s0;\n";
    const BoundedNfa& n = d.as_nfa();
    for (StateId s = 0; s < d.size(); ++s) {
        if (hidden(s)) continue;
        std::map<StateId, std::vector<std::string>> edges;
        n.store().for_each_cube(n.delta(s), n.label_bits(), [&](const std::vector<signed char>& p, const StateSet& t) {
            if (!hidden(t.front())) edges[t.front()].push_back(cube_label(p, d.left_width()));
        });
        for (const auto& [t, labels] : edges) {
            std::string l;
            for (const auto& x : labels) l += (l.empty() ? "" : ", ") + x;
            if (labels.size() > 1) l = "{" + l + "}";
            out += "  s" + std::to_string(s) + " -> s" + std::to_string(t) + " [label=\"" + l + "\"];\n";
        }
    }
    return out + "}\n";
}

/// GraphViz rendering of a boundary NFA; initial states get an entry arrow.
inline std::string to_dot(const BoundedNfa& a, const std::string& name = "nfa")
{
    std::string out = "digraph \"" + name + "\" {\n  rankdir=LR;\n";
    for (StateId s = 0; s < a.size(); ++s)
        out += "  s" + std::to_string(s) + " [shape=" + (a.is_final(s) ? "doublecircle" : "circle") + ", label=\"" +
               a.state_name(s) + "\"];\n";
    for (auto s : a.initial()) {
        out += "  start" + std::to_string(s) + " [shape=point];\n";
        out += "  start" + std::to_string(s) + " -> s" + std::to_string(s) + ";\n";
    }
    for (StateId s = 0; s < a.size(); ++s) {
        std::map<StateId, std::vector<std::string>> edges;
        a.store().for_each_cube(a.delta(s), a.label_bits(), [&](const std::vector<signed char>& p, const StateSet& ts) {
            for (auto t : ts) edges[t].push_back(cube_label(p, a.left_width()));
        });
        for (const auto& [t, labels] : edges) {
            std::string l;
            for (const auto& x : labels) l += (l.empty() ? "" : ", ") + x;
            if (labels.size() > 1) l = "{" + l + "}";
            out += "  s" + std::to_string(s) + " -> s" + std::to_string(t) + " [label=\"" + l + "\"];\n";
        }
    }
    return out + "}\n";
}

} // namespace compnet

#endif
