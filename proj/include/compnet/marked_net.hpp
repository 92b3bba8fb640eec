#ifndef COMPNET_MARKED_NET_HPP
#define COMPNET_MARKED_NET_HPP

#include <string>
#include <vector>

#include "error.hpp"
#include "net.hpp"

namespace compnet {

/// Requirement on one place in a target marking.
enum class PlaceTarget { yes, no, dont_care };

inline std::string to_string(PlaceTarget t)
{
    switch (t) {
    case PlaceTarget::yes: return "yes";
    case PlaceTarget::no: return "no";
    default: return "dontcare";
    }
}

inline PlaceTarget parse_place_target(const std::string& s)
{
    if (s == "yes") return PlaceTarget::yes;
    if (s == "no") return PlaceTarget::no;
    if (s == "dontcare") return PlaceTarget::dont_care;
    throw ParseError("unknown place target '" + s + "' (expected yes, no or dontcare)");
}

/// A net with one initial marking and a per-place target requirement.
struct MarkedNet {
    Net net;
    Marking initial;
    std::vector<PlaceTarget> targets;
};

inline bool satisfies(const Marking& m, const std::vector<PlaceTarget>& targets)
{
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == PlaceTarget::yes && !m.test(i)) return false;
        if (targets[i] == PlaceTarget::no && m.test(i)) return false;
    }
    return true;
}

/// Every marking satisfying the targets, in increasing order. Exponential in
/// the number of don't-care places; callers keep that number small.
inline std::vector<Marking> markings_satisfying(const std::vector<PlaceTarget>& targets)
{
    std::vector<Marking> out{Marking(targets.size())};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == PlaceTarget::yes) {
            for (auto& m : out) m.set(i);
        } else if (targets[i] == PlaceTarget::dont_care) {
            const std::size_t n = out.size();
            for (std::size_t j = 0; j < n; ++j) {
                Marking m = out[j];
                m.set(i);
                out.push_back(std::move(m));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline void require_well_formed(const MarkedNet& m)
{
    require_valid(m.net);
    if (m.initial.width() != m.net.place_count())
        throw ValidationError("initial marking has width " + std::to_string(m.initial.width()) + ", expected " +
                              std::to_string(m.net.place_count()));
    if (m.targets.size() != m.net.place_count())
        throw ValidationError("expected " + std::to_string(m.net.place_count()) + " place targets, got " +
                              std::to_string(m.targets.size()));
}

} // namespace compnet

#endif
