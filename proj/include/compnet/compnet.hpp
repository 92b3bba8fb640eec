#ifndef COMPNET_COMPNET_HPP
#define COMPNET_COMPNET_HPP

#include "bitset.hpp"
#include "decomposer.hpp"
#include "dfa.hpp"
#include "dot.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "io.hpp"
#include "label_diagram.hpp"
#include "marked_net.hpp"
#include "net.hpp"
#include "nfa.hpp"
#include "oracle.hpp"
#include "wiring.hpp"

namespace compnet {

inline constexpr const char* version = "0.1.0";

} // namespace compnet

#endif
