#pragma once

#include <iosfwd>
#include <string>

#include "aomdd/diagram.hpp"

namespace aomdd {

/// Text serialization. Nodes are written children-first in the structural
/// order of reachable_postorder with dense ids (0 and 1 are the
/// terminals), so equal diagrams with identical weights produce identical
/// bytes. Weights use the shortest round-trip decimal.
void write_aomdd(std::ostream& out, const Aomdd& a);
std::string to_text(const Aomdd& a);

/// Loads into a fresh unique table. Throws ParseError on malformed input.
Aomdd read_aomdd(std::istream& in);
Aomdd read_aomdd_text(const std::string& text);

/// Graphviz rendering: meta-nodes as records with one port per value,
/// terminals as squares, weights on arc labels.
void write_dot(std::ostream& out, const Aomdd& a);

}  // namespace aomdd
