#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crnerg/network.hpp"

namespace crnerg {

/// 1-based position of a construct in the source text.
struct SourceLocation {
    std::size_t line = 0;
    std::size_t column = 0;
};

/// A parsed `.crn` document: the network plus where each piece came from.
struct NetworkDocument {
    std::string source;
    ReactionNetwork network;
    std::vector<SourceLocation> species_locations;
    std::vector<SourceLocation> param_locations;
    std::vector<SourceLocation> reaction_locations;
};

/// Grammar (line oriented, `#` starts a comment):
///
///     species: A, B, C            (commas optional; repeatable)
///     param k = 1.5
///     param g in [0.5, 2]
///     param r free             (or `param r = free`)
///     reaction: A + B -> 2 C @ k  (`0` or `∅` is the empty complex)
///
/// Throws ParseError (with location) on any malformed line.
NetworkDocument parse_document(std::string text);

ReactionNetwork parse_network(std::string_view text);

/// Canonical text form; parse_network(serialize_network(n)) == n.
std::string serialize_network(const ReactionNetwork& net);

/// Reads a file, or standard input when `path` is "-".
std::string read_source(const std::string& path);

}  // namespace crnerg
