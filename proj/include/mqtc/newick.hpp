#pragma once

#include <string>

#include "mqtc/tree.hpp"

namespace mqtc {

/// Parse the Newick dialect to_newick emits: trifurcating root, binary
/// interior groups, bare labels, no branch lengths, ";" terminated.
/// Throws FormatError on anything else.
LabeledTree parse_newick(const std::string& text);

}  // namespace mqtc
