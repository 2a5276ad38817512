#pragma once

#include <string>

#include "mqtc/quartet.hpp"

namespace mqtc {

enum class MatrixFormat { kCsv, kPhylip };

/// Parse matrix text. CSV: a header row of comma-separated labels followed
/// by n rows of n comma-separated reals. PHYLIP square: a line holding n,
/// then n rows of "label v1 ... vn", whitespace separated. Validation and
/// canonicalization are DistanceMatrix's (symmetry 1e-9 averaged, diagonal
/// 1e-12 clamped, entries in [0,1], n >= 4, distinct Newick-safe labels).
DistanceMatrix parse_distance_matrix(const std::string& text, MatrixFormat format);

/// Serializers; values printed with 17 significant digits so that
/// parse(write(parse(x))) == parse(x) exactly.
std::string write_csv(const DistanceMatrix& d);
std::string write_phylip(const DistanceMatrix& d);

/// SHA-256 over the canonicalized matrix: labels sorted, rows/columns
/// reordered to match, values at 17 significant digits.
std::string input_digest(const DistanceMatrix& d);

}  // namespace mqtc
