#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mqtc/tree.hpp"

namespace mqtc {

/// Unlabeled structure of a full unrooted binary tree with n leaves:
/// the tree formed by its n-2 internal nodes plus, per internal node, the
/// number of leaves attached (0, 1 or 2; internal degree + slots = 3).
struct TopologyShape {
  int n = 0;
  std::vector<std::pair<int, int>> internal_edges;  // normalized (lo, hi), sorted
  std::vector<int> leaf_slots;                      // size n-2

  friend bool operator==(const TopologyShape&, const TopologyShape&) = default;
};

/// Structural sanity of a shape (internal tree connected, degree+slots == 3,
/// slots sum to n). Used by the generators' tests and assertions.
bool valid_shape(const TopologyShape& s);

/// The single-branch start shape: internal nodes form a path, both path ends
/// carry two leaves, every other internal node carries one.
TopologyShape initial_caterpillar(int n);

/// Isomorphism invariants of the internal adjacency matrix K (unit entries).
/// Isomorphic shapes always compare equal; the converse does not hold, so
/// these only prefilter and canonical_code stays the authority.
struct InvariantSignature {
  std::vector<std::int64_t> char_poly;  // det(xI - K), leading coefficient first
  std::vector<double> spectrum;         // eigenvalues of K, ascending
  std::int64_t determinant = 0;
  std::int64_t trace = 0;
  std::vector<int> leaf_slots_sorted;

  friend bool operator==(const InvariantSignature& a, const InvariantSignature& b);
};

InvariantSignature invariant_signature(const TopologyShape& s);

/// Exact canonical form: two shapes yield equal codes iff they are
/// isomorphic. Rooted canonical encoding taken at the internal tree's
/// center (minimum over the two rootings when the center is an edge),
/// with per-node leaf counts embedded. Deterministic across runs.
std::string canonical_code(const TopologyShape& s);

std::string to_hex(const std::string& bytes);

struct ShapeGenOptions {
  int max_n = 14;  // generation ceiling; larger requests raise ResourceLimitError
};

/// Exactly one representative per isomorphism class of shapes with n leaves,
/// sorted by canonical_code. Grows level-wise from the n=4 base by attaching
/// a new cherry-bearing internal node at each leaf-bearing slot, deduplicating
/// with the invariant prefilter + canonical code authority.
std::vector<TopologyShape> generate_shapes(int n, const ShapeGenOptions& options = {});

/// Deterministic concrete tree for a shape: slot ordinals are assigned in
/// (internal node, slot) order and become leaves (n-2)+0 .. (n-2)+(n-1);
/// labels[k] names the object at slot k.
LabeledTree shape_to_tree(const TopologyShape& s, std::vector<std::string> labels);

}  // namespace mqtc
