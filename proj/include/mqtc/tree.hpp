#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mqtc {

/// Node index inside a tree over n objects. A full unrooted binary tree with
/// n leaves has 2n-2 nodes; indices [0, n-3] are internal nodes and
/// [n-2, 2n-3] are leaves. The partition is fixed by the index range.
using NodeId = std::int32_t;

inline int internal_node_count(int n) { return n - 2; }
inline int tree_node_count(int n) { return 2 * n - 2; }
inline int tree_edge_count(int n) { return 2 * n - 3; }
inline bool is_internal_node(NodeId v, int n) { return v >= 0 && v < n - 2; }
inline bool is_leaf_node(NodeId v, int n) { return v >= n - 2 && v < 2 * n - 2; }

/// Leaf node carrying object `k` (k in [0, n)).
inline NodeId leaf_node(int k, int n) { return static_cast<NodeId>(n - 2 + k); }
/// Object ordinal of a leaf node.
inline int leaf_ordinal(NodeId v, int n) { return static_cast<int>(v) - (n - 2); }

/// Object labels are non-empty UTF-8 strings without any of ( ) , ; :
/// so that Newick output needs no quoting.
bool valid_object_label(const std::string& label);

/// A full unrooted binary tree with the n objects assigned to its leaves.
/// The class is a plain immutable holder; structural invariants are checked
/// by validate_tree, not by the constructor, so that broken instances can be
/// built and diagnosed in one place.
class LabeledTree {
 public:
  /// `leaf_labels[k]` names the object at leaf node (n-2)+k.
  LabeledTree(int n, std::vector<std::pair<NodeId, NodeId>> edges,
              std::vector<std::string> leaf_labels);

  int object_count() const { return n_; }
  int node_count() const { return 2 * n_ - 2; }

  /// Edges normalized to (lo, hi) and sorted.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

  const std::vector<std::string>& leaf_labels() const { return labels_; }
  const std::string& label_of(NodeId leaf) const;

  /// Sorted neighbor list; empty span for out-of-range ids.
  std::span<const NodeId> neighbors(NodeId v) const;
  int degree(NodeId v) const { return static_cast<int>(neighbors(v).size()); }

 private:
  int n_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::string> labels_;
  // CSR adjacency over all 2n-2 nodes.
  std::vector<std::int32_t> adj_offsets_;
  std::vector<NodeId> adj_;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;  // empty when ok; otherwise the first violated invariant

  explicit operator bool() const { return ok; }
};

/// Checks, in order: node count, edge count, connectivity, degrees
/// (internal nodes 3, leaves 1), label bijection.
ValidationReport validate_tree(const LabeledTree& t);

/// n x n integer matrix of quartet multiplicities coef(a,b): the number of
/// 4-subsets whose topology embedded in a tree pairs objects a and b.
class CoefficientMatrix {
 public:
  explicit CoefficientMatrix(int n) : n_(n), v_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  std::int64_t& at(int i, int j) { return v_[static_cast<std::size_t>(i) * n_ + j]; }
  std::int64_t at(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }

  /// Sum over unordered pairs a < b.
  std::int64_t pair_sum() const;

 private:
  int n_;
  std::vector<std::int64_t> v_;
};

/// The (2n-2) x (2n-2) complete pseudo-adjacency matrix of a labeled tree,
/// partitioned into blocks
///
///     [ K  L  ]   K: internal-internal adjacency, (n-2) x (n-2)
///     [ L' C  ]   L: internal-leaf adjacency,     (n-2) x n
///                 C: quartet coefficients,         n x n
///
/// Adjacency entries are 1; C holds the coefficients supplied at
/// construction. Leaf labels ride along so the tree can be reconstructed.
class CompleteMatrix {
 public:
  CompleteMatrix(int n, std::vector<double> values, std::vector<std::string> leaf_labels);

  int object_count() const { return n_; }
  int dimension() const { return 2 * n_ - 2; }

  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dimension() + j]; }

  // Block views. k/l indices are internal ordinals, c indices leaf ordinals.
  double k(int i, int j) const { return at(i, j); }
  double l(int i, int j) const { return at(i, n_ - 2 + j); }
  double lt(int i, int j) const { return at(n_ - 2 + i, j); }
  double c(int i, int j) const { return at(n_ - 2 + i, n_ - 2 + j); }

  const std::vector<std::string>& leaf_labels() const { return labels_; }

 private:
  int n_;
  std::vector<double> a_;
  std::vector<std::string> labels_;
};

/// Encode a valid tree and its coefficient matrix as a CompleteMatrix.
/// Throws std::invalid_argument on an invalid tree or ill-formed coefficients.
CompleteMatrix to_complete_matrix(const LabeledTree& t, const CoefficientMatrix& coefficients);

/// Reconstruct the unique tree whose adjacency matches the K and L blocks.
/// Throws std::invalid_argument when the blocks violate the structural
/// invariants (degrees, one attachment per leaf, connectivity).
LabeledTree from_complete_matrix(const CompleteMatrix& a);

/// The unique simple path between two distinct leaves, endpoints included.
std::vector<NodeId> leaf_path(const LabeledTree& t, NodeId x, NodeId y);

/// Deterministic Newick text: rooted at the internal node adjacent to the
/// lexicographically smallest label, trifurcating root, children ordered by
/// smallest descendant label, no branch lengths, terminated by ";".
std::string to_newick(const LabeledTree& t);

}  // namespace mqtc
