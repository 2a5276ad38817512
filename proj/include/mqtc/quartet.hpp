#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mqtc/tree.hpp"

namespace mqtc {

/// Symmetric n x n dissimilarity matrix with entries in [0, 1].
/// Construction validates and canonicalizes: labels must be distinct and
/// Newick-safe, asymmetry up to 1e-9 is averaged away (anything larger is
/// rejected naming the worst cell), diagonal noise up to 1e-12 is clamped
/// to zero, and every entry must lie in [0, 1].
class DistanceMatrix {
 public:
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> values);

  int size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_;
  std::vector<std::string> labels_;
  std::vector<double> d_;
};

/// One of the three pairings of four distinct objects: {a,b} | {c,d}.
/// Normalized so that a < b, c < d and a < c; with that convention each
/// 4-subset admits exactly the three values ab|cd, ac|bd, ad|bc.
struct QuartetTopology {
  int a, b, c, d;

  static QuartetTopology of(int a, int b, int c, int d);

  friend bool operator==(const QuartetTopology&, const QuartetTopology&) = default;
};

/// Cost of embedding q: D(a,b) + D(c,d).
double quartet_cost(const QuartetTopology& q, const DistanceMatrix& d);

/// The unique topology of the 4-subset `objects` (leaf ordinals of t) whose
/// two within-pair paths in t share no node.
QuartetTopology consistent_topology(const LabeledTree& t, const std::array<int, 4>& objects);

/// coef(a,b) = number of 4-subsets {a,b,c,d} whose consistent topology in t
/// pairs a with b. Computed per pair by summing C(k,2) over the subtrees of
/// size k hanging off the internal nodes of the a-b path, which is O(n^3)
/// overall; the O(n^4) per-quartet tally is kept as the test oracle.
CoefficientMatrix coefficient_matrix(const LabeledTree& t);

/// Tree cost: half the Frobenius inner product of the coefficient matrix
/// with D, i.e. the sum of coef(a,b) * D(a,b) over unordered pairs.
/// Throws std::invalid_argument when the tree's labels do not match D's.
double tree_cost(const LabeledTree& t, const DistanceMatrix& d);

/// Independent cost oracle: sums quartet_cost(consistent_topology(t, s), d)
/// over all C(n,4) subsets s. Deliberately avoids coefficient_matrix.
double tree_cost_bruteforce(const LabeledTree& t, const DistanceMatrix& d);

/// Per-4-subset minimum and maximum topology cost totals. For every tree t,
/// lower <= C(t) <= upper.
struct CostBounds {
  double lower = 0.0;  // sum over 4-subsets of the cheapest topology
  double upper = 0.0;  // sum over 4-subsets of the dearest topology
};

CostBounds cost_bounds(const DistanceMatrix& d);

/// Benefit score (M - cost) / (M - m), clamped to [0, 1]; 1 when M == m.
/// Throws std::invalid_argument when cost lies outside [m, M] by more than
/// 1e-9.
double normalized_score(double cost, double m, double M);

/// Binomial coefficient for the small arguments used throughout.
std::int64_t binomial(std::int64_t n, std::int64_t k);

}  // namespace mqtc
