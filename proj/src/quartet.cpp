#include "mqtc/quartet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "mqtc/errors.hpp"

namespace mqtc {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kDiagonalTolerance = 1e-12;

std::string cell_name(const std::vector<std::string>& labels, int i, int j) {
  return "D(" + labels[i] + "," + labels[j] + ")";
}

}  // namespace

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> values)
    : n_(static_cast<int>(labels.size())), labels_(std::move(labels)), d_(std::move(values)) {
  if (n_ < 4) {
    throw FormatError("distance matrix: " + std::to_string(n_) +
                      " objects, at least 4 are required");
  }
  if (d_.size() != static_cast<std::size_t>(n_) * n_) {
    throw FormatError("distance matrix: expected " + std::to_string(n_) + "x" +
                      std::to_string(n_) + " values");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (!valid_object_label(label)) {
      throw FormatError("distance matrix: invalid object label \"" + label +
                        "\" (labels are non-empty and free of \"(),;:\")");
    }
    if (!seen.insert(label).second) {
      throw FormatError("distance matrix: duplicate object label \"" + label + "\"");
    }
  }

  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double v = d_[static_cast<std::size_t>(i) * n_ + j];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw FormatError("distance matrix: entry " + cell_name(labels_, i, j) + " = " +
                          std::to_string(v) + " outside [0, 1]");
      }
    }
  }

  int wi = 0, wj = 0;
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const double gap = std::abs(at(i, j) - at(j, i));
      if (gap > worst) {
        worst = gap;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > kSymmetryTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "asymmetry %.3g between %s=%.17g and %s=%.17g", worst,
                  cell_name(labels_, wi, wj).c_str(), at(wi, wj),
                  cell_name(labels_, wj, wi).c_str(), at(wj, wi));
    throw FormatError(std::string("distance matrix: ") + buf);
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const double avg = 0.5 * (at(i, j) + at(j, i));
      d_[static_cast<std::size_t>(i) * n_ + j] = avg;
      d_[static_cast<std::size_t>(j) * n_ + i] = avg;
    }
    const double diag = at(i, i);
    if (std::abs(diag) > kDiagonalTolerance) {
      throw FormatError("distance matrix: diagonal entry " + cell_name(labels_, i, i) + " = " +
                        std::to_string(diag) + " is not zero");
    }
    d_[static_cast<std::size_t>(i) * n_ + i] = 0.0;
  }
}

QuartetTopology QuartetTopology::of(int a, int b, int c, int d) {
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  if (a > c) {
    std::swap(a, c);
    std::swap(b, d);
  }
  if (a == b || a == c || a == d || b == c || b == d || c == d) {
    throw std::invalid_argument("quartet topology: objects must be distinct");
  }
  return {a, b, c, d};
}

double quartet_cost(const QuartetTopology& q, const DistanceMatrix& d) {
  const int n = d.size();
  for (int idx : {q.a, q.b, q.c, q.d}) {
    if (idx < 0 || idx >= n) {
      throw std::invalid_argument("quartet_cost: object index " + std::to_string(idx) +
                                  " out of range");
    }
  }
  return d.at(q.a, q.b) + d.at(q.c, q.d);
}

namespace {

// Marks path nodes of x..y in `mark` with `stamp`; returns false if any was
// already marked with the same stamp (i.e. the paths intersect).
bool path_disjoint_from_marks(const LabeledTree& t, NodeId x, NodeId y,
                              std::vector<int>& mark, int stamp) {
  for (NodeId v : leaf_path(t, x, y)) {
    if (mark[v] == stamp) return false;
  }
  return true;
}

}  // namespace

QuartetTopology consistent_topology(const LabeledTree& t, const std::array<int, 4>& objects) {
  const int n = t.object_count();
  for (int k : objects) {
    if (k < 0 || k >= n) {
      throw std::invalid_argument("consistent_topology: object ordinal out of range");
    }
  }

  const std::array<std::array<int, 4>, 3> pairings = {{
      {objects[0], objects[1], objects[2], objects[3]},
      {objects[0], objects[2], objects[1], objects[3]},
      {objects[0], objects[3], objects[1], objects[2]},
  }};

  std::vector<int> mark(t.node_count(), -1);
  for (int p = 0; p < 3; ++p) {
    const auto& [a, b, c, d] = pairings[p];
    for (NodeId v : leaf_path(t, leaf_node(a, n), leaf_node(b, n))) mark[v] = p;
    if (path_disjoint_from_marks(t, leaf_node(c, n), leaf_node(d, n), mark, p)) {
      return QuartetTopology::of(a, b, c, d);
    }
  }
  throw std::logic_error("consistent_topology: no consistent pairing; tree is malformed");
}

namespace {

// Leaves on the far side of each directed edge, computed from a rooted
// orientation: down[v] = leaves in v's subtree when rooted at internal 0.
struct LeafSideCounts {
  std::vector<int> down;
  std::vector<NodeId> parent;
  int total;

  int toward(NodeId from, NodeId to) const {
    return parent[to] == from ? down[to] : total - down[from];
  }
};

LeafSideCounts leaf_side_counts(const LabeledTree& t) {
  const int n = t.object_count();
  const int nodes = t.node_count();
  LeafSideCounts r{std::vector<int>(nodes, 0), std::vector<NodeId>(nodes, -1), n};

  std::vector<NodeId> order;
  order.reserve(nodes);
  order.push_back(0);
  r.parent[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (NodeId w : t.neighbors(order[i])) {
      if (r.parent[w] == -1) {
        r.parent[w] = order[i];
        order.push_back(w);
      }
    }
  }
  r.parent[0] = -1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId v = *it;
    if (is_leaf_node(v, n)) r.down[v] = 1;
    if (r.parent[v] >= 0) r.down[r.parent[v]] += r.down[v];
  }
  return r;
}

}  // namespace

CoefficientMatrix coefficient_matrix(const LabeledTree& t) {
  if (auto report = validate_tree(t); !report.ok) {
    throw std::invalid_argument("coefficient_matrix: invalid tree: " + report.violation);
  }
  const int n = t.object_count();
  const auto sides = leaf_side_counts(t);
  CoefficientMatrix coef(n);

  std::vector<NodeId> parent(t.node_count());
  for (int a = 0; a < n; ++a) {
    // One BFS from leaf a serves all partners b > a.
    std::fill(parent.begin(), parent.end(), -1);
    const NodeId la = leaf_node(a, n);
    parent[la] = la;
    std::vector<NodeId> queue{la};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (NodeId w : t.neighbors(queue[i])) {
        if (parent[w] == -1) {
          parent[w] = queue[i];
          queue.push_back(w);
        }
      }
    }

    for (int b = a + 1; b < n; ++b) {
      const NodeId lb = leaf_node(b, n);
      std::int64_t sum = 0;
      NodeId next = lb;
      for (NodeId v = parent[lb]; v != la; v = parent[v]) {
        // v is an internal path node; exactly one neighbor leaves the path.
        for (NodeId w : t.neighbors(v)) {
          if (w != next && w != parent[v]) {
            sum += binomial(sides.toward(v, w), 2);
          }
        }
        next = v;
      }
      coef.at(a, b) = sum;
      coef.at(b, a) = sum;
    }
  }
  return coef;
}

namespace {

// Leaf ordinal of t -> row of d, matched by label.
std::vector<int> label_map(const LabeledTree& t, const DistanceMatrix& d) {
  const int n = t.object_count();
  if (n != d.size()) {
    throw std::invalid_argument("tree/distance label mismatch: object counts differ");
  }
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < n; ++i) index.emplace(d.labels()[i], i);
  std::vector<int> map(n);
  for (int k = 0; k < n; ++k) {
    auto it = index.find(t.leaf_labels()[k]);
    if (it == index.end()) {
      throw std::invalid_argument("tree/distance label mismatch: tree label \"" +
                                  t.leaf_labels()[k] + "\" not present in the matrix");
    }
    map[k] = it->second;
  }
  return map;
}

}  // namespace

double tree_cost(const LabeledTree& t, const DistanceMatrix& d) {
  const auto map = label_map(t, d);
  const auto coef = coefficient_matrix(t);
  const int n = t.object_count();
  double cost = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coef.at(a, b) != 0) {
        cost += static_cast<double>(coef.at(a, b)) * d.at(map[a], map[b]);
      }
    }
  }
  return cost;
}

double tree_cost_bruteforce(const LabeledTree& t, const DistanceMatrix& d) {
  const auto map = label_map(t, d);
  const int n = t.object_count();
  double cost = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const QuartetTopology q = consistent_topology(t, {i, j, k, l});
          cost += d.at(map[q.a], map[q.b]) + d.at(map[q.c], map[q.d]);
        }
  return cost;
}

CostBounds cost_bounds(const DistanceMatrix& d) {
  const int n = d.size();
  CostBounds b;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const double c1 = d.at(i, j) + d.at(k, l);
          const double c2 = d.at(i, k) + d.at(j, l);
          const double c3 = d.at(i, l) + d.at(j, k);
          b.lower += std::min(c1, std::min(c2, c3));
          b.upper += std::max(c1, std::max(c2, c3));
        }
  return b;
}

double normalized_score(double cost, double m, double M) {
  constexpr double kSlack = 1e-9;
  if (!(m <= M)) {
    throw std::invalid_argument("normalized_score: bounds are inverted");
  }
  if (cost < m - kSlack || cost > M + kSlack) {
    throw std::invalid_argument("normalized_score: cost " + std::to_string(cost) +
                                " outside [" + std::to_string(m) + ", " + std::to_string(M) +
                                "]");
  }
  if (M == m) return 1.0;
  return std::clamp((M - cost) / (M - m), 0.0, 1.0);
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

}  // namespace mqtc
