#include "mqtc/tree.hpp"

#include <algorithm>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace mqtc {

bool valid_object_label(const std::string& label) {
  if (label.empty()) return false;
  return label.find_first_of("(),;:") == std::string::npos;
}

LabeledTree::LabeledTree(int n, std::vector<std::pair<NodeId, NodeId>> edges,
                         std::vector<std::string> leaf_labels)
    : n_(n), edges_(std::move(edges)), labels_(std::move(leaf_labels)) {
  for (auto& [u, v] : edges_) {
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());

  const int nodes = std::max(0, 2 * n_ - 2);
  std::vector<int> deg(nodes, 0);
  for (const auto& [u, v] : edges_) {
    if (u >= 0 && u < nodes) ++deg[u];
    if (v >= 0 && v < nodes) ++deg[v];
  }
  adj_offsets_.assign(nodes + 1, 0);
  for (int i = 0; i < nodes; ++i) adj_offsets_[i + 1] = adj_offsets_[i] + deg[i];
  adj_.resize(adj_offsets_[nodes]);
  std::vector<int> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    if (u >= 0 && u < nodes && v >= 0 && v < nodes) {
      adj_[fill[u]++] = v;
      adj_[fill[v]++] = u;
    }
  }
  for (int i = 0; i < nodes; ++i) {
    std::sort(adj_.begin() + adj_offsets_[i], adj_.begin() + adj_offsets_[i + 1]);
  }
}

const std::string& LabeledTree::label_of(NodeId leaf) const {
  return labels_.at(static_cast<std::size_t>(leaf_ordinal(leaf, n_)));
}

std::span<const NodeId> LabeledTree::neighbors(NodeId v) const {
  if (v < 0 || v >= node_count()) return {};
  return {adj_.data() + adj_offsets_[v],
          static_cast<std::size_t>(adj_offsets_[v + 1] - adj_offsets_[v])};
}

std::int64_t CoefficientMatrix::pair_sum() const {
  std::int64_t s = 0;
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b) s += at(a, b);
  return s;
}

ValidationReport validate_tree(const LabeledTree& t) {
  const int n = t.object_count();
  if (n < 4) {
    return {false, "node count: object count " + std::to_string(n) + " is below 4"};
  }
  const int nodes = tree_node_count(n);
  for (const auto& [u, v] : t.edges()) {
    if (u < 0 || u >= nodes || v < 0 || v >= nodes) {
      return {false, "node count: edge endpoint " + std::to_string(u > v ? u : v) +
                         " outside [0, " + std::to_string(nodes - 1) + "]"};
    }
    if (u == v) return {false, "edge count: self-loop at node " + std::to_string(u)};
  }
  for (std::size_t i = 1; i < t.edges().size(); ++i) {
    if (t.edges()[i] == t.edges()[i - 1]) {
      return {false, "edge count: duplicate edge (" + std::to_string(t.edges()[i].first) +
                         ", " + std::to_string(t.edges()[i].second) + ")"};
    }
  }
  if (static_cast<int>(t.edges().size()) != tree_edge_count(n)) {
    return {false, "edge count: " + std::to_string(t.edges().size()) + " edges, expected " +
                       std::to_string(tree_edge_count(n))};
  }

  // 2n-2 nodes with 2n-3 edges: connected iff acyclic.
  std::vector<char> seen(nodes, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : t.neighbors(u)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  if (reached != nodes) {
    return {false, "connectivity: only " + std::to_string(reached) + " of " +
                       std::to_string(nodes) + " nodes reachable"};
  }

  for (NodeId v = 0; v < nodes; ++v) {
    const int d = t.degree(v);
    if (is_internal_node(v, n) && d != 3) {
      return {false, "degree: internal node " + std::to_string(v) + " has degree " +
                         std::to_string(d) + ", expected 3"};
    }
    if (is_leaf_node(v, n) && d != 1) {
      return {false, "degree: leaf node " + std::to_string(v) + " has degree " +
                         std::to_string(d) + ", expected 1"};
    }
  }

  if (static_cast<int>(t.leaf_labels().size()) != n) {
    return {false, "label bijection: " + std::to_string(t.leaf_labels().size()) +
                       " labels for " + std::to_string(n) + " objects"};
  }
  std::unordered_set<std::string> distinct;
  for (const auto& label : t.leaf_labels()) {
    if (!valid_object_label(label)) {
      return {false, "label bijection: invalid label \"" + label + "\""};
    }
    if (!distinct.insert(label).second) {
      return {false, "label bijection: duplicate label \"" + label + "\""};
    }
  }
  return {};
}

CompleteMatrix::CompleteMatrix(int n, std::vector<double> values,
                               std::vector<std::string> leaf_labels)
    : n_(n), a_(std::move(values)), labels_(std::move(leaf_labels)) {
  const std::size_t dim = static_cast<std::size_t>(2 * n - 2);
  if (n < 4 || a_.size() != dim * dim) {
    throw std::invalid_argument("complete matrix: expected a (2n-2)^2 value grid with n >= 4");
  }
  if (labels_.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("complete matrix: expected one label per object");
  }
}

CompleteMatrix to_complete_matrix(const LabeledTree& t, const CoefficientMatrix& coefficients) {
  if (auto report = validate_tree(t); !report.ok) {
    throw std::invalid_argument("to_complete_matrix: invalid tree: " + report.violation);
  }
  const int n = t.object_count();
  if (coefficients.size() != n) {
    throw std::invalid_argument("to_complete_matrix: coefficient matrix size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (coefficients.at(i, i) != 0) {
      throw std::invalid_argument("to_complete_matrix: coefficient diagonal must be zero");
    }
    for (int j = 0; j < n; ++j) {
      if (coefficients.at(i, j) != coefficients.at(j, i) || coefficients.at(i, j) < 0) {
        throw std::invalid_argument(
            "to_complete_matrix: coefficients must be symmetric and non-negative");
      }
    }
  }

  const int dim = 2 * n - 2;
  std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
  for (const auto& [u, v] : t.edges()) {
    a[static_cast<std::size_t>(u) * dim + v] = 1.0;
    a[static_cast<std::size_t>(v) * dim + u] = 1.0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j= 0; j < n; ++j) {
      a[static_cast<std::size_t>(n - 2 + i) * dim + (n - 2 + j)] =
          static_cast<double>(coefficients.at(i, j));
    }
  }
  return CompleteMatrix(n, std::move(a), t.leaf_labels());
}

LabeledTree from_complete_matrix(const CompleteMatrix& m) {
  const int n = m.object_count();
  const int dim = m.dimension();

  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      if (m.at(i, j) != m.at(j, i)) {
        throw std::invalid_argument("from_complete_matrix: matrix is not symmetric");
      }
      if (i == j && m.at(i, i) != 0.0) {
        throw std::invalid_argument("from_complete_matrix: nonzero diagonal entry");
      }
      if (m.at(i, j) < 0.0) {
        throw std::invalid_argument("from_complete_matrix: negative entry");
      }
    }
  }

  // Adjacency is any strictly positive entry in the K and L blocks.
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int i = 0; i < n - 2; ++i) {
    for (int j = i + 1; j < n - 2; ++j) {
      if (m.k(i, j) > 0.0) edges.emplace_back(i, j);
    }
  }
  for (int j = 0; j < n; ++j) {
    int attachments = 0;
    for (int i = 0; i < n - 2; ++i) {
      if (m.l(i, j) > 0.0) {
        edges.emplace_back(i, leaf_node(j, n));
        ++attachments;
      }
    }
    if (attachments != 1) {
      throw std::invalid_argument("from_complete_matrix: leaf column " + std::to_string(j) +
                                  " has " + std::to_string(attachments) +
                                  " attachments, expected exactly 1");
    }
  }

  LabeledTree t(n, std::move(edges), m.leaf_labels());
  if (auto report = validate_tree(t); !report.ok) {
    throw std::invalid_argument("from_complete_matrix: " + report.violation);
  }
  return t;
}

std::vector<NodeId> leaf_path(const LabeledTree& t, NodeId x, NodeId y) {
  const int n = t.object_count();
  if (!is_leaf_node(x, n) || !is_leaf_node(y, n)) {
    throw std::invalid_argument("leaf_path: endpoints must be leaf nodes");
  }
  if (x == y) {
    throw std::invalid_argument("leaf_path: endpoints must be distinct");
  }

  std::vector<NodeId> parent(t.node_count(), -1);
  std::queue<NodeId> q;
  q.push(x);
  parent[x] = x;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    if (u == y) break;
    for (NodeId w : t.neighbors(u)) {
      if (parent[w] == -1) {
        parent[w] = u;
        q.push(w);
      }
    }
  }
  if (parent[y] == -1) {
    throw std::invalid_argument("leaf_path: endpoints are not connected");
  }

  std::vector<NodeId> path;
  for (NodeId v = y; v != x; v = parent[v]) path.push_back(v);
  path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct RenderedSubtree {
  std::string text;
  std::string min_label;
};

RenderedSubtree render_subtree(const LabeledTree& t, NodeId v, NodeId parent) {
  const int n = t.object_count();
  if (is_leaf_node(v, n)) {
    return {t.label_of(v), t.label_of(v)};
  }
  std::vector<RenderedSubtree> children;
  for (NodeId w : t.neighbors(v)) {
    if (w != parent) children.push_back(render_subtree(t, w, v));
  }
  std::sort(children.begin(), children.end(),
            [](const RenderedSubtree& a, const RenderedSubtree& b) {
              return a.min_label < b.min_label;
            });
  std::string text = "(";
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) text += ',';
    text += children[i].text;
  }
  text += ')';
  return {std::move(text), children.front().min_label};
}

}  // namespace

std::string to_newick(const LabeledTree& t) {
  const int n = t.object_count();
  int smallest = 0;
  for (int k = 1; k < n; ++k) {
    if (t.leaf_labels()[k] < t.leaf_labels()[smallest]) smallest = k;
  }
  const NodeId root = t.neighbors(leaf_node(smallest, n)).front();
  return render_subtree(t, root, -1).text + ";";
}

}  // namespace mqtc
