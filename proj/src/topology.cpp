#include "mqtc/topology.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mqtc/errors.hpp"

namespace mqtc {

namespace {

std::vector<std::vector<int>> internal_adjacency(const TopologyShape& s) {
  const int k = s.n - 2;
  std::vector<std::vector<int>> adj(k);
  for (const auto& [u, v] : s.internal_edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

}  // namespace

bool valid_shape(const TopologyShape& s) {
  const int k = s.n - 2;
  if (s.n < 4 || static_cast<int>(s.leaf_slots.size()) != k) return false;
  if (static_cast<int>(s.internal_edges.size()) != k - 1) return false;
  for (const auto& [u, v] : s.internal_edges) {
    if (u < 0 || v < 0 || u >= k || v >= k || u == v) return false;
  }
  const auto adj = internal_adjacency(s);
  for (int v = 0; v < k; ++v) {
    if (std::adjacent_find(adj[v].begin(), adj[v].end()) != adj[v].end()) return false;
    if (s.leaf_slots[v] < 0 || s.leaf_slots[v] > 2) return false;
    if (static_cast<int>(adj[v].size()) + s.leaf_slots[v] != 3) return false;
  }
  int slots = 0;
  for (int c : s.leaf_slots) slots += c;
  if (slots != s.n) return false;

  // k nodes, k-1 edges: connected iff a tree.
  std::vector<char> seen(k, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == k;
}

TopologyShape initial_caterpillar(int n) {
  if (n < 4) {
    throw std::invalid_argument("initial_caterpillar: n must be at least 4");
  }
  TopologyShape s;
  s.n = n;
  const int k = n - 2;
  for (int i = 0; i + 1 < k; ++i) s.internal_edges.emplace_back(i, i + 1);
  s.leaf_slots.assign(k, 1);
  s.leaf_slots.front() = 2;
  s.leaf_slots.back() = 2;
  return s;
}

bool operator==(const InvariantSignature& a, const InvariantSignature& b) {
  constexpr double kSpectrumTolerance = 1e-9;
  if (a.char_poly != b.char_poly || a.determinant != b.determinant || a.trace != b.trace ||
      a.leaf_slots_sorted != b.leaf_slots_sorted) {
    return false;
  }
  if (a.spectrum.size() != b.spectrum.size()) return false;
  for (std::size_t i = 0; i < a.spectrum.size(); ++i) {
    if (std::abs(a.spectrum[i] - b.spectrum[i]) > kSpectrumTolerance) return false;
  }
  return true;
}

namespace {

// Characteristic polynomial of an integer matrix by Faddeev-LeVerrier.
// The divisions are exact for integer input; intermediate values for the
// sizes in play here stay far below the int64 range.
std::vector<std::int64_t> char_poly_int(const std::vector<std::int64_t>& a, int k) {
  std::vector<std::int64_t> coef(k + 1, 0);
  coef[0] = 1;
  std::vector<std::int64_t> m(static_cast<std::size_t>(k) * k, 0);
  std::vector<std::int64_t> am(m.size());
  for (int step = 1; step <= k; ++step) {
    for (int i = 0; i < k; ++i) m[static_cast<std::size_t>(i) * k + i] += coef[step - 1];
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        std::int64_t sum = 0;
        for (int l = 0; l < k; ++l) {
          sum += a[static_cast<std::size_t>(i) * k + l] * m[static_cast<std::size_t>(l) * k + j];
        }
        am[static_cast<std::size_t>(i) * k + j] = sum;
      }
    }
    std::int64_t tr = 0;
    for (int i = 0; i < k; ++i) tr += am[static_cast<std::size_t>(i) * k + i];
    coef[step] = -tr / step;
    m = am;
  }
  return coef;
}

}  // namespace

InvariantSignature invariant_signature(const TopologyShape& s) {
  const int k = s.n - 2;
  std::vector<std::int64_t> a(static_cast<std::size_t>(k) * k, 0);
  Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [u, v] : s.internal_edges) {
    a[static_cast<std::size_t>(u) * k + v] = 1;
    a[static_cast<std::size_t>(v) * k + u] = 1;
    ad(u, v) = 1.0;
    ad(v, u) = 1.0;
  }

  InvariantSignature sig;
  sig.char_poly = char_poly_int(a, k);
  sig.determinant = (k % 2 == 0 ? 1 : -1) * sig.char_poly[k];
  sig.trace = 0;  // adjacency matrices have a zero diagonal

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ad, Eigen::EigenvaluesOnly);
  sig.spectrum.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);

  sig.leaf_slots_sorted = s.leaf_slots;
  std::sort(sig.leaf_slots_sorted.begin(), sig.leaf_slots_sorted.end());
  return sig;
}

namespace {

std::string rooted_code(const std::vector<std::vector<int>>& adj,
                        const std::vector<int>& slots, int v, int parent) {
  std::vector<std::string> children;
  for (int w : adj[v]) {
    if (w != parent) children.push_back(rooted_code(adj, slots, w, v));
  }
  std::sort(children.begin(), children.end());
  std::string code;
  code += static_cast<char>('0' + slots[v]);
  code += '(';
  for (const auto& c : children) code += c;
  code += ')';
  return code;
}

// Center of the internal tree: one node, or two adjacent nodes.
std::vector<int> tree_center(const std::vector<std::vector<int>>& adj) {
  const int k = static_cast<int>(adj.size());
  if (k == 1) return {0};
  std::vector<int> degree(k), layer, next;
  int remaining = k;
  for (int v = 0; v < k; ++v) {
    degree[v] = static_cast<int>(adj[v].size());
    if (degree[v] <= 1) layer.push_back(v);
  }
  while (remaining > 2) {
    remaining -= static_cast<int>(layer.size());
    next.clear();
    for (int v : layer) {
      for (int w : adj[v]) {
        if (--degree[w] == 1) next.push_back(w);
      }
    }
    layer.swap(next);
  }
  std::sort(layer.begin(), layer.end());
  return layer;
}

}  // namespace

std::string canonical_code(const TopologyShape& s) {
  const auto adj = internal_adjacency(s);
  std::string best;
  for (int root : tree_center(adj)) {
    std::string code = rooted_code(adj, s.leaf_slots, root, -1);
    if (best.empty() || code < best) best = std::move(code);
  }
  return best;
}

std::string to_hex(const std::string& bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xF];
  }
  return out;
}

std::vector<TopologyShape> generate_shapes(int n, const ShapeGenOptions& options) {
  if (n < 4) {
    throw std::invalid_argument("generate_shapes: n must be at least 4");
  }
  if (n > options.max_n) {
    throw ResourceLimitError("generate_shapes: n = " + std::to_string(n) +
                             " exceeds the configured ceiling " +
                             std::to_string(options.max_n));
  }

  // Dedup per level: invariant signature buckets prefilter, canonical code
  // decides. Keyed maps keep the result order independent of insertion order.
  std::vector<TopologyShape> level{initial_caterpillar(4)};
  for (int leaves = 5; leaves <= n; ++leaves) {
    std::map<std::string, std::map<std::string, TopologyShape>> buckets;
    for (const auto& shape : level) {
      const int k = shape.n - 2;
      for (int v = 0; v < k; ++v) {
        if (shape.leaf_slots[v] == 0) continue;
        // Subdivide one leaf slot of v: the new internal node takes that
        // leaf plus a fresh one, forming a cherry.
        TopologyShape grown;
        grown.n = shape.n + 1;
        grown.internal_edges = shape.internal_edges;
        grown.internal_edges.emplace_back(v, k);
        std::sort(grown.internal_edges.begin(), grown.internal_edges.end());
        grown.leaf_slots = shape.leaf_slots;
        grown.leaf_slots[v] -= 1;
        grown.leaf_slots.push_back(2);

        const auto sig = invariant_signature(grown);
        std::string sig_key;
        for (auto c : sig.char_poly) sig_key += std::to_string(c) + ",";
        sig_key += "|";
        for (int c : sig.leaf_slots_sorted) sig_key += static_cast<char>('0' + c);
        buckets[sig_key].emplace(canonical_code(grown), std::move(grown));
      }
    }
    level.clear();
    std::map<std::string, TopologyShape> ordered;
    for (auto& [key, bucket] : buckets) {
      for (auto& [code, shape] : bucket) ordered.emplace(code, std::move(shape));
    }
    for (auto& [code, shape] : ordered) level.push_back(std::move(shape));
  }
  return level;
}

LabeledTree shape_to_tree(const TopologyShape& s, std::vector<std::string> labels) {
  if (!valid_shape(s)) {
    throw std::invalid_argument("shape_to_tree: malformed shape");
  }
  if (static_cast<int>(labels.size()) != s.n) {
    throw std::invalid_argument("shape_to_tree: expected one label per leaf slot");
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(tree_edge_count(s.n));
  for (const auto& [u, v] : s.internal_edges) edges.emplace_back(u, v);
  int slot = 0;
  for (int v = 0; v < s.n - 2; ++v) {
    for (int c = 0; c < s.leaf_slots[v]; ++c) {
      edges.emplace_back(v, leaf_node(slot++, s.n));
    }
  }
  return LabeledTree(s.n, std::move(edges), std::move(labels));
}

}  // namespace mqtc
