#include "mqtc/hill.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mqtc {

namespace {

// Hill moves are easiest on a scratch graph where ids survive a deletion:
// "work ids" put the leaves at 0..n-1 (object ordinals) and internals at
// n..2n-3. Trees travel back to LabeledTree form through a BFS renumbering
// of the internals, which keeps every produced tree deterministic.
using WorkEdge = std::pair<int, int>;

int to_work_id(NodeId v, int n) { return is_internal_node(v, n) ? v + n : leaf_ordinal(v, n); }

std::vector<WorkEdge> work_edges(const LabeledTree& t) {
  const int n = t.object_count();
  std::vector<WorkEdge> edges;
  edges.reserve(t.edges().size());
  for (const auto& [u, v] : t.edges()) {
    edges.emplace_back(to_work_id(u, n), to_work_id(v, n));
  }
  return edges;
}

LabeledTree from_work_edges(int n, const std::vector<WorkEdge>& edges,
                            std::vector<std::string> labels) {
  // Sorted adjacency over work ids (internals may be any ids >= n).
  int max_id = 0;
  for (const auto& [u, v] : edges) max_id = std::max({max_id, u, v});
  std::vector<std::vector<int>> adj(max_id + 1);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());

  // Internals renumbered 0.. in BFS order from leaf 0's neighbor.
  std::vector<int> internal_no(max_id + 1, -1);
  std::vector<int> queue{adj[0].front()};
  internal_no[queue[0]] = 0;
  int next = 1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (int w : adj[queue[i]]) {
      if (w >= n && internal_no[w] == -1) {
        internal_no[w] = next++;
        queue.push_back(w);
      }
    }
  }

  auto renumber = [&](int id) -> NodeId {
    return id < n ? leaf_node(id, n) : static_cast<NodeId>(internal_no[id]);
  };
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edges.size());
  for (const auto& [u, v] : edges) out.emplace_back(renumber(u), renumber(v));
  return LabeledTree(n, std::move(out), std::move(labels));
}

// Detach leaf x, smooth its internal node away, and return the reduced edge
// list together with the merged edge (reinserting there would rebuild t).
struct ReducedTree {
  std::vector<WorkEdge> edges;
  WorkEdge merged;
  int freed_internal;
};

ReducedTree detach_leaf(const std::vector<WorkEdge>& edges, int n, int leaf) {
  int hub = -1;
  for (const auto& [u, v] : edges) {
    if (u == leaf) hub = v;
    if (v == leaf) hub = u;
  }
  int p = -1, q = -1;
  ReducedTree r;
  r.freed_internal = hub;
  for (const auto& [u, v] : edges) {
    if (u == leaf || v == leaf) continue;
    if (u == hub || v == hub) {
      const int other = (u == hub) ? v : u;
      (p < 0 ? p : q) = other;
      continue;
    }
    r.edges.emplace_back(u, v);
  }
  r.merged = {std::min(p, q), std::max(p, q)};
  r.edges.push_back(r.merged);
  for (auto& [u, v] : r.edges) {
    if (u > v) std::swap(u, v);
  }
  std::sort(r.edges.begin(), r.edges.end());
  return r;
}

LabeledTree reattach(const ReducedTree& r, int n, int leaf, const WorkEdge& target,
                     const std::vector<std::string>& labels) {
  std::vector<WorkEdge> edges;
  edges.reserve(r.edges.size() + 2);
  for (const auto& e : r.edges) {
    if (e != target) edges.push_back(e);
  }
  const int w = r.freed_internal;
  edges.emplace_back(target.first, w);
  edges.emplace_back(w, target.second);
  edges.emplace_back(w, leaf);
  return from_work_edges(n, edges, labels);
}

bool same_cherry(const LabeledTree& t, int i, int j) {
  const int n = t.object_count();
  return t.neighbors(leaf_node(i, n)).front() == t.neighbors(leaf_node(j, n)).front();
}

// Streams moves in scan order; stops when visit returns false.
void scan_neighbors(const LabeledTree& t, SearchConfig::Neighborhood kind,
                    const std::function<bool(const LabeledTree&)>& visit) {
  const int n = t.object_count();
  const bool swaps = kind != SearchConfig::Neighborhood::kSubtreeMove;
  const bool moves = kind != SearchConfig::Neighborhood::kLeafSwap;

  if (swaps) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (same_cherry(t, i, j)) continue;
        std::vector<std::string> labels = t.leaf_labels();
        std::swap(labels[i], labels[j]);
        if (!visit(LabeledTree(n, t.edges(), std::move(labels)))) return;
      }
    }
  }
  if (moves) {
    const auto edges = work_edges(t);
    for (int leaf = 0; leaf < n; ++leaf) {
      const ReducedTree reduced = detach_leaf(edges, n, leaf);
      for (const WorkEdge& target : reduced.edges) {
        if (target == reduced.merged) continue;  // would rebuild t
        if (!visit(reattach(reduced, n, leaf, target, t.leaf_labels()))) return;
      }
    }
  }
}

}  // namespace

LabeledTree random_tree(int n, const std::vector<std::string>& labels, SplitMix64& rng) {
  if (n < 4) {
    throw std::invalid_argument("random_tree: n must be at least 4");
  }
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("random_tree: expected one label per object");
  }
  std::vector<WorkEdge> edges{{0, n}, {1, n}, {2, n}};
  int next_internal = n + 1;
  for (int k = 3; k < n; ++k) {
    const std::size_t pick = rng.next_below(edges.size());
    const auto [a, b] = edges[pick];
    const int w = next_internal++;
    edges[pick] = {a, w};
    edges.emplace_back(w, b);
    edges.emplace_back(w, k);
  }
  return from_work_edges(n, edges, labels);
}

std::vector<LabeledTree> neighbors(const LabeledTree& t) {
  std::vector<LabeledTree> out;
  scan_neighbors(t, SearchConfig::Neighborhood::kBoth, [&](const LabeledTree& nb) {
    out.push_back(nb);
    return true;
  });
  return out;
}

namespace {

struct RestartOutcome {
  double cost;
  std::string newick;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::string> labels;
  std::uint64_t evaluations;
};

RestartOutcome run_restart(const DistanceMatrix& d, const SearchConfig& cfg, int restart,
                           const TrajectoryObserver& observer) {
  SplitMix64 rng = SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(restart));
  LabeledTree current = random_tree(d.size(), d.labels(), rng);
  double cost = tree_cost(current, d);
  std::uint64_t evaluations = 1;
  if (observer) observer(restart, 0, cost);

  for (int step = 1; step <= cfg.max_steps_per_restart; ++step) {
    std::optional<LabeledTree> improved;
    double improved_cost = cost;
    scan_neighbors(current, cfg.neighborhood, [&](const LabeledTree& nb) {
      ++evaluations;
      const double nb_cost = tree_cost(nb, d);
      if (nb_cost < cost) {
        improved = nb;
        improved_cost = nb_cost;
        return false;  // first improvement wins
      }
      return true;
    });
    if (!improved) break;
    current = std::move(*improved);
    cost = improved_cost;
    if (observer) observer(restart, step, cost);
  }
  return {cost, to_newick(current), current.edges(), current.leaf_labels(), evaluations};
}

SolverResult reduce_restarts(const DistanceMatrix& d, std::vector<RestartOutcome> outcomes,
                             std::chrono::steady_clock::time_point start) {
  std::size_t best = 0;
  std::uint64_t evaluations = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    evaluations += outcomes[r].evaluations;
    if (outcomes[r].cost < outcomes[best].cost ||
        (outcomes[r].cost == outcomes[best].cost && outcomes[r].newick < outcomes[best].newick)) {
      best = r;
    }
  }
  const CostBounds bounds = cost_bounds(d);
  return SolverResult{
      LabeledTree(d.size(), std::move(outcomes[best].edges), std::move(outcomes[best].labels)),
      outcomes[best].cost,
      normalized_score(outcomes[best].cost, bounds.lower, bounds.upper),
      0,
      evaluations,
      0,
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start),
  };
}

void check_config(const SearchConfig& cfg) {
  if (cfg.restarts < 1) {
    throw std::invalid_argument("hill climbing: restarts must be at least 1");
  }
  if (cfg.max_steps_per_restart < 0) {
    throw std::invalid_argument("hill climbing: step budget must be non-negative");
  }
}

}  // namespace

SolverResult solve_hill_climbing_serial(const DistanceMatrix& d, const SearchConfig& cfg,
                                        const TrajectoryObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  check_config(cfg);
  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(cfg.restarts);
  for (int r = 0; r < cfg.restarts; ++r) {
    outcomes.push_back(run_restart(d, cfg, r, observer));
  }
  return reduce_restarts(d, std::move(outcomes), start);
}

SolverResult solve_hill_climbing(const DistanceMatrix& d, const SearchConfig& cfg,
                                 const TrajectoryObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  check_config(cfg);
  std::vector<std::optional<RestartOutcome>> slots(cfg.restarts);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < cfg.restarts; ++r) {
    slots[r] = run_restart(d, cfg, r, observer);
  }

  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(cfg.restarts);
  for (auto& slot : slots) outcomes.push_back(std::move(*slot));
  return reduce_restarts(d, std::move(outcomes), start);
}

}  // namespace mqtc
