// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Criterion 9 drives the installed CLI binary, passed as argv[1].
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mqtc/exact.hpp"
#include "mqtc/hill.hpp"
#include "mqtc/matrix_io.hpp"
#include "mqtc/quartet.hpp"
#include "mqtc/rng.hpp"
#include "mqtc/topology.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mqtc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (detail.empty()) detail = why;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool paths_disjoint(const LabeledTree& t, int a, int b, int c, int d) {
  const int n = t.object_count();
  const auto p1 = leaf_path(t, leaf_node(a, n), leaf_node(b, n));
  const auto p2 = leaf_path(t, leaf_node(c, n), leaf_node(d, n));
  const std::set<NodeId> nodes(p1.begin(), p1.end());
  return std::none_of(p2.begin(), p2.end(), [&](NodeId v) { return nodes.contains(v); });
}

// The shared sample for criteria 1 and 3: 50 random trees, n cycling 4..10.
std::vector<LabeledTree> sample_trees() {
  std::vector<LabeledTree> trees;
  SplitMix64 rng(1001);
  for (int i = 0; i < 50; ++i) {
    const int n = 4 + (i % 7);
    trees.push_back(random_tree(n, testutil::letters(n), rng));
  }
  return trees;
}

Outcome criterion_trichotomy() {
  Outcome out;
  std::uint64_t subsets = 0;
  for (const LabeledTree& t : sample_trees()) {
    const int n = t.object_count();
    for (int i = 0; i < n && out.pass; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            const int consistent = paths_disjoint(t, i, j, k, l) +
                                   paths_disjoint(t, i, k, j, l) +
                                   paths_disjoint(t, i, l, j, k);
            ++subsets;
            if (consistent != 1) {
              out.fail("subset with " + std::to_string(consistent) + " consistent topologies");
            }
          }
  }
  if (out.pass) out.detail = std::to_string(subsets) + " subsets over 50 trees";
  return out;
}

Outcome criterion_cost_oracle() {
  Outcome out;
  SplitMix64 rng(2002);
  for (int i = 0; i < 100; ++i) {
    const int n = 5 + (i % 8);
    const LabeledTree t = random_tree(n, testutil::letters(n), rng);
    const DistanceMatrix d = testutil::random_distance_matrix(n, 20000 + i);
    const double fast = tree_cost(t, d);
    const double slow = tree_cost_bruteforce(t, d);
    const double tolerance = 1e-12 * static_cast<double>(binomial(n, 4));
    if (std::abs(fast - slow) > tolerance) {
      out.fail("pair " + std::to_string(i) + ": |" + std::to_string(fast) + " - " +
               std::to_string(slow) + "| > " + std::to_string(tolerance));
      break;
    }
  }
  if (out.pass) out.detail = "100 (tree, matrix) pairs, n in 5..12";
  return out;
}

Outcome criterion_coefficient_identities() {
  Outcome out;
  for (const LabeledTree& t : sample_trees()) {
    const int n = t.object_count();
    const auto coef = coefficient_matrix(t);
    if (coef.pair_sum() != 2 * binomial(n, 4)) {
      out.fail("pair sum mismatch at n=" + std::to_string(n));
      break;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool cherry =
            t.neighbors(leaf_node(i, n)).front() == t.neighbors(leaf_node(j, n)).front();
        if (cherry && coef.at(i, j) != binomial(n - 2, 2)) {
          out.fail("cherry coefficient mismatch at n=" + std::to_string(n));
        }
      }
    }
    if (!out.pass) break;
  }
  if (out.pass) out.detail = "pair-sum and cherry identities exact on the criterion-1 sample";
  return out;
}

Outcome criterion_enumeration_completeness() {
  Outcome out;
  const std::uint64_t expected[] = {3, 15, 105, 945};
  for (int n = 4; n <= 7; ++n) {
    const std::uint64_t counted = count_labeled_trees(n);
    if (counted != expected[n - 4] || counted != double_factorial(2 * n - 5)) {
      out.fail("n=" + std::to_string(n) + ": counted " + std::to_string(counted));
    }
  }
  if (out.pass) out.detail = "deduplicated streams give 3, 15, 105, 945 for n=4..7";
  return out;
}

Outcome criterion_shape_generation() {
  Outcome out;
  std::string counts;
  SplitMix64 rng(3003);
  for (int n = 4; n <= 10; ++n) {
    const auto generated = generate_shapes(n);
    const auto census = oracle::shapes_by_bruteforce(n);
    if (generated.size() != census.size()) {
      out.fail("n=" + std::to_string(n) + ": generated " + std::to_string(generated.size()) +
               ", census " + std::to_string(census.size()));
      break;
    }
    for (const auto& target : census) {
      int hits = 0;
      for (const auto& shape : generated) {
        hits += oracle::shapes_isomorphic_bruteforce(shape, target);
      }
      if (hits != 1) {
        out.fail("n=" + std::to_string(n) + ": census shape covered " + std::to_string(hits) +
                 " times");
        break;
      }
    }

    // Canonical-code equality must coincide with the brute-force decision.
    for (std::size_t i = 0; i < generated.size() && out.pass; ++i) {
      // Same class: a random conjugate of shape i.
      std::vector<int> perm(n - 2);
      for (int v = 0; v < n - 2; ++v) perm[v] = v;
      for (int v = n - 3; v > 0; --v) {
        std::swap(perm[v], perm[rng.next_below(static_cast<std::uint64_t>(v) + 1)]);
      }
      TopologyShape conj;
      conj.n = n;
      conj.leaf_slots.resize(n - 2);
      for (int v = 0; v < n - 2; ++v) conj.leaf_slots[perm[v]] = generated[i].leaf_slots[v];
      for (const auto& [u, v] : generated[i].internal_edges) {
        conj.internal_edges.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
      }
      std::sort(conj.internal_edges.begin(), conj.internal_edges.end());
      const bool code_eq = canonical_code(conj) == canonical_code(generated[i]);
      const bool iso = oracle::shapes_isomorphic_bruteforce(conj, generated[i]);
      if (!code_eq || !iso) out.fail("conjugate disagreement at n=" + std::to_string(n));

      for (std::size_t j = i + 1; j < generated.size() && out.pass; ++j) {
        const bool eq = canonical_code(generated[i]) == canonical_code(generated[j]);
        const bool iso_ij = oracle::shapes_isomorphic_bruteforce(generated[i], generated[j]);
        if (eq != iso_ij) {
          out.fail("code/isomorphism disagreement at n=" + std::to_string(n));
        }
        if (eq) out.fail("duplicate representative at n=" + std::to_string(n));
      }
    }
    if (!out.pass) break;
    counts += (counts.empty() ? "" : ",") + std::to_string(generated.size());
  }
  if (out.pass) out.detail = "counts " + counts + " for n=4..10 match the census";
  return out;
}

std::vector<DistanceMatrix> optimality_instances() {
  std::vector<DistanceMatrix> instances;
  for (int i = 0; i < 20; ++i) instances.push_back(testutil::random_distance_matrix(6, 6000 + i));
  return instances;
}

Outcome criterion_exact_optimality() {
  Outcome out;
  int index = 0;
  for (const DistanceMatrix& d : optimality_instances()) {
    double best = std::numeric_limits<double>::infinity();
    int trees = 0;
    oracle::for_each_tree_edges(6, [&](std::span<const oracle::GenericEdge> edges) {
      const LabeledTree t = oracle::tree_from_generic_edges(6, edges, d.labels());
      best = std::min(best, tree_cost_bruteforce(t, d));
      ++trees;
    });
    const SolverResult result = solve_exact(d);
    if (trees != 105 || std::abs(result.best_cost - best) > 1e-12) {
      out.fail("instance " + std::to_string(index) + ": solver " +
               std::to_string(result.best_cost) + " vs enumeration " + std::to_string(best));
      break;
    }
    ++index;
  }
  if (out.pass) out.detail = "20 n=6 instances match the 105-tree enumeration minimum";
  return out;
}

Outcome criterion_bounds_and_score() {
  Outcome out;
  for (const DistanceMatrix& d : optimality_instances()) {
    const CostBounds bounds = cost_bounds(d);
    oracle::for_each_tree_edges(6, [&](std::span<const oracle::GenericEdge> edges) {
      const LabeledTree t = oracle::tree_from_generic_edges(6, edges, d.labels());
      const double cost = tree_cost_bruteforce(t, d);
      if (cost < bounds.lower - 1e-12 || cost > bounds.upper + 1e-12) {
        out.fail("cost outside [m, M]");
      }
    });
    const SolverResult result = solve_exact(d);
    if (result.normalized_score < 0.0 || result.normalized_score > 1.0) {
      out.fail("score outside [0, 1]");
    }
    if (!out.pass) return out;
  }

  // Additive instance: distances are tree path lengths over 16 (a dyadic
  // scale keeps every sum exact), so the source tree embeds only
  // minimum-cost quartets and must score exactly 1.
  const int n = 6;
  const LabeledTree source = shape_to_tree(initial_caterpillar(n), testutil::letters(n));
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dist =
          static_cast<double>(leaf_path(source, leaf_node(i, n), leaf_node(j, n)).size() - 1) /
          16.0;
      values[static_cast<std::size_t>(i) * n + j] = dist;
      values[static_cast<std::size_t>(j) * n + i] = dist;
    }
  }
  const DistanceMatrix additive(testutil::letters(n), std::move(values));
  const SolverResult result = solve_exact(additive);
  if (result.normalized_score != 1.0) {
    out.fail("additive instance scored " + std::to_string(result.normalized_score));
  }
  if (out.pass) out.detail = "bounds hold on all enumerations; additive instance scores 1";
  return out;
}

Outcome criterion_heuristic_soundness() {
  Outcome out;
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.restarts = 20;
  cfg.max_steps_per_restart = 500;

  int index = 0;
  for (const DistanceMatrix& d : optimality_instances()) {
    const double optimum = solve_exact(d).best_cost;

    std::mutex mu;
    std::map<int, std::vector<double>> trajectories;
    const SolverResult first = solve_hill_climbing(d, cfg, [&](int restart, int, double cost) {
      const std::scoped_lock lock(mu);
      trajectories[restart].push_back(cost);
    });
    if (first.best_cost < optimum - 1e-12) {
      out.fail("instance " + std::to_string(index) + ": heuristic beat the exact optimum");
      break;
    }
    if (trajectories.size() != 20) out.fail("missing restart trajectories");
    for (const auto& [restart, costs] : trajectories) {
      for (std::size_t s = 1; s < costs.size(); ++s) {
        if (costs[s] >= costs[s - 1]) out.fail("non-monotone trajectory");
      }
    }

    const SolverResult second = solve_hill_climbing(d, cfg);
    if (second.best_cost != first.best_cost ||
        to_newick(second.best_tree) != to_newick(first.best_tree) ||
        second.assignments_evaluated != first.assignments_evaluated) {
      out.fail("rerun with the same seed differed");
    }
    if (!out.pass) break;
    ++index;
  }
  if (out.pass) out.detail = "20 instances: sound, monotone, reproducible";
  return out;
}

int run_command(const std::string& command) {
  const int rc = std::system(command.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string without_elapsed(std::string text) {
  const auto pos = text.find("\"elapsed_ms\"");
  if (pos == std::string::npos) return text;
  const auto begin = text.rfind('\n', pos) + 1;
  const auto end = text.find('\n', pos) + 1;
  return text.erase(begin, end - begin);
}

Outcome criterion_cli_determinism(const std::string& mqtc) {
  Outcome out;
  if (mqtc.empty()) {
    out.fail("no CLI path supplied");
    return out;
  }
  const fs::path dir = fs::temp_directory_path() / ("mqtc_accept_" + std::to_string(getpid()));
  fs::create_directories(dir);
  {
    std::ofstream in(dir / "input.csv");
    in << write_csv(testutil::random_distance_matrix(6, 99));
  }

  std::vector<std::string> reports, newicks;
  int worker_case = 0;
  for (const char* workers : {"1", "4"}) {
    for (int rep = 0; rep < 2; ++rep) {
      const std::string tag = std::to_string(worker_case) + "_" + std::to_string(rep);
      const std::string report_path = (dir / ("report" + tag + ".json")).string();
      const std::string tree_path = (dir / ("tree" + tag + ".nwk")).string();
      const int rc = run_command("OMP_NUM_THREADS=" + std::string(workers) + " " + mqtc +
                                 " solve --input " + (dir / "input.csv").string() +
                                 " --format csv --mode exact --output-report " + report_path +
                                 " --output-tree " + tree_path);
      if (rc != 0) {
        out.fail("CLI exited with " + std::to_string(rc));
        break;
      }
      reports.push_back(without_elapsed(slurp(report_path)));
      newicks.push_back(slurp(tree_path));
    }
    ++worker_case;
  }
  if (out.pass) {
    for (std::size_t i = 1; i < reports.size(); ++i) {
      if (reports[i] != reports[0]) out.fail("reports differ across runs/worker counts");
      if (newicks[i] != newicks[0]) out.fail("newick outputs differ");
    }
    if (reports.empty()) out.fail("no reports produced");
  }
  fs::remove_all(dir);
  if (out.pass) out.detail = "byte-identical reports at 1 and 4 workers (elapsed aside)";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mqtc = argc > 1 ? argv[1] : "";

  struct Criterion {
    const char* name;
    double time_limit_s;  // 0 = no stated limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"trichotomy on random trees", 30.0, criterion_trichotomy},
      {"cost oracle equivalence", 60.0, criterion_cost_oracle},
      {"coefficient identities", 0.0, criterion_coefficient_identities},
      {"enumeration completeness", 60.0, criterion_enumeration_completeness},
      {"shape generation vs census", 0.0, criterion_shape_generation},
      {"exact optimality at n=6", 120.0, criterion_exact_optimality},
      {"bound sandwich and score", 0.0, criterion_bounds_and_score},
      {"heuristic soundness", 0.0, criterion_heuristic_soundness},
      {"CLI determinism", 0.0, [&] { return criterion_cli_determinism(mqtc); }},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (criteria[i].time_limit_s > 0 && elapsed > criteria[i].time_limit_s) {
      out.fail("exceeded the " + std::to_string(criteria[i].time_limit_s) + "s budget");
    }
    std::printf("criterion %zu: %s — %s (%s; %.2fs)\n", i + 1, out.pass ? "PASS" : "FAIL",
                criteria[i].name, out.pass ? out.detail.c_str() : out.detail.c_str(), elapsed);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
