#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>

#include "mqtc/quartet.hpp"
#include "mqtc/topology.hpp"

namespace mqtc {

struct SolverResult {
  LabeledTree best_tree;
  double best_cost = 0.0;
  double normalized_score = 0.0;
  std::uint64_t shapes_evaluated = 0;
  std::uint64_t assignments_evaluated = 0;
  std::uint64_t distinct_labeled_trees = 0;
  std::chrono::milliseconds elapsed{0};
};

struct ExactProgress {
  std::uint64_t shapes_done = 0;
  std::uint64_t shapes_total = 0;
  std::uint64_t assignments_done = 0;
  double assignments_per_second = 0.0;
};

struct ExactOptions {
  int max_n = 12;              // enumeration ceiling; MQTC_MAX_N overrides it at the CLI
  bool cherry_pruning = true;  // switchable only for the pruning-safety tests
  // Invoked at most every ~0.5s plus once per completed shape; may be called
  // from worker threads, never concurrently.
  std::function<void(const ExactProgress&)> progress;
};

/// m!! for odd m; (2n-5)!! counts the distinct labeled trees on n objects.
std::uint64_t double_factorial(int m);

/// All leaf-to-slot assignments for a shape, in deterministic order.
/// `assignment[slot] = object index`. With pruning enabled, the two leaves
/// of a cherry are never emitted in both orders (the swap cannot change any
/// tree cost); residual repeats from other shape symmetries are kept.
void enumerate_assignments(const TopologyShape& s,
                           const std::function<void(std::span<const int>)>& yield,
                           bool cherry_pruning = true);

/// Number of distinct labeled trees across all shapes and assignments,
/// deduplicated by canonical Newick form. Diagnostic for enumeration
/// completeness: the result must equal (2n-5)!!.
std::uint64_t count_labeled_trees(int n, int max_n = 12);

/// Global MQTC optimum by exhaustive enumeration over all shapes and leaf
/// assignments. Ties are broken toward the lexicographically smallest
/// Newick rendering. OpenMP kernel, partitioned by (shape, assignment
/// block); the result is independent of the worker count.
SolverResult solve_exact(const DistanceMatrix& d, const ExactOptions& options = {});

/// Single-threaded reference implementation of the same enumeration;
/// kept for testing the kernel and as the benchmark baseline.
SolverResult solve_exact_serial(const DistanceMatrix& d, const ExactOptions& options = {});

}  // namespace mqtc
