#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mqtc/exact.hpp"
#include "mqtc/rng.hpp"

namespace mqtc {

struct SearchConfig {
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_steps_per_restart = 500;  // 0 keeps the initial random tree
  enum class Neighborhood { kLeafSwap, kSubtreeMove, kBoth };
  Neighborhood neighborhood = Neighborhood::kBoth;
};

/// Uniform sample over the (2n-5)!! labeled trees on n objects, built by
/// inserting each object on a uniformly random edge of the growing tree.
/// labels[k] names object k. Deterministic for a given rng state.
LabeledTree random_tree(int n, const std::vector<std::string>& labels, SplitMix64& rng);

/// All hill-climbing moves from t, in the deterministic scan order the
/// solver uses: label swaps of leaf pairs that do not share a cherry, then
/// each leaf detached and reinserted at every other edge. Every yielded tree
/// is valid and differs from t.
std::vector<LabeledTree> neighbors(const LabeledTree& t);

/// Called after the initial evaluation (step 0) and after every accepted
/// move. With parallel restarts the observer runs concurrently; restarts
/// are identified by the first argument.
using TrajectoryObserver = std::function<void(int restart, int step, double cost)>;

/// First-improvement randomized hill climbing with independent restarts.
/// Restart r draws its tree from substream (seed, r), then repeatedly moves
/// to the first strictly improving neighbor in scan order until no neighbor
/// improves or the step budget runs out. Accepted costs never increase
/// within a restart; fixed seed and config give bit-identical results.
SolverResult solve_hill_climbing(const DistanceMatrix& d, const SearchConfig& config,
                                 const TrajectoryObserver& observer = nullptr);

/// Single-threaded reference implementation (restarts run in order).
SolverResult solve_hill_climbing_serial(const DistanceMatrix& d, const SearchConfig& config,
                                        const TrajectoryObserver& observer = nullptr);

}  // namespace mqtc
