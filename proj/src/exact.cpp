#include "mqtc/exact.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mqtc/errors.hpp"

namespace mqtc {

std::uint64_t double_factorial(int m) {
  std::uint64_t r = 1;
  for (int v = m; v > 1; v -= 2) r *= static_cast<std::uint64_t>(v);
  return r;
}

namespace {

std::vector<std::string> numbered_labels(int n) {
  int width = 1;
  for (int v = n - 1; v >= 10; v /= 10) ++width;
  std::vector<std::string> labels(n);
  for (int k = 0; k < n; ++k) {
    std::string digits = std::to_string(k);
    labels[k] = std::string(width - digits.size(), '0') + digits;
  }
  return labels;
}

// Per-shape data reused across all assignments: the concrete slot-layout
// edges, the slot-to-slot coefficient matrix (constant for the shape; an
// assignment only permutes which distance entries the coefficients meet),
// and for each slot the cherry partner that precedes it, if any.
struct ShapeContext {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<double> slot_coef;  // n*n row-major
  std::vector<int> cherry_prev;   // -1 when the slot does not close a cherry

  explicit ShapeContext(const TopologyShape& s) {
    const int n = s.n;
    LabeledTree slot_tree = shape_to_tree(s, numbered_labels(n));
    edges = slot_tree.edges();
    const CoefficientMatrix coef = coefficient_matrix(slot_tree);
    slot_coef.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        slot_coef[static_cast<std::size_t>(i) * n + j] = static_cast<double>(coef.at(i, j));
    cherry_prev.assign(n, -1);
    int slot = 0;
    for (int v = 0; v < n - 2; ++v) {
      if (s.leaf_slots[v] == 2) cherry_prev[slot + 1] = slot;
      slot += s.leaf_slots[v];
    }
  }
};

LabeledTree materialize_tree(const ShapeContext& ctx, std::span<const int> slot_obj,
                             const DistanceMatrix& d) {
  const int n = d.size();
  std::vector<std::string> labels(n);
  for (int slot = 0; slot < n; ++slot) labels[slot] = d.labels()[slot_obj[slot]];
  return LabeledTree(n, ctx.edges, std::move(labels));
}

// Best assignment seen so far under the total order (cost, Newick text).
// The order makes the reduction independent of enumeration schedule.
struct Incumbent {
  bool valid = false;
  double cost = 0.0;
  std::string newick;
  int shape_index = -1;
  std::vector<int> slot_obj;

  void offer(double candidate_cost, int shape, std::span<const int> assignment,
             const ShapeContext& ctx, const DistanceMatrix& d) {
    if (valid && candidate_cost > cost) return;
    std::string candidate_newick = to_newick(materialize_tree(ctx, assignment, d));
    if (valid && candidate_cost == cost && candidate_newick >= newick) return;
    valid = true;
    cost = candidate_cost;
    newick = std::move(candidate_newick);
    shape_index = shape;
    slot_obj.assign(assignment.begin(), assignment.end());
  }

  void merge(const Incumbent& other) {
    if (!other.valid) return;
    if (!valid || other.cost < cost || (other.cost == cost && other.newick < newick)) {
      *this = other;
    }
  }
};

// Depth-first fill of slots [slot, n). partial[s] is the cost of the first
// s placements; the per-placement delta is accumulated in slot order so the
// final sum is bitwise identical no matter how the work was partitioned.
template <typename OnAssignment>
void fill_slots(const ShapeContext& ctx, const DistanceMatrix& d, bool pruning, int slot,
                std::vector<int>& slot_obj, std::vector<char>& used,
                std::vector<double>& partial, std::uint64_t& assignments, OnAssignment&& on) {
  const int n = d.size();
  if (slot == n) {
    ++assignments;
    on(partial[n], std::span<const int>(slot_obj));
    return;
  }
  const double* coef_row = &ctx.slot_coef[static_cast<std::size_t>(slot) * n];
  const int lo = (pruning && ctx.cherry_prev[slot] >= 0) ? slot_obj[ctx.cherry_prev[slot]] + 1 : 0;
  for (int obj = lo; obj < n; ++obj) {
    if (used[obj]) continue;
    double delta = 0.0;
    for (int t = 0; t < slot; ++t) delta += coef_row[t] * d.at(slot_obj[t], obj);
    partial[slot + 1] = partial[slot] + delta;
    slot_obj[slot] = obj;
    used[obj] = 1;
    fill_slots(ctx, d, pruning, slot + 1, slot_obj, used, partial, assignments, on);
    used[obj] = 0;
  }
}

std::chrono::milliseconds since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start);
}

// Throttles and serializes progress callbacks from the enumeration loops.
class ProgressReporter {
 public:
  ProgressReporter(const std::function<void(const ExactProgress&)>& sink,
                   std::uint64_t shapes_total, std::chrono::steady_clock::time_point start)
      : sink_(sink), shapes_total_(shapes_total), start_(start), last_(start) {}

  void add_assignments(std::uint64_t count) {
    if (sink_) assignments_.fetch_add(count, std::memory_order_relaxed);
  }

  void shape_completed() {
    if (!sink_) return;
    shapes_done_.fetch_add(1, std::memory_order_relaxed);
    emit(true);
  }

  void tick() {
    if (sink_) emit(false);
  }

 private:
  void emit(bool force) {
    const auto now = std::chrono::steady_clock::now();
    const std::scoped_lock lock(mu_);
    if (!force && now - last_ < std::chrono::milliseconds(500)) return;
    last_ = now;
    ExactProgress p;
    p.shapes_done = shapes_done_.load(std::memory_order_relaxed);
    p.shapes_total = shapes_total_;
    p.assignments_done = assignments_.load(std::memory_order_relaxed);
    const double elapsed = std::chrono::duration<double>(now - start_).count();
    p.assignments_per_second = elapsed > 0 ? static_cast<double>(p.assignments_done) / elapsed : 0;
    sink_(p);
  }

  const std::function<void(const ExactProgress&)>& sink_;
  std::uint64_t shapes_total_;
  std::chrono::steady_clock::time_point start_;
  std::atomic<std::uint64_t> shapes_done_{0};
  std::atomic<std::uint64_t> assignments_{0};
  std::mutex mu_;
  std::chrono::steady_clock::time_point last_;
};

void check_ceiling(int n, int max_n) {
  if (n > max_n) {
    throw ResourceLimitError("exact solver: n = " + std::to_string(n) +
                             " exceeds the enumeration ceiling " + std::to_string(max_n) +
                             " (set MQTC_MAX_N to raise it)");
  }
}

SolverResult finish(const DistanceMatrix& d, const std::vector<ShapeContext>& ctxs,
                    const Incumbent& inc, std::uint64_t assignments,
                    std::chrono::steady_clock::time_point start) {
  const CostBounds bounds = cost_bounds(d);
  return SolverResult{
      materialize_tree(ctxs[inc.shape_index], inc.slot_obj, d),
      inc.cost,
      normalized_score(inc.cost, bounds.lower, bounds.upper),
      ctxs.size(),
      assignments,
      double_factorial(2 * d.size() - 5),
      since(start),
  };
}

}  // namespace

void enumerate_assignments(const TopologyShape& s,
                           const std::function<void(std::span<const int>)>& yield,
                           bool cherry_pruning) {
  if (!valid_shape(s)) {
    throw std::invalid_argument("enumerate_assignments: malformed shape");
  }
  const int n = s.n;
  std::vector<int> cherry_prev(n, -1);
  int slot = 0;
  for (int v = 0; v < n - 2; ++v) {
    if (s.leaf_slots[v] == 2) cherry_prev[slot + 1] = slot;
    slot += s.leaf_slots[v];
  }

  std::vector<int> slot_obj(n);
  std::vector<char> used(n, 0);
  auto recurse = [&](auto&& self, int at) -> void {
    if (at == n) {
      yield(std::span<const int>(slot_obj));
      return;
    }
    const int lo = (cherry_pruning && cherry_prev[at] >= 0) ? slot_obj[cherry_prev[at]] + 1 : 0;
    for (int obj = lo; obj < n; ++obj) {
      if (used[obj]) continue;
      slot_obj[at] = obj;
      used[obj] = 1;
      self(self, at + 1);
      used[obj] = 0;
    }
  };
  recurse(recurse, 0);
}

std::uint64_t count_labeled_trees(int n, int max_n) {
  if (n < 4) {
    throw std::invalid_argument("count_labeled_trees: n must be at least 4");
  }
  check_ceiling(n, max_n);
  const auto shapes = generate_shapes(n, {.max_n = std::max(n, 14)});
  const auto labels = numbered_labels(n);

  std::unordered_set<std::string> distinct;
  for (const auto& shape : shapes) {
    const LabeledTree slot_tree = shape_to_tree(shape, labels);
    enumerate_assignments(shape, [&](std::span<const int> slot_obj) {
      std::vector<std::string> assigned(n);
      for (int slot = 0; slot < n; ++slot) assigned[slot] = labels[slot_obj[slot]];
      distinct.insert(to_newick(LabeledTree(n, slot_tree.edges(), std::move(assigned))));
    });
  }
  return distinct.size();
}

SolverResult solve_exact_serial(const DistanceMatrix& d, const ExactOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = d.size();
  check_ceiling(n, options.max_n);

  const auto shapes = generate_shapes(n, {.max_n = std::max(options.max_n, 14)});
  std::vector<ShapeContext> ctxs(shapes.begin(), shapes.end());

  ProgressReporter reporter(options.progress, ctxs.size(), start);
  Incumbent inc;
  std::uint64_t assignments = 0;
  std::vector<int> slot_obj(n);
  std::vector<char> used(n, 0);
  std::vector<double> partial(n + 1, 0.0);
  for (std::size_t si = 0; si < ctxs.size(); ++si) {
    const std::uint64_t before = assignments;
    fill_slots(ctxs[si], d, options.cherry_pruning, 0, slot_obj, used, partial, assignments,
               [&](double cost, std::span<const int> assignment) {
                 inc.offer(cost, static_cast<int>(si), assignment, ctxs[si], d);
               });
    reporter.add_assignments(assignments - before);
    reporter.shape_completed();
  }
  return finish(d, ctxs, inc, assignments, start);
}

SolverResult solve_exact(const DistanceMatrix& d, const ExactOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = d.size();
  check_ceiling(n, options.max_n);

  const auto shapes = generate_shapes(n, {.max_n = std::max(options.max_n, 14)});
  std::vector<ShapeContext> ctxs(shapes.begin(), shapes.end());

  // Work unit: a shape with the first two slots fixed. Fine enough to load
  // balance, coarse enough that the per-block setup cost is noise.
  struct Block {
    int shape;
    int first_obj;
    int second_obj;
  };
  std::vector<Block> blocks;
  std::vector<int> shape_block_count(ctxs.size(), 0);
  for (std::size_t si = 0; si < ctxs.size(); ++si) {
    const bool leading_cherry = options.cherry_pruning && ctxs[si].cherry_prev[1] == 0;
    for (int a = 0; a < n; ++a) {
      for (int b = leading_cherry ? a + 1 : 0; b < n; ++b) {
        if (b != a) {
          blocks.push_back({static_cast<int>(si), a, b});
          ++shape_block_count[si];
        }
      }
    }
  }

  ProgressReporter reporter(options.progress, ctxs.size(), start);
  std::vector<std::atomic<int>> blocks_left(ctxs.size());
  for (std::size_t si = 0; si < ctxs.size(); ++si) blocks_left[si] = shape_block_count[si];

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
#endif
  std::vector<Incumbent> incumbents(max_threads);
  std::vector<std::uint64_t> block_assignments(blocks.size(), 0);

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    Incumbent& inc = incumbents[tid];
    std::vector<int> slot_obj(n);
    std::vector<char> used(n, 0);
    std::vector<double> partial(n + 1, 0.0);

#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const Block& block = blocks[bi];
      const ShapeContext& ctx = ctxs[block.shape];

      std::fill(used.begin(), used.end(), 0);
      slot_obj[0] = block.first_obj;
      used[block.first_obj] = 1;
      partial[1] = partial[0];  // the first placement contributes no pair yet
      slot_obj[1] = block.second_obj;
      used[block.second_obj] = 1;
      partial[2] = partial[1] + ctx.slot_coef[static_cast<std::size_t>(1) * n + 0] *
                                    d.at(block.first_obj, block.second_obj);

      std::uint64_t local = 0;
      fill_slots(ctx, d, options.cherry_pruning, 2, slot_obj, used, partial, local,
                 [&](double cost, std::span<const int> assignment) {
                   inc.offer(cost, block.shape, assignment, ctx, d);
                 });
      block_assignments[bi] = local;
      used[block.first_obj] = 0;
      used[block.second_obj] = 0;

      reporter.add_assignments(local);
      if (blocks_left[block.shape].fetch_sub(1, std::memory_order_acq_rel) == 1) {
        reporter.shape_completed();
      } else {
        reporter.tick();
      }
    }
  }

  Incumbent best;
  for (const Incumbent& inc : incumbents) best.merge(inc);
  std::uint64_t assignments = 0;
  for (std::uint64_t c : block_assignments) assignments += c;
  return finish(d, ctxs, best, assignments, start);
}

}  // namespace mqtc
