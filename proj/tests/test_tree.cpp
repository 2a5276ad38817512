#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "mqtc/hill.hpp"
#include "mqtc/quartet.hpp"
#include "mqtc/rng.hpp"
#include "mqtc/topology.hpp"
#include "mqtc/tree.hpp"
#include "test_util.hpp"

using namespace mqtc;

namespace {

// n=4 tree ab|cd: internals 0,1; leaves 2..5 labeled a,b,c,d.
LabeledTree quartet_ab_cd() {
  return LabeledTree(4, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}}, {"a", "b", "c", "d"});
}

LabeledTree caterpillar(int n) {
  return shape_to_tree(initial_caterpillar(n), testutil::letters(n));
}

}  // namespace

TEST_CASE("validate_tree accepts the smallest legal tree") {
  CHECK(validate_tree(quartet_ab_cd()).ok);
}

TEST_CASE("validate_tree rejects a dangling leaf") {
  LabeledTree t(4, {{0, 1}, {0, 2}, {0, 3}, {1, 4}}, {"a", "b", "c", "d"});
  const auto report = validate_tree(t);
  CHECK_FALSE(report.ok);
  CHECK_FALSE(report.violation.empty());
}

TEST_CASE("validate_tree rejects an internal degree above 3") {
  // Star: every leaf on internal 0, internal 1 tied in to keep the node set
  // connected. First violated invariant in check order is the degree rule.
  LabeledTree t(4, {{0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 1}}, {"a", "b", "c", "d"});
  const auto report = validate_tree(t);
  CHECK_FALSE(report.ok);
  CHECK(report.violation.find("degree") != std::string::npos);
}

TEST_CASE("validate_tree reports label problems") {
  LabeledTree dup(4, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}}, {"a", "a", "c", "d"});
  CHECK(validate_tree(dup).violation.find("label") != std::string::npos);

  LabeledTree bad(4, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}}, {"a", "b", "c", "d;x"});
  CHECK(validate_tree(bad).violation.find("label") != std::string::npos);
}

TEST_CASE("structural invariants hold on random trees") {
  SplitMix64 rng(7);
  for (int n = 4; n <= 10; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      LabeledTree t = random_tree(n, testutil::letters(n), rng);
      REQUIRE(validate_tree(t).ok);
      CHECK(t.node_count() == 2 * n - 2);
      CHECK(static_cast<int>(t.edges().size()) == 2 * n - 3);
      for (NodeId v = 0; v < t.node_count(); ++v) {
        CHECK(t.degree(v) == (is_internal_node(v, n) ? 3 : 1));
      }
    }
  }
}

TEST_CASE("complete matrix blocks encode the tree") {
  const LabeledTree t = quartet_ab_cd();
  const auto m = to_complete_matrix(t, coefficient_matrix(t));
  CHECK(m.dimension() == 6);
  CHECK(m.k(0, 1) == 1.0);
  CHECK(m.k(0, 0) == 0.0);
  CHECK(m.l(0, 0) == 1.0);  // leaf a on internal 0
  CHECK(m.l(1, 0) == 0.0);
  CHECK(m.c(0, 1) == 1.0);  // coef(a,b) = 1 for the single quartet

  const LabeledTree cat5 = caterpillar(5);
  const auto m5 = to_complete_matrix(cat5, coefficient_matrix(cat5));
  // K is the 3x3 path adjacency.
  CHECK(m5.k(0, 1) == 1.0);
  CHECK(m5.k(1, 2) == 1.0);
  CHECK(m5.k(0, 2) == 0.0);
}

TEST_CASE("complete matrix round-trips random trees") {
  SplitMix64 rng(11);
  for (int n = 4; n <= 9; ++n) {
    LabeledTree t = random_tree(n, testutil::letters(n), rng);
    const LabeledTree back = from_complete_matrix(to_complete_matrix(t, coefficient_matrix(t)));
    CHECK(back.edges() == t.edges());
    CHECK(back.leaf_labels() == t.leaf_labels());
  }
}

TEST_CASE("from_complete_matrix rejects broken blocks") {
  const int n = 4;
  const int dim = 6;
  std::vector<double> a(dim * dim, 0.0);
  auto set = [&](int i, int j, double v) {
    a[i * dim + j] = v;
    a[j * dim + i] = v;
  };
  // Zero K block: leaves attached two per internal node, internals apart.
  set(0, 2, 1.0);
  set(0, 3, 1.0);
  set(1, 4, 1.0);
  set(1, 5, 1.0);
  CHECK_THROWS_AS(from_complete_matrix(CompleteMatrix(n, a, {"a", "b", "c", "d"})),
                  std::invalid_argument);

  // Dangling leaf: column of L all zero.
  set(0, 1, 1.0);
  set(1, 4, 0.0);
  CHECK_THROWS_AS(from_complete_matrix(CompleteMatrix(n, a, {"a", "b", "c", "d"})),
                  std::invalid_argument);
}

TEST_CASE("leaf_path on the quartet tree") {
  const LabeledTree t = quartet_ab_cd();
  CHECK(leaf_path(t, 2, 3) == std::vector<NodeId>{2, 0, 3});
  CHECK(leaf_path(t, 2, 4) == std::vector<NodeId>{2, 0, 1, 4});
  CHECK_THROWS_AS(leaf_path(t, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(leaf_path(t, 4, 4), std::invalid_argument);
}

TEST_CASE("leaf_path spans the caterpillar spine") {
  const LabeledTree t = caterpillar(6);
  // End-cherry leaves sit on internals 0 and 3; the path walks the whole
  // spine: 5 edges, all 4 internal nodes.
  const auto path = leaf_path(t, leaf_node(0, 6), leaf_node(4, 6));
  CHECK(path == std::vector<NodeId>{4, 0, 1, 2, 3, 8});
}

TEST_CASE("leaf_path is symmetric and short inside cherries") {
  SplitMix64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 5 + static_cast<int>(rng.next_below(5));
    LabeledTree t = random_tree(n, testutil::letters(n), rng);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        auto forward = leaf_path(t, leaf_node(i, n), leaf_node(j, n));
        auto backward = leaf_path(t, leaf_node(j, n), leaf_node(i, n));
        std::reverse(backward.begin(), backward.end());
        CHECK(forward == backward);
        const bool cherry =
            t.neighbors(leaf_node(i, n)).front() == t.neighbors(leaf_node(j, n)).front();
        if (cherry) CHECK(forward.size() == 3);
      }
    }
  }
}

TEST_CASE("to_newick renders deterministically") {
  CHECK(to_newick(quartet_ab_cd()) == "(a,b,(c,d));");

  // Caterpillar n=5 with cherry {a,b}, middle leaf e, cherry {c,d}.
  LabeledTree t(5, {{0, 1}, {1, 2}, {0, 3}, {0, 4}, {1, 5}, {2, 6}, {2, 7}},
                {"a", "b", "e", "c", "d"});
  REQUIRE(validate_tree(t).ok);
  CHECK(to_newick(t) == "(a,b,((c,d),e));");
}

TEST_CASE("order-preserving relabeling changes only label text") {
  auto skeleton = [](const std::string& newick) {
    std::string out;
    std::multiset<int> depths;
    int depth = 0;
    bool in_label = false;
    for (char c : newick) {
      if (c == '(' || c == ')' || c == ',' || c == ';') {
        out += c;
        if (c == '(') ++depth;
        if (c == ')') --depth;
        in_label = false;
      } else if (!in_label) {
        in_label = true;
        depths.insert(depth);
      }
    }
    return std::pair(out, depths);
  };

  SplitMix64 rng(19);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 6 + static_cast<int>(rng.next_below(4));
    LabeledTree t = random_tree(n, testutil::letters(n), rng);

    // Renaming that keeps the label order keeps every rooting and sibling
    // ordering decision, so only the label text may differ.
    std::vector<std::string> renamed = t.leaf_labels();
    for (auto& label : renamed) label = "x" + label;
    LabeledTree relabeled(n, t.edges(), renamed);
    CHECK(skeleton(to_newick(t)) == skeleton(to_newick(relabeled)));
  }
}

TEST_CASE("object labels reject newick metacharacters") {
  CHECK(valid_object_label("alpha beta"));
  CHECK(valid_object_label("小さな木"));
  CHECK_FALSE(valid_object_label(""));
  for (const char* bad : {"a(b", "a)b", "a,b", "a;b", "a:b"}) {
    CHECK_FALSE(valid_object_label(bad));
  }
}
