#include "mqtc/newick.hpp"

#include <cctype>
#include <vector>

#include "mqtc/errors.hpp"

namespace mqtc {

namespace {

// Recursive-descent parse into a scratch node list; the LabeledTree is
// assembled afterwards once n is known.
struct ParsedNode {
  std::string label;            // leaves only
  std::vector<int> children;    // 2 for interior groups, 3 for the root
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  std::vector<ParsedNode> run(int* root_out) {
    skip_space();
    *root_out = parse_node(true);
    skip_space();
    expect(';');
    skip_space();
    if (pos_ != text_.size()) {
      throw FormatError("newick: trailing characters after ';'");
    }
    return std::move(nodes_);
  }

 private:
  int parse_node(bool is_root) {
    skip_space();
    if (peek() == '(') {
      ++pos_;
      std::vector<int> children;
      children.push_back(parse_node(false));
      skip_space();
      while (peek() == ',') {
        ++pos_;
        children.push_back(parse_node(false));
        skip_space();
      }
      expect(')');
      const std::size_t want = is_root ? 3 : 2;
      if (children.size() != want) {
        throw FormatError("newick: " + std::string(is_root ? "root" : "interior node") +
                          " has " + std::to_string(children.size()) + " children, expected " +
                          std::to_string(want));
      }
      nodes_.push_back({"", std::move(children)});
      return static_cast<int>(nodes_.size()) - 1;
    }

    std::string label;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ',' || c == ')' || c == ';' || c == '(') break;
      label += c;
      ++pos_;
    }
    while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back()))) {
      label.pop_back();
    }
    if (label.find(':') != std::string::npos) {
      throw FormatError("newick: branch lengths are not supported");
    }
    if (!valid_object_label(label)) {
      throw FormatError("newick: invalid or empty label \"" + label + "\"");
    }
    nodes_.push_back({std::move(label), {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) {
      throw FormatError(std::string("newick: expected '") + c + "' at position " +
                        std::to_string(pos_));
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::vector<ParsedNode> nodes_;
};

}  // namespace

LabeledTree parse_newick(const std::string& text) {
  int root = -1;
  Parser parser(text);
  const std::vector<ParsedNode> nodes = parser.run(&root);

  int n = 0;
  for (const auto& node : nodes) {
    if (node.children.empty()) ++n;
  }
  if (n < 4) {
    throw FormatError("newick: tree has " + std::to_string(n) + " leaves, at least 4 required");
  }

  // Leaves take ordinals in parse order; interior nodes take 0..n-3.
  std::vector<NodeId> id_of(nodes.size());
  std::vector<std::string> labels;
  int next_internal = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) {
      id_of[i] = leaf_node(static_cast<int>(labels.size()), n);
      labels.push_back(nodes[i].label);
    } else {
      id_of[i] = next_internal++;
    }
  }
  if (next_internal != n - 2) {
    throw FormatError("newick: " + std::to_string(next_internal) + " interior nodes for " +
                      std::to_string(n) + " leaves, expected " + std::to_string(n - 2));
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(tree_edge_count(n));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int child : nodes[i].children) {
      edges.emplace_back(id_of[i], id_of[child]);
    }
  }

  LabeledTree t(n, std::move(edges), std::move(labels));
  if (auto report = validate_tree(t); !report.ok) {
    throw FormatError("newick: " + report.violation);
  }
  return t;
}

}  // namespace mqtc
