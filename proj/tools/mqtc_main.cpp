// mqtc: exact and heuristic solver for the minimum quartet tree cost problem.
//
// Subcommands:
//   solve   read a distance matrix, find the best tree, emit Newick + report
//   shapes  count (or list) the non-isomorphic tree shapes for a given n
//   verify  recompute cost and score for an existing tree against a matrix

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mqtc/errors.hpp"
#include "mqtc/exact.hpp"
#include "mqtc/hill.hpp"
#include "mqtc/matrix_io.hpp"
#include "mqtc/newick.hpp"
#include "mqtc/report.hpp"
#include "mqtc/topology.hpp"
#include "mqtc/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitResource = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw mqtc::FormatError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw mqtc::FormatError("cannot write file: " + path);
  }
  out << content;
}

mqtc::MatrixFormat parse_format(const std::string& name) {
  if (name == "csv") return mqtc::MatrixFormat::kCsv;
  if (name == "phylip") return mqtc::MatrixFormat::kPhylip;
  throw CLI::ValidationError("--format must be csv or phylip");
}

int exact_ceiling_from_env(int fallback) {
  if (const char* env = std::getenv("MQTC_MAX_N")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw mqtc::FormatError(std::string("MQTC_MAX_N is not an integer: ") + env);
    }
  }
  return fallback;
}

struct SolveArgs {
  std::string input;
  std::string format = "csv";
  std::string mode = "exact";
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_steps = 500;
  std::string output_tree;
  std::string output_report;
};

int run_solve(const SolveArgs& args) {
  const mqtc::DistanceMatrix d =
      mqtc::parse_distance_matrix(read_file(args.input), parse_format(args.format));

  mqtc::RunReport report;
  report.n = d.size();
  report.mode = args.mode;
  report.input_digest = mqtc::input_digest(d);
  report.tool_version = std::string(mqtc::kToolVersion);

  std::string newick;
  if (args.mode == "exact") {
    mqtc::ExactOptions options;
    options.max_n = exact_ceiling_from_env(options.max_n);
    if (isatty(fileno(stderr))) {
      options.progress = [](const mqtc::ExactProgress& p) {
        std::fprintf(stderr, "\rshapes %llu/%llu  assignments %llu (%.0f/s)%s",
                     static_cast<unsigned long long>(p.shapes_done),
                     static_cast<unsigned long long>(p.shapes_total),
                     static_cast<unsigned long long>(p.assignments_done),
                     p.assignments_per_second, p.shapes_done == p.shapes_total ? "\n" : "");
      };
    }
    const mqtc::SolverResult result = mqtc::solve_exact(d, options);
    newick = mqtc::to_newick(result.best_tree);
    report.best_cost = result.best_cost;
    report.normalized_score = result.normalized_score;
    report.shapes_evaluated = result.shapes_evaluated;
    report.assignments_evaluated = result.assignments_evaluated;
    report.elapsed_ms = result.elapsed.count();
  } else {
    mqtc::SearchConfig config;
    config.seed = args.seed;
    config.restarts = args.restarts;
    config.max_steps_per_restart = args.max_steps;
    const mqtc::SolverResult result = mqtc::solve_hill_climbing(d, config);
    newick = mqtc::to_newick(result.best_tree);
    report.best_cost = result.best_cost;
    report.normalized_score = result.normalized_score;
    report.assignments_evaluated = result.assignments_evaluated;
    report.elapsed_ms = result.elapsed.count();
    report.seed = args.seed;
  }
  report.newick = newick;

  const std::string json = mqtc::to_json(report);
  if (args.output_tree.empty() && args.output_report.empty()) {
    std::cout << json;
  }
  if (!args.output_tree.empty()) {
    write_file(args.output_tree, newick + "\n");
  }
  if (!args.output_report.empty()) {
    write_file(args.output_report, json);
  }
  return kExitOk;
}

int run_shapes(int n, bool list) {
  const auto shapes = mqtc::generate_shapes(n);
  if (!list) {
    std::cout << shapes.size() << "\n";
    return kExitOk;
  }
  nlohmann::ordered_json doc;
  doc["n"] = n;
  doc["count"] = shapes.size();
  doc["shapes"] = nlohmann::ordered_json::array();
  for (const auto& shape : shapes) {
    nlohmann::ordered_json item;
    item["code"] = mqtc::to_hex(mqtc::canonical_code(shape));
    item["internal_edges"] = shape.internal_edges;
    item["leaf_slots"] = shape.leaf_slots;
    doc["shapes"].push_back(std::move(item));
  }
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& format, const std::string& tree_arg) {
  const mqtc::DistanceMatrix d =
      mqtc::parse_distance_matrix(read_file(input), parse_format(format));

  // --tree takes either a Newick string or a path to a file holding one.
  std::string newick_text = tree_arg;
  if (std::ifstream probe(tree_arg); probe.good()) {
    newick_text = read_file(tree_arg);
  }
  const mqtc::LabeledTree t = mqtc::parse_newick(newick_text);

  const double cost = mqtc::tree_cost(t, d);
  const mqtc::CostBounds bounds = mqtc::cost_bounds(d);

  mqtc::RunReport report;
  report.n = d.size();
  report.mode = "verify";
  report.input_digest = mqtc::input_digest(d);
  report.best_cost = cost;
  report.normalized_score = mqtc::normalized_score(cost, bounds.lower, bounds.upper);
  report.newick = mqtc::to_newick(t);
  report.tool_version = std::string(mqtc::kToolVersion);
  std::cout << mqtc::to_json(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum quartet tree cost solver"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Find the minimum-cost tree for a matrix");
  solve->add_option("--input", solve_args.input, "Distance matrix file")->required();
  solve->add_option("--format", solve_args.format, "Input format: csv or phylip")
      ->check(CLI::IsMember({"csv", "phylip"}));
  solve->add_option("--mode", solve_args.mode, "Solver: exact or hill")
      ->check(CLI::IsMember({"exact", "hill"}));
  solve->add_option("--seed", solve_args.seed, "Hill climbing seed");
  solve->add_option("--restarts", solve_args.restarts, "Hill climbing restarts")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-steps", solve_args.max_steps, "Hill climbing steps per restart")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--output-tree", solve_args.output_tree, "Write the best tree (Newick)");
  solve->add_option("--output-report", solve_args.output_report, "Write the JSON report");

  int shapes_n = 0;
  bool shapes_list = false;
  CLI::App* shapes = app.add_subcommand("shapes", "Count non-isomorphic tree shapes");
  shapes->add_option("--n", shapes_n, "Number of leaves")
      ->required()
      ->check(CLI::Range(4, 1 << 20));
  shapes->add_flag("--list", shapes_list, "Emit a JSON report with codes and edges");

  std::string verify_input, verify_format = "csv", verify_tree;
  CLI::App* verify = app.add_subcommand("verify", "Recompute cost and score for a tree");
  verify->add_option("--input", verify_input, "Distance matrix file")->required();
  verify->add_option("--format", verify_format, "Input format: csv or phylip")
      ->check(CLI::IsMember({"csv", "phylip"}));
  verify->add_option("--tree", verify_tree, "Newick string or file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (shapes->parsed()) return run_shapes(shapes_n, shapes_list);
    return run_verify(verify_input, verify_format, verify_tree);
  } catch (const mqtc::ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const mqtc::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
