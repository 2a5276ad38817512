#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mqtc {

/// Machine-readable run summary emitted by the CLI. Serializes to a single
/// JSON document with exactly these keys in this order; costs are printed
/// with 17 significant digits so the doubles round-trip losslessly.
struct RunReport {
  int n = 0;
  std::string mode;  // "exact", "hill" or "verify"
  std::string input_digest;
  double best_cost = 0.0;
  double normalized_score = 0.0;
  std::string newick;
  std::uint64_t shapes_evaluated = 0;
  std::uint64_t assignments_evaluated = 0;
  std::int64_t elapsed_ms = 0;
  std::optional<std::uint64_t> seed;  // present in hill mode only
  std::string tool_version;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string to_json(const RunReport& report);

/// Inverse of to_json; throws FormatError on malformed documents.
RunReport report_from_json(const std::string& json);

}  // namespace mqtc
