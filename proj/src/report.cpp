#include "mqtc/report.hpp"

#include <json.hpp>

#include <cstdio>

#include "mqtc/errors.hpp"

namespace mqtc {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string format_cost(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// Hand-written emitter: key order and number formatting are part of the
// byte-level determinism contract, which nlohmann's serializer does not pin.
std::string to_json(const RunReport& r) {
  std::string out = "{\n";
  out += "  \"n\": " + std::to_string(r.n) + ",\n";
  out += "  \"mode\": \"" + json_escape(r.mode) + "\",\n";
  out += "  \"input_digest\": \"" + json_escape(r.input_digest) + "\",\n";
  out += "  \"best_cost\": " + format_cost(r.best_cost) + ",\n";
  out += "  \"normalized_score\": " + format_cost(r.normalized_score) + ",\n";
  out += "  \"newick\": \"" + json_escape(r.newick) + "\",\n";
  out += "  \"shapes_evaluated\": " + std::to_string(r.shapes_evaluated) + ",\n";
  out += "  \"assignments_evaluated\": " + std::to_string(r.assignments_evaluated) + ",\n";
  out += "  \"elapsed_ms\": " + std::to_string(r.elapsed_ms) + ",\n";
  if (r.seed) {
    out += "  \"seed\": " + std::to_string(*r.seed) + ",\n";
  }
  out += "  \"tool_version\": \"" + json_escape(r.tool_version) + "\"\n";
  out += "}\n";
  return out;
}

RunReport report_from_json(const std::string& json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  try {
    RunReport r;
    r.n = doc.at("n").get<int>();
    r.mode = doc.at("mode").get<std::string>();
    r.input_digest = doc.at("input_digest").get<std::string>();
    r.best_cost = doc.at("best_cost").get<double>();
    r.normalized_score = doc.at("normalized_score").get<double>();
    r.newick = doc.at("newick").get<std::string>();
    r.shapes_evaluated = doc.at("shapes_evaluated").get<std::uint64_t>();
    r.assignments_evaluated = doc.at("assignments_evaluated").get<std::uint64_t>();
    r.elapsed_ms = doc.at("elapsed_ms").get<std::int64_t>();
    if (doc.contains("seed")) r.seed = doc.at("seed").get<std::uint64_t>();
    r.tool_version = doc.at("tool_version").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

}  // namespace mqtc
