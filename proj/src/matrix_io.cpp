#include "mqtc/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <vector>

#include "mqtc/digest.hpp"
#include "mqtc/errors.hpp"

namespace mqtc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

double parse_real(std::string_view token, int row, int col) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.begin(), token.end(), value);
  if (ec != std::errc() || ptr != token.end()) {
    throw FormatError("matrix: cell (" + std::to_string(row) + "," + std::to_string(col) +
                      ") is not a number: \"" + std::string(token) + "\"");
  }
  return value;
}

DistanceMatrix parse_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw FormatError("csv: empty input");
  }

  auto split_cells = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string_view::npos) end = line.size();
      cells.push_back(trim(line.substr(start, end - start)));
      start = end + 1;
    }
    return cells;
  };

  std::vector<std::string> labels;
  for (auto cell : split_cells(lines[0])) labels.emplace_back(cell);
  const int n = static_cast<int>(labels.size());
  if (static_cast<int>(lines.size()) != n + 1) {
    throw FormatError("csv: expected " + std::to_string(n) + " value rows after the header, got " +
                      std::to_string(lines.size() - 1));
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const auto cells = split_cells(lines[i + 1]);
    if (static_cast<int>(cells.size()) != n) {
      throw FormatError("csv: row " + std::to_string(i + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) values.push_back(parse_real(cells[j], i, j));
  }
  return DistanceMatrix(std::move(labels), std::move(values));
}

DistanceMatrix parse_phylip(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw FormatError("phylip: empty input");
  }

  int n = 0;
  {
    const auto header = trim(lines[0]);
    const auto [ptr, ec] = std::from_chars(header.begin(), header.end(), n);
    if (ec != std::errc() || ptr != header.end() || n <= 0) {
      throw FormatError("phylip: first line must hold the object count");
    }
  }
  if (static_cast<int>(lines.size()) != n + 1) {
    throw FormatError("phylip: expected " + std::to_string(n) + " rows after the count, got " +
                      std::to_string(lines.size() - 1));
  }

  std::vector<std::string> labels;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    std::istringstream row{std::string(lines[i + 1])};
    std::string label;
    row >> label;
    labels.push_back(label);
    for (int j = 0; j < n; ++j) {
      std::string token;
      if (!(row >> token)) {
        throw FormatError("phylip: row \"" + label + "\" has fewer than " + std::to_string(n) +
                          " values");
      }
      values.push_back(parse_real(token, i, j));
    }
    std::string extra;
    if (row >> extra) {
      throw FormatError("phylip: row \"" + label + "\" has more than " + std::to_string(n) +
                        " values");
    }
  }
  return DistanceMatrix(std::move(labels), std::move(values));
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DistanceMatrix parse_distance_matrix(const std::string& text, MatrixFormat format) {
  if (trim(text).empty()) {
    throw FormatError("matrix: empty input");
  }
  return format == MatrixFormat::kCsv ? parse_csv(text) : parse_phylip(text);
}

std::string write_csv(const DistanceMatrix& d) {
  const int n = d.size();
  std::string out;
  for (int j = 0; j < n; ++j) {
    if (j) out += ',';
    out += d.labels()[j];
  }
  out += '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out += ',';
      out += format_value(d.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string write_phylip(const DistanceMatrix& d) {
  const int n = d.size();
  std::string out = std::to_string(n) + "\n";
  for (int i = 0; i < n; ++i) {
    out += d.labels()[i];
    for (int j = 0; j < n; ++j) {
      out += ' ';
      out += format_value(d.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string input_digest(const DistanceMatrix& d) {
  const int n = d.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return d.labels()[a] < d.labels()[b]; });

  std::string canonical;
  for (int i = 0; i < n; ++i) {
    if (i) canonical += ',';
    canonical += d.labels()[order[i]];
  }
  canonical += '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) canonical += ',';
      canonical += format_value(d.at(order[i], order[j]));
    }
    canonical += '\n';
  }
  return sha256_hex(canonical);
}

}  // namespace mqtc
