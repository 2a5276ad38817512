#pragma once

#include <stdexcept>
#include <string>

namespace mqtc {

/// Malformed or semantically invalid input (matrices, trees, reports).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured size ceiling would be exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mqtc
