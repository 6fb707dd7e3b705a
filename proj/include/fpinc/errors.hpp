#pragma once

#include <stdexcept>
#include <string>

namespace fpinc {

/// Caller supplied malformed arguments (dimension mismatch, missing parameter, bad name).
class usage_error : public std::invalid_argument {
 public:
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Mathematically undefined request, e.g. inverting zero or dividing by a zero magnitude.
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Geometric input that does not determine the requested object (coincident points etc).
class degenerate_input_error : public std::invalid_argument {
 public:
  explicit degenerate_input_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fpinc
