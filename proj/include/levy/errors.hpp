#pragma once

#include <stdexcept>
#include <string>

namespace levy {

// A numerical iteration hit its cap without meeting its stopping rule.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A series truncation cap was reached before the tail-mass target.
class SeriesCapError : public std::runtime_error {
 public:
  explicit SeriesCapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levy
