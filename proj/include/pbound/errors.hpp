#pragma once

#include <stdexcept>
#include <string>

namespace pbound {

/// Raised when an iterative evaluation (series, quadrature) exhausts its budget.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pbound
