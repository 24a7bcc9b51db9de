#pragma once

#include <stdexcept>

namespace expanse {

/// A computation would exceed its configured step or sample budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace expanse
