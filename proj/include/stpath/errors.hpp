#pragma once

#include <stdexcept>
#include <string>

namespace stpath {

// An internal-consistency failure of a property the theory guarantees
// (nested narrow cuts, admissible splitting pairs, parity, J \ P being a
// T-join). `check()` names the property.
class StructuralError : public std::logic_error {
 public:
  StructuralError(std::string check, const std::string& message)
      : std::logic_error(check + ": " + message), check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

}  // namespace stpath
