#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace nambu {

/// Contract violation raised by any engine operation (chart mismatch, arity,
/// unsupported input, failed precondition). When a precondition fails because
/// of a concrete counterexample, the counterexample is carried as canonical
/// text in `witness()`.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  Error(const std::string& what, std::string witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}

  const std::optional<std::string>& witness() const { return witness_; }

 private:
  std::optional<std::string> witness_;
};

}  // namespace nambu
