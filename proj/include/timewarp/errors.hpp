#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace timewarp {

/// The discretized problem has no feasible warp (empty bounds, no admissible
/// transition, or no path reaching the terminal stage). Bad arguments use
/// std::invalid_argument instead.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what, std::optional<long> stage = std::nullopt)
      : std::runtime_error(what), stage_(stage) {}

  /// Zero-based stage index where infeasibility was detected, if known.
  std::optional<long> stage() const { return stage_; }

 private:
  std::optional<long> stage_;
};

}  // namespace timewarp
