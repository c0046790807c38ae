#pragma once

#include <stdexcept>
#include <string>

namespace erw {

// Raised when a request exceeds the memory/time budget of an operation
// (oversized DP horizons, runaway samplers). Distinct from precondition
// violations, which use std::invalid_argument.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace erw
