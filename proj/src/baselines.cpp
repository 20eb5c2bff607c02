#include "nneten/baselines.hpp"

namespace nneten {

std::string_view to_string(EstimateFlag flag) noexcept {
  switch (flag) {
    case EstimateFlag::None: return "none";
    case EstimateFlag::ZeroVariance: return "zero-variance";
    case EstimateFlag::NoMatches: return "no-matches";
  }
  return "unknown";
}

}  // namespace nneten
