#pragma once

#include <span>
#include <string>
#include <vector>

#include "ssvep/decoders.hpp"

namespace ssvep {

struct FusionConfig {
  std::vector<std::string> members{"net", "etrca", "tdca"};
};

// (s - min) / (max - min); a constant vector maps to all zeros.
ScoreVector minmax_normalize(const ScoreVector& s);

struct FusionDecision {
  int predicted = 0;
  ScoreVector fused;
};

// Sums the normalised score vectors whose decoder id is a member and takes the
// argmax (lowest index on ties). Throws "missing-member", "length-mismatch".
FusionDecision fuse_and_decide(std::span<const ScoreVector> score_sets, const FusionConfig& cfg);

std::vector<std::string> parse_members(const std::string& csv);

}  // namespace ssvep
