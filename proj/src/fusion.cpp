#include "ssvep/fusion.hpp"

#include <algorithm>
#include <sstream>

#include "ssvep/error.hpp"

namespace ssvep {

ScoreVector minmax_normalize(const ScoreVector& s) {
  if (!s.scores.allFinite()) throw Error("invalid-argument", "scores must be finite");
  ScoreVector out{Vector::Zero(s.scores.size()), s.decoder};
  if (s.scores.size() == 0) return out;
  const double lo = s.scores.minCoeff();
  const double hi = s.scores.maxCoeff();
  if (hi > lo) out.scores = (s.scores.array() - lo) / (hi - lo);
  return out;
}

FusionDecision fuse_and_decide(std::span<const ScoreVector> score_sets, const FusionConfig& cfg) {
  if (cfg.members.empty()) throw Error("invalid-argument", "fusion needs at least one member");
  FusionDecision d;
  Eigen::Index n = -1;
  for (const auto& s : score_sets) {
    if (n < 0) n = s.scores.size();
    if (s.scores.size() != n) {
      throw Error("length-mismatch", "score vectors differ in length");
    }
  }
  d.fused.decoder = "fusion";
  d.fused.scores = Vector::Zero(std::max<Eigen::Index>(n, 0));
  for (const auto& m : cfg.members) {
    auto it = std::find_if(score_sets.begin(), score_sets.end(),
                           [&](const ScoreVector& s) { return s.decoder == m; });
    if (it == score_sets.end()) throw Error("missing-member", "no scores for member '" + m + "'");
    d.fused.scores += minmax_normalize(*it).scores;
  }
  d.predicted = d.fused.argmax();
  return d;
}

std::vector<std::string> parse_members(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item != "net" && item != "etrca" && item != "tdca" && item != "fbcca") {
      throw Error("invalid-argument", "unknown fusion member '" + item + "'");
    }
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty()) throw Error("invalid-argument", "empty member list");
  return out;
}

}  // namespace ssvep
