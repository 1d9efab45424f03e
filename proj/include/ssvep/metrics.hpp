#pragma once

#include <span>

namespace ssvep {

inline constexpr double kGazeShiftSeconds = 0.5;

// Wolpaw information transfer rate in bits/min for `classes` targets, accuracy
// p in [0, 1] and selection time in seconds. 0 log 0 := 0; negative values are
// clamped to 0. Throws "invalid-arguments".
double itr(int classes, double p, double selection_seconds);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample std / sqrt(n); 0 for n < 2
  int n = 0;
};

MeanSe mean_and_se(std::span<const double> values);

}  // namespace ssvep
