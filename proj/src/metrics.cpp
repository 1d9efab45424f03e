#include "ssvep/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ssvep/error.hpp"

namespace ssvep {

double itr(int classes, double p, double t) {
  if (classes < 2 || !(t > 0.0) || !(p >= 0.0 && p <= 1.0)) {
    throw Error("invalid-arguments", "itr needs classes >= 2, t > 0 and p in [0, 1]");
  }
  const double m = classes;
  if (p == 1.0 / m) return 0.0;  // chance carries no information; avoids round-off
  double bits = std::log2(m);
  if (p > 0.0) bits += p * std::log2(p);
  if (p < 1.0) bits += (1.0 - p) * std::log2((1.0 - p) / (m - 1.0));
  return std::max(0.0, bits * 60.0 / t);
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe r;
  r.n = static_cast<int>(values.size());
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / r.n;
  if (r.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (r.n - 1)) / std::sqrt(static_cast<double>(r.n));
  }
  return r;
}

}  // namespace ssvep
