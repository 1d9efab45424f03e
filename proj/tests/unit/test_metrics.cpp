#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ssvep/metrics.hpp"

using namespace ssvep;
using testing::error_code_of;

TEST_SUITE("metrics") {
  TEST_CASE("ITR closed forms") {
    for (int m : {2, 4, 8, 12, 40}) CHECK(itr(m, 1.0 / m, 1.0) == 0.0);
    CHECK(std::abs(itr(40, 1.0, 1.0) - 319.31) < 0.01);
    CHECK(itr(40, 1.0, 1.0) == doctest::Approx(60.0 * std::log2(40.0)).epsilon(1e-14));
    CHECK(itr(2, 0.0, 1.0) == doctest::Approx(60.0).epsilon(1e-14));
    CHECK(itr(4, 0.1, 1.0) >= 0.0);
  }

  TEST_CASE("ITR monotone on a 50-point grid") {
    for (int m : {4, 12, 40}) {
      for (int i = 0; i < 50; ++i) {
        const double p = 1.0 / m + (1.0 - 1.0 / m) * i / 49.0;
        const double t = 0.6 + 0.05 * i;
        if (i > 0) {
          const double p_prev = 1.0 / m + (1.0 - 1.0 / m) * (i - 1) / 49.0;
          CHECK(itr(m, p, 1.0) >= itr(m, p_prev, 1.0));
          CHECK(itr(m, 0.9, t) <= itr(m, 0.9, t - 0.05));
        }
      }
    }
  }

  TEST_CASE("ITR argument errors") {
    CHECK(error_code_of([] { itr(1, 0.5, 1.0); }) == "invalid-arguments");
    CHECK(error_code_of([] { itr(4, 1.1, 1.0); }) == "invalid-arguments");
    CHECK(error_code_of([] { itr(4, 0.5, 0.0); }) == "invalid-arguments");
    CHECK(error_code_of([] { itr(4, std::nan(""), 1.0); }) == "invalid-arguments");
  }

  TEST_CASE("mean and standard error against a two-pass oracle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(40.0, 100.0);
    for (int n : {2, 3, 10, 35}) {
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = u(rng);
      long double mean = 0;
      for (double x : v) mean += x;
      mean /= n;
      long double ss = 0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double se = static_cast<double>(std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<long double>(n)));
      const auto r = mean_and_se(v);
      CHECK(r.n == n);
      CHECK(std::abs(r.mean - static_cast<double>(mean)) < 1e-12);
      CHECK(std::abs(r.se - se) < 1e-12);
    }
    const std::vector<double> one{3.0};
    CHECK(mean_and_se(one).se == 0.0);
  }
}
