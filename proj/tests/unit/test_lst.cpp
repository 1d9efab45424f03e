#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "ssvep/lst.hpp"

using namespace ssvep;
using testing::error_code_of;
using testing::gaussian;
using testing::rel_err;

namespace {

std::vector<StimulusSpec> stimuli(int n) {
  std::vector<StimulusSpec> s;
  for (int t = 0; t < n; ++t) s.push_back({t, 8.0 + t, 0.5 * std::numbers::pi * t});
  return s;
}

}  // namespace

TEST_SUITE("lst") {
  TEST_CASE("self-mapping gives the identity, scaling gives 0.5 I") {
    const Matrix x = gaussian(6, 120, 1);
    CHECK((lst_solve(x, x).data - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((lst_solve(x, 2.0 * x).data - 0.5 * Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("noiseless recovery of a random 4 x 8 map") {
    const Matrix a = gaussian(4, 8, 2);
    const Matrix x2 = gaussian(8, 200, 3);
    const auto p = lst_solve(a * x2, x2);
    CHECK(p.target_dim() == 4);
    CHECK(p.source_dim() == 8);
    CHECK(rel_err(p.data, a) < 1e-9);
  }

  TEST_CASE("first-order optimality under 200 random perturbations") {
    const Matrix x1 = gaussian(5, 150, 4);
    const Matrix x2 = gaussian(7, 150, 5);
    const Matrix p = lst_solve(x1, x2).data;
    const double base = (x1 - p * x2).norm();
    for (int k = 0; k < 200; ++k) {
      Matrix dp = gaussian(5, 7, 100 + static_cast<std::uint64_t>(k));
      dp *= 1e-3 / dp.norm();
      CHECK((x1 - (p + dp) * x2).norm() >= base);
    }
  }

  TEST_CASE("ill-conditioned source falls back to ridge and stays finite") {
    Matrix x2 = gaussian(6, 100, 6);
    x2.row(5) = x2.row(4);  // rank deficient
    const Matrix x1 = gaussian(3, 100, 7);
    const auto p = lst_solve(x1, x2);
    CHECK(p.data.allFinite());
    // ridge splits the weight evenly between the duplicated rows
    CHECK(p.data.col(4).isApprox(p.data.col(5), 1e-6));
    // fewer samples than source rows: still a finite ridge solution
    CHECK(lst_solve(gaussian(2, 4, 8), gaussian(6, 4, 9)).data.allFinite());
  }

  TEST_CASE("degenerate and mismatched inputs") {
    CHECK(error_code_of([] { lst_solve(gaussian(2, 10, 1), Matrix::Zero(3, 10)); }) == "degenerate-input");
    CHECK(error_code_of([] { lst_solve(gaussian(2, 10, 1), gaussian(3, 11, 2)); }) == "dim-mismatch");
  }

  TEST_CASE("one-shot transforms: the class mean of one trial is the trial") {
    const auto refs = template_bank(stimuli(3), 2, 250.0, 100);
    TrialsByClass trials(3);
    for (int t = 0; t < 3; ++t) trials[static_cast<std::size_t>(t)].push_back(gaussian(5, 100, 10 + static_cast<std::uint64_t>(t)));
    const auto ps = estimate_stimulus_transforms(trials, refs);
    REQUIRE(ps.size() == 3);
    for (int t = 0; t < 3; ++t) {
      const auto& p = ps[static_cast<std::size_t>(t)];
      CHECK(p.stimulus == t);
      CHECK(p.data.rows() == 4);
      CHECK(p.data.cols() == 5);
      CHECK(p.data.isApprox(lst_solve(refs[static_cast<std::size_t>(t)].data, trials[static_cast<std::size_t>(t)][0]).data));
    }
    CHECK(class_mean(std::vector<Matrix>{trials[0][0]}) == trials[0][0]);
  }

  TEST_CASE("noiseless round trip with N_c = 12, 2N_h = 10") {
    const auto refs = template_bank(stimuli(4), 5, 250.0, 250);
    TrialsByClass trials(4);
    for (int t = 0; t < 4; ++t) {
      const Matrix a = gaussian(12, 10, 20 + static_cast<std::uint64_t>(t));
      trials[static_cast<std::size_t>(t)].push_back(a * refs[static_cast<std::size_t>(t)].data);
      trials[static_cast<std::size_t>(t)].push_back(a * refs[static_cast<std::size_t>(t)].data);
    }
    const auto ps = estimate_stimulus_transforms(trials, refs);
    for (int t = 0; t < 4; ++t) {
      const Matrix back = ps[static_cast<std::size_t>(t)].data * trials[static_cast<std::size_t>(t)][0];
      CHECK(rel_err(back, refs[static_cast<std::size_t>(t)].data) < 1e-8);
    }
  }

  TEST_CASE("an empty class is reported by index") {
    const auto refs = template_bank(stimuli(3), 2, 250.0, 50);
    TrialsByClass trials(3);
    trials[0].push_back(gaussian(4, 50, 1));
    trials[2].push_back(gaussian(4, 50, 2));
    try {
      estimate_stimulus_transforms(trials, refs);
      FAIL("expected missing-class");
    } catch (const Error& e) {
      CHECK(e.code() == "missing-class");
      CHECK(std::string(e.what()).find("stimulus 1") != std::string::npos);
    }
  }

  TEST_CASE("MLST stack shape, zero transforms and a naive product oracle") {
    std::vector<LstMatrix> ps;
    for (int t = 0; t < 40; ++t) ps.push_back({gaussian(10, 9, 50 + static_cast<std::uint64_t>(t)), t});
    const Matrix x = gaussian(9, 125, 3);
    const auto stack = mlst_transform(x, ps);
    REQUIRE(stack.transformed.size() == 40);
    for (const auto& m : stack.transformed) {
      CHECK(m.rows() == 10);
      CHECK(m.cols() == 125);
    }
    for (int t : {0, 17, 39}) {
      const Matrix& p = ps[static_cast<std::size_t>(t)].data;
      Matrix naive = Matrix::Zero(10, 125);
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 125; ++j)
          for (int k = 0; k < 9; ++k) naive(i, j) += p(i, k) * x(k, j);
      CHECK((stack.transformed[static_cast<std::size_t>(t)] - naive).cwiseAbs().maxCoeff() < 1e-12);
    }
    std::vector<LstMatrix> zeros(3, LstMatrix{Matrix::Zero(10, 9), std::nullopt});
    for (const auto& m : mlst_transform(x, zeros).transformed) CHECK(m.isZero(0.0));
    std::vector<LstMatrix> wrong{{Matrix::Zero(10, 8), std::nullopt}};
    CHECK(error_code_of([&] { mlst_transform(x, wrong); }) == "dim-mismatch");
  }

  TEST_CASE("MLST is linear and ignores the label") {
    std::vector<LstMatrix> ps{{gaussian(4, 3, 1), 0}, {gaussian(4, 3, 2), 1}};
    Epoch a, b;
    a.data = gaussian(3, 40, 3);
    a.stimulus = 1;
    b.data = gaussian(3, 40, 4);
    Epoch unl = a;
    unl.stimulus = kUnlabeled;
    const auto sa = mlst_transform(a, ps);
    const auto su = mlst_transform(unl, ps);
    const auto sb = mlst_transform(b, ps);
    const auto sab = mlst_transform(Matrix(2.0 * a.data - 3.0 * b.data), ps);
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(sa.transformed[t] == su.transformed[t]);
      CHECK(rel_err(sab.transformed[t], 2.0 * sa.transformed[t] - 3.0 * sb.transformed[t]) < 1e-12);
    }
  }

  TEST_CASE("SAME: counts, zero-noise copies, determinism and fixed point") {
    const auto refs = template_bank(stimuli(3), 3, 250.0, 200);
    TrialsByClass calib(3);
    for (int t = 0; t < 3; ++t) calib[static_cast<std::size_t>(t)].push_back(gaussian(5, 200, 30 + static_cast<std::uint64_t>(t)));

    SameOptions o;
    o.seed = 77;
    const auto r = same_augment(calib, refs, o);
    REQUIRE(r.artificial.size() == 3);
    REQUIRE(r.aliasing.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(r.artificial[t].size() == 3);  // + 1 real trial = 4 per class
      CHECK(r.aliasing[t].data.rows() == 5);
      CHECK(r.aliasing[t].data.cols() == 6);
      CHECK(r.aliasing[t].stimulus == static_cast<int>(t));
    }
    const auto r2 = same_augment(calib, refs, o);
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t k = 0; k < 3; ++k) CHECK(r.artificial[t][k] == r2.artificial[t][k]);

    o.noise_level = 0.0;
    const auto clean = same_augment(calib, refs, o);
    for (std::size_t t = 0; t < 3; ++t) {
      const Matrix rt = clean.aliasing[t].data * refs[t].data;
      for (const auto& a : clean.artificial[t]) CHECK(a == rt);
      // fixed point: re-estimating from R_t returns the same aliasing matrix
      CHECK(rel_err(lst_solve(rt, refs[t].data).data, clean.aliasing[t].data) < 1e-8);
    }
  }

  TEST_CASE("SAME noise scale follows each channel's spread") {
    const auto refs = template_bank(stimuli(2), 2, 250.0, 2000);
    TrialsByClass calib(2);
    Matrix x = gaussian(2, 2000, 1);
    x.row(1) *= 10.0;
    calib[0].push_back(x);
    calib[1].push_back(x);
    SameOptions o;
    o.n_aug = 1;
    o.noise_level = 0.5;
    o.seed = 3;
    const auto r = same_augment(calib, refs, o);
    const Matrix rt = r.aliasing[0].data * refs[0].data;
    const Matrix noise = r.artificial[0][0] - rt;
    for (Eigen::Index c = 0; c < 2; ++c) {
      const double sd_r = std::sqrt((rt.row(c).array() - rt.row(c).mean()).square().mean());
      const double sd_n = std::sqrt((noise.row(c).array() - noise.row(c).mean()).square().mean());
      CHECK(sd_n == doctest::Approx(0.5 * sd_r).epsilon(0.1));
    }
  }
}
