#include <gtest/gtest.h>

#include <algorithm>

#include "gausstat/linalg.hpp"
#include "gausstat/state_engine.hpp"
#include "test_support.hpp"

using namespace gausstat;

namespace {

GaussianParams single(cplx alpha, cplx z, double n) {
  auto p = GaussianParams::vacuum(1);
  p.alpha(0) = alpha;
  p.squeeze(0, 0) = z;
  p.thermal(0) = n;
  return p;
}

// p0 = exp(-1/2 d^T (V + I/2)^{-1} d) / sqrt(det(V + I/2)) with quadrature covariance V.
double p0_quadrature(cplx alpha, cplx cov, double m) {
  // m = n - |alpha|^2 (centered number), cov centered <aa>
  Eigen::Matrix2d v;
  v(0, 0) = m + 0.5 + cov.real();
  v(1, 1) = m + 0.5 - cov.real();
  v(0, 1) = v(1, 0) = cov.imag();
  Eigen::Vector2d d(std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag());
  const Eigen::Matrix2d w = v + 0.5 * Eigen::Matrix2d::Identity();
  return std::exp(-0.5 * d.dot(w.inverse() * d)) / std::sqrt(w.determinant());
}

} // namespace

TEST(StateEngine, IdentityMap) {
  const auto map = bogoliubov_map(GaussianParams::vacuum(3));
  EXPECT_LT(linalg::max_abs(CMat(map.E - CMat::Identity(3, 3))), 1e-15);
  EXPECT_LT(linalg::max_abs(map.F), 1e-15);
  EXPECT_LT(map.disp.norm(), 1e-15);
}

TEST(StateEngine, SingleModeHyperbolics) {
  const auto map = bogoliubov_map(single(0.0, 0.5, 0.0));
  EXPECT_NEAR(map.E(0, 0).real(), 1.1276259652063807, 1e-12);
  EXPECT_NEAR(map.F(0, 0).real(), -0.5210953054937474, 1e-12);
}

TEST(StateEngine, SymplecticConditionRandom) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = testsupport::random_params(rng, 1 + t % 4, {1.0, 1.5, 1.0, 2.0});
    EXPECT_LT(symplectic_residual(bogoliubov_map(p)), 1e-10);
  }
}

TEST(StateEngine, ValidationErrors) {
  auto p = GaussianParams::vacuum(2);
  p.squeeze(0, 1) = 0.3;
  EXPECT_THROW(bogoliubov_map(p), Error);
  p = GaussianParams::vacuum(2);
  p.rotation(0, 1) = cplx(0.0, 0.4);
  p.rotation(1, 0) = cplx(0.0, 0.4);
  EXPECT_THROW(bogoliubov_map(p), Error);
  p = GaussianParams::vacuum(2);
  p.thermal(1) = -0.1;
  EXPECT_THROW(derive_moments(p), Error);
}

TEST(StateEngine, ThermalOnlyMoments) {
  auto p = GaussianParams::vacuum(2);
  p.thermal << 0.4, 1.1;
  const auto s = derive_moments(p);
  EXPECT_NEAR(s.nbar(0), 0.4, 1e-15);
  EXPECT_NEAR(s.nbar(1), 1.1, 1e-15);
  EXPECT_LT(linalg::max_abs(s.cov), 1e-15);
  EXPECT_LT(linalg::max_abs(CMat(s.g1 - CMat::Identity(2, 2))), 1e-15);
}

TEST(StateEngine, SqueezedThermalMoments) {
  const auto s = derive_moments(single(0.0, 0.5, 0.2));
  EXPECT_NEAR(s.cov(0, 0).real(), -1.4 * std::sinh(0.5) * std::cosh(0.5), 1e-13);
  EXPECT_NEAR(s.cov(0, 0).real(), -0.8227, 1e-4);
  EXPECT_NEAR(s.nbar(0), 0.5802, 1e-4);
  const double sh = std::sinh(0.5), ch = std::cosh(0.5);
  EXPECT_NEAR(s.nbar(0), sh * sh + 0.2 * (ch * ch + sh * sh), 1e-13);
}

TEST(StateEngine, SummaryMatchesKernelLowOrder) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const int m = 1 + t % 3;
    const auto p = testsupport::random_params(rng, m);
    const auto s = derive_moments(p);
    const auto tp = moment_table(p);
    for (const auto& w : testsupport::all_words(m, 1))
      EXPECT_LT(std::abs(gaussian_moment(w, tp) - gaussian_moment(w, moment_table(s))), 1e-10);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        EXPECT_LT(std::abs(gaussian_moment({cre(i), ann(j)}, tp) - s.coherence(i, j)), 1e-10);
        EXPECT_LT(std::abs(gaussian_moment({ann(i), ann(j)}, tp) - (s.cov(i, j) + s.alpha(i) * s.alpha(j))), 1e-10);
        EXPECT_LT(std::abs(gaussian_moment({ann(i), cre(j)}, tp) - gaussian_moment({ann(i), cre(j)}, moment_table(s))), 1e-10);
      }
  }
}

TEST(StateEngine, G2SpotValues) {
  EXPECT_NEAR(g2_tensor(derive_moments(single(cplx(0.3, 0.8), 0.0, 0.0)))(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(g2_tensor(derive_moments(single(0.0, 0.0, 0.9)))(0, 0), 2.0, 1e-12);
  const double g2 = g2_tensor(derive_moments(single(0.0, 0.5, 0.2)))(0, 0);
  EXPECT_NEAR(g2, 4.011, 1e-3);
  auto coh = GaussianParams::vacuum(2);
  coh.alpha << cplx(0.5, 0.1), cplx(-0.2, 0.7);
  const RMat g = g2_tensor(derive_moments(coh));
  EXPECT_LT((g - RMat::Ones(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StateEngine, UndefinedCorrelation) {
  auto p = GaussianParams::vacuum(2);
  p.thermal(0) = 0.5;
  const auto s = derive_moments(p);
  EXPECT_THROW(g2_tensor(s), Error);
  EXPECT_FALSE(g2_entry(s, 0, 1).has_value());
  EXPECT_TRUE(g2_entry(s, 0, 0).has_value());
  EXPECT_THROW(g3_tensor(s, {{0, 0, 1}}), Error);
}

TEST(StateEngine, G3SpotValues) {
  EXPECT_NEAR(*g3_entry(derive_moments(single(0.0, 0.0, 0.7)), 0, 0, 0), 6.0, 1e-12);
  const auto s = derive_moments(single(0.0, 0.5, 0.2));
  EXPECT_NEAR(*g3_entry(s, 0, 0, 0), 9.0 * *g2_entry(s, 0, 0) - 12.0, 1e-10);
  EXPECT_NEAR(*g3_entry(derive_moments(single(cplx(0.4, -1.0), 0.0, 0.0)), 0, 0, 0), 1.0, 1e-12);
}

TEST(StateEngine, ClosedFormCorrelationsMatchKernel) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    const int m = 1 + t % 3;
    const auto p = testsupport::random_params(rng, m, {1.0, 0.9, 0.6, 1.0});
    const auto s = derive_moments(p);
    const auto tab = moment_table(p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        EXPECT_NEAR(*g2_entry(s, i, j), g2_from_kernel(tab, i, j), 1e-10);
        for (int k = 0; k < m; ++k) EXPECT_NEAR(*g3_entry(s, i, j, k), g3_from_kernel(tab, i, j, k), 1e-9);
      }
  }
}

TEST(StateEngine, G3PermutationSymmetric) {
  std::mt19937_64 rng(29);
  const auto s = derive_moments(testsupport::random_params(rng, 3));
  Triple t{0, 1, 2};
  const double ref = *g3_entry(s, 0, 1, 2);
  std::sort(t.begin(), t.end());
  do {
    EXPECT_NEAR(*g3_entry(s, t[0], t[1], t[2]), ref, 1e-12);
  } while (std::next_permutation(t.begin(), t.end()));
}

TEST(StateEngine, NoClickSpotValues) {
  EXPECT_NEAR(no_click_probability_single(GaussianParams::vacuum(1)), 1.0, 1e-15);
  EXPECT_NEAR(no_click_probability_single(single(0.0, 0.0, 1.0)), 0.5, 1e-15);
  EXPECT_THROW(no_click_probability_single(GaussianParams::vacuum(2)), Error);
}

TEST(StateEngine, NoClickMatchesQuadratureFormula) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto p = testsupport::random_params(rng, 1, {1.5, 1.2, 1.0, 1.0});
    const auto s = derive_moments(p);
    const double ref = p0_quadrature(s.alpha(0), s.cov(0, 0), s.nbar(0) - std::norm(s.alpha(0)));
    EXPECT_NEAR(no_click_probability_single(p), ref, 1e-12);
  }
}

TEST(StateEngine, BeamSplitterDuplicate) {
  auto coh = single(cplx(0.3, 0.4), 0.0, 0.0);
  auto [plus, minus] = balanced_beamsplitter_duplicate(coh);
  EXPECT_NEAR(std::abs(plus.alpha(0) - std::sqrt(2.0) * coh.alpha(0)), 0.0, 1e-15);
  EXPECT_NEAR(derive_moments(minus).nbar(0), 0.0, 1e-15);

  auto dst = single(std::polar(0.3, 0.7), std::polar(0.4, 0.2), 0.1);
  auto [p2, m2] = balanced_beamsplitter_duplicate(dst);
  const auto s = derive_moments(dst), sp = derive_moments(p2), sm = derive_moments(m2);
  EXPECT_NEAR(*g3_entry(sm, 0, 0, 0), 9.0 * *g2_entry(sm, 0, 0) - 12.0, 1e-10);
  EXPECT_NEAR(sp.nbar(0) - sm.nbar(0), 2.0 * std::norm(dst.alpha(0)), 1e-12);
  EXPECT_NEAR(s.nbar(0) - sm.nbar(0), std::norm(dst.alpha(0)), 1e-12);
  EXPECT_LT(std::abs(sp.cov(0, 0) - s.cov(0, 0)), 1e-14);
  EXPECT_LT(std::abs(sm.cov(0, 0) - s.cov(0, 0)), 1e-14);
}

TEST(StateEngine, LossInvariance) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 20; ++t) {
    const int m = 1 + t % 3;
    const auto s = derive_moments(testsupport::random_params(rng, m));
    for (double eta : {0.5, 0.1}) {
      const auto l = apply_uniform_loss(s, eta);
      EXPECT_LT((g2_tensor(l) - g2_tensor(s)).cwiseAbs().maxCoeff(), 1e-9);
      for (const auto& tr : sorted_triples(m))
        EXPECT_NEAR(*g3_entry(l, tr[0], tr[1], tr[2]), *g3_entry(s, tr[0], tr[1], tr[2]), 1e-9);
      EXPECT_NEAR(l.nbar.sum(), eta * s.nbar.sum(), 1e-12);
    }
  }
  EXPECT_THROW(apply_uniform_loss(derive_moments(GaussianParams::vacuum(1)), 0.0), Error);
}

TEST(StateEngine, GlobalRotationInvariance) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    const int m = 2 + t % 2;
    auto p = testsupport::random_params(rng, m);
    auto q = p;
    q.rotation += 0.83 * CMat::Identity(m, m);
    const auto s = derive_moments(p), sq = derive_moments(q);
    EXPECT_LT((g2_tensor(s) - g2_tensor(sq)).cwiseAbs().maxCoeff(), 1e-10);
    for (const auto& tr : sorted_triples(m))
      EXPECT_NEAR(*g3_entry(s, tr[0], tr[1], tr[2]), *g3_entry(sq, tr[0], tr[1], tr[2]), 1e-10);
  }
}

TEST(StateEngine, SingleModePhysicalityBound) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double n = t % 5 == 0 ? 0.0 : 1.5 * u(rng);
    const auto p = single(std::polar(2.0 * u(rng), 6.3 * u(rng)), std::polar(1.5 * u(rng), 6.3 * u(rng)), n);
    const auto s = derive_moments(p);
    const double mm = s.nbar(0) - std::norm(s.alpha(0));
    const double bound = mm * (mm + 1.0);
    const double c2 = std::norm(s.cov(0, 0));
    EXPECT_LE(c2, bound + 1e-10 * (1.0 + bound));
    if (n == 0.0) EXPECT_NEAR(c2, bound, 1e-9 * (1.0 + bound));
    else EXPECT_LT(c2, bound);
  }
}
