#include <gtest/gtest.h>

#include "gausstat/fock_oracle.hpp"
#include "gausstat/linalg.hpp"
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

FockOptions cut(int d) {
  FockOptions o;
  o.cutoff = d;
  return o;
}

} // namespace

TEST(FockOracle, VacuumProjector) {
  const auto rho = build_density(GaussianParams::vacuum(2), cut(6));
  EXPECT_NEAR(vacuum_overlap(rho), 1.0, 1e-14);
  EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(moment_bruteforce(rho, {cre(0), ann(1)})), 0.0, 1e-14);
  EXPECT_NEAR(rho.trace_deficit, 0.0, 1e-14);
}

TEST(FockOracle, ThermalGeometricDiagonal) {
  const auto rho = build_density(single(0.0, 0.0, 0.5), cut(40));
  for (int n = 0; n < 40; ++n)
    EXPECT_NEAR(rho.matrix(n, n).real(), std::pow(0.5 / 1.5, n) / 1.5, 1e-15);
  EXPECT_NEAR(vacuum_overlap(build_density(single(0.0, 0.0, 1.0), cut(60))), 0.5, 1e-14);
}

TEST(FockOracle, SqueezedVacuumPhotonNumber) {
  const auto rho = build_density(single(0.0, 0.5, 0.0), cut(40));
  EXPECT_NEAR(moment_bruteforce(rho, {cre(0), ann(0)}).real(), std::pow(std::sinh(0.5), 2), 1e-10);
}

TEST(FockOracle, CoherentMean) {
  const auto rho = build_density(single(0.3, 0.0, 0.0), cut(25));
  EXPECT_NEAR(std::abs(moment_bruteforce(rho, {ann(0)}) - 0.3), 0.0, 1e-12);
}

TEST(FockOracle, HermitianPositiveTrace) {
  std::mt19937_64 rng(2);
  const auto p = testsupport::random_params(rng, 2, {0.4, 0.3, 0.2, 1.0});
  const auto rho = build_density(p, cut(14));
  EXPECT_LT(linalg::max_abs(CMat(rho.matrix - rho.matrix.adjoint())), 1e-10);
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.matrix);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
  EXPECT_LE(rho.matrix.trace().real(), 1.0 + 1e-12);
  EXPECT_GE(rho.matrix.trace().real(), 1.0 - rho.trace_deficit - 1e-12);
}

TEST(FockOracle, TraceDeficitDecreasesWithCutoff) {
  auto opts = cut(4);
  opts.deficit_threshold = 1.0;
  const auto p = single(std::polar(0.8, 0.3), std::polar(0.6, 1.0), 0.4);
  double prev = 2.0;
  for (int d = 4; d <= 40; d += 4) {
    opts.cutoff = d;
    const double def = build_density(p, opts).trace_deficit;
    EXPECT_LT(def, prev);
    prev = def;
  }
  EXPECT_THROW(build_density(p, cut(6)), Error);
}

TEST(FockOracle, ModeLimits) {
  EXPECT_THROW(build_density(GaussianParams::vacuum(4), cut(2)), Error);
  FockOptions big = cut(20);
  EXPECT_THROW(build_density(GaussianParams::vacuum(3), big), Error);
  EXPECT_EQ(default_cutoff(1), 25);
  EXPECT_EQ(default_cutoff(2), 12);
  EXPECT_EQ(default_cutoff(3), 8);
}

TEST(FockOracle, MomentsMatchKernelWithinValidityMargin) {
  std::mt19937_64 rng(19);
  struct Case {
    int modes, cutoff;
    testsupport::Ranges rg;
  };
  const Case cases[] = {{1, 60, {0.8, 0.7, 0.5, 1.0}}, {2, 20, {0.3, 0.25, 0.1, 1.0}}, {3, 9, {0.08, 0.06, 0.01, 1.0}}};
  for (const auto& c : cases) {
    for (int t = 0; t < 3; ++t) {
      const auto p = testsupport::random_params(rng, c.modes, c.rg);
      const auto s = derive_moments(p);
      ASSERT_LT(s.nbar.sum(), c.cutoff / 4.0);
      const auto rho = build_density(p, cut(c.cutoff));
      const auto tab = moment_table(p);
      std::vector<LadderWord> words;
      for (int len : {1, 2, 4}) {
        auto w = testsupport::all_words(c.modes, len);
        words.insert(words.end(), w.begin(), w.end());
      }
      std::uniform_int_distribution<int> pick(0, 2 * c.modes - 1);
      for (int k = 0; k < 200; ++k) {
        LadderWord w(6);
        for (auto& op : w) {
          const int sidx = pick(rng);
          op = sidx < c.modes ? ann(sidx) : cre(sidx - c.modes);
        }
        words.push_back(w);
      }
      const auto bf = moments_bruteforce(rho, words);
      for (std::size_t k = 0; k < words.size(); ++k) {
        const cplx g = gaussian_moment(words[k], tab);
        EXPECT_LT(std::abs(g - bf[k]) / (1.0 + std::abs(g)), 1e-6) << "modes " << c.modes << " word " << k;
      }
    }
  }
}

TEST(FockOracle, CorrelationTensorsMatchOracle) {
  std::mt19937_64 rng(47);
  auto p = testsupport::random_params(rng, 2, {0.4, 0.3, 0.15, 1.0});
  const auto s = derive_moments(p);
  const auto rho = build_density(p, cut(20));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_LT(std::abs(moment_bruteforce(rho, {cre(i), ann(j)}) - s.coherence(i, j)), 1e-6);
      EXPECT_LT(std::abs(moment_bruteforce(rho, {ann(i), ann(j)}) - s.cov(i, j) - s.alpha(i) * s.alpha(j)), 1e-6);
      const double g2 = moment_bruteforce(rho, {cre(i), cre(j), ann(i), ann(j)}).real() / (s.nbar(i) * s.nbar(j));
      EXPECT_NEAR(g2, *g2_entry(s, i, j), 1e-6);
    }
  const double g3 = moment_bruteforce(rho, {cre(0), cre(0), cre(1), ann(0), ann(0), ann(1)}).real() /
                    (s.nbar(0) * s.nbar(0) * s.nbar(1));
  EXPECT_NEAR(g3, *g3_entry(s, 0, 0, 1), 1e-6);
}

TEST(FockOracle, ThreeModeG3Distinct) {
  std::mt19937_64 rng(53);
  auto p = testsupport::random_params(rng, 3, {0.2, 0.12, 0.03, 1.0});
  const auto s = derive_moments(p);
  const auto rho = build_density(p, cut(8));
  const double g3 = moment_bruteforce(rho, {cre(0), cre(1), cre(2), ann(0), ann(1), ann(2)}).real() /
                    (s.nbar(0) * s.nbar(1) * s.nbar(2));
  EXPECT_NEAR(g3, *g3_entry(s, 0, 1, 2), 1e-6 * std::max(1.0, std::abs(g3)));
}

TEST(FockOracle, NoClickMatchesClosedForm) {
  const auto p = single(0.3, 0.5, 0.2);
  EXPECT_NEAR(vacuum_overlap(build_density(p, cut(60))), no_click_probability_single(p), 1e-6);
  std::mt19937_64 rng(59);
  for (int t = 0; t < 10; ++t) {
    const auto q = testsupport::random_params(rng, 1);
    EXPECT_NEAR(vacuum_overlap(build_density(q, cut(60))), no_click_probability_single(q), 1e-6);
  }
}

TEST(FockOracle, PhotonDistributionMarginal) {
  auto p = GaussianParams::vacuum(2);
  p.thermal << 1.0, 0.0;
  const auto rho = build_density(p, cut(30));
  const RVec d0 = photon_number_distribution(rho, 0);
  EXPECT_NEAR(d0(0), 0.5, 1e-12);
  EXPECT_NEAR(d0(3), 0.0625, 1e-12);
  EXPECT_NEAR(photon_number_distribution(rho, 1)(0), rho.matrix.trace().real(), 1e-12);
}

TEST(FockOracle, ConjugationIdentities) {
  const int d = 40;
  std::mt19937_64 rng(61);
  for (int t = 0; t < 4; ++t) {
    const int m = 1 + t % 2;
    const int dd = m == 1 ? d : 18;
    const auto p = testsupport::random_params(rng, m, {0.4, 0.3, 0.0, 1.0});
    const CMat dmat = displacement_unitary(p.alpha, dd);
    const CMat smat = squeeze_unitary(p.squeeze, dd);
    const CMat rmat = rotation_unitary(p.rotation, dd);
    const CMat u = dmat * smat * rmat;
    const auto re = unitary_reorder_identities(p);
    const CMat u_r = rmat * displacement_unitary(re.alpha_r, dd) * squeeze_unitary(re.z_r, dd);
    const CMat u_s = smat * displacement_unitary(re.alpha_s, dd) * rmat;
    // Compare action on the vacuum, away from the truncation edge.
    const CVec vac = CVec::Unit(u.rows(), 0);
    EXPECT_LT((u * vac - u_r * vac).norm(), 1e-6);
    EXPECT_LT((u * vac - u_s * vac).norm(), 1e-6);
  }
  // phi = 0 leaves displacement and squeeze unchanged
  auto p = GaussianParams::vacuum(2);
  p.alpha << 0.2, cplx(0.1, 0.3);
  p.squeeze << 0.1, 0.05, 0.05, cplx(0.0, 0.2);
  const auto re = unitary_reorder_identities(p);
  EXPECT_LT((re.alpha_r - p.alpha).norm(), 1e-15);
  EXPECT_LT(linalg::max_abs(CMat(re.z_r - p.squeeze)), 1e-15);
}
