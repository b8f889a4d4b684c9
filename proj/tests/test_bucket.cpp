#include <gtest/gtest.h>

#include <random>

#include "gausstat/bucket.hpp"
#include "gausstat/fock_oracle.hpp"
#include "test_support.hpp"

using namespace gausstat;
using testsupport::Ranges;

namespace {

// sum over mode-resolved correlations, weighted by photon numbers
BucketObservables from_mode_resolved(const MomentSummary& s) {
  const int M = s.modes();
  const auto t = moment_table(s);
  double n1 = 0, n2 = 0, n3 = 0;
  for (int i = 0; i < M; ++i) {
    n1 += s.nbar(i);
    for (int j = 0; j < M; ++j) {
      n2 += g2_from_kernel(t, i, j) * s.nbar(i) * s.nbar(j);
      for (int k = 0; k < M; ++k) n3 += g3_from_kernel(t, i, j, k) * s.nbar(i) * s.nbar(j) * s.nbar(k);
    }
  }
  return {n2 / (n1 * n1), n3 / (n1 * n1 * n1), n1};
}

GaussianParams equal_squeezers(int K, double r) {
  auto p = GaussianParams::vacuum(K);
  for (int k = 0; k < K; ++k) p.squeeze(k, k) = std::polar(r, 0.3 * k);
  return p;
}

} // namespace

TEST(Bucket, SingleModeReduction) {
  auto p = GaussianParams::vacuum(1);
  p.alpha(0) = cplx(0.4, 0.2);
  p.squeeze(0, 0) = std::polar(0.5, 0.7);
  p.thermal(0) = 0.3;
  const auto s = derive_moments(p);
  const auto b = bucket_correlations(s);
  EXPECT_NEAR(b.g2_b, *g2_entry(s, 0, 0), 1e-12);
  EXPECT_NEAR(b.g3_b, *g3_entry(s, 0, 0, 0), 1e-12);
  EXPECT_NEAR(b.total_nbar, s.nbar(0), 1e-14);
}

TEST(Bucket, CoherentTwoModes) {
  auto p = GaussianParams::vacuum(2);
  p.alpha << cplx(0.5, 0.1), cplx(-0.3, 0.8);
  const auto b = bucket_correlations(derive_moments(p));
  EXPECT_NEAR(b.g2_b, 1.0, 1e-12);
  EXPECT_NEAR(b.g3_b, 1.0, 1e-12);
}

TEST(Bucket, VacuumUndefined) {
  try {
    bucket_correlations(derive_moments(GaussianParams::vacuum(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedCorrelation);
  }
}

TEST(Bucket, TraceFormulasMatchModeResolvedSums) {
  std::mt19937_64 rng(9);
  for (int M : {2, 3, 4})
    for (int t = 0; t < 10; ++t) {
      const auto s = derive_moments(testsupport::random_params(rng, M));
      const auto a = bucket_correlations(s), b = from_mode_resolved(s);
      EXPECT_NEAR(a.g2_b, b.g2_b, 1e-10);
      EXPECT_NEAR(a.g3_b, b.g3_b, 1e-10);
    }
}

TEST(Bucket, MatchesFockOracle) {
  const auto sq = equal_squeezers(2, 0.4);
  const auto f = bucket_bruteforce(build_density(sq, {.cutoff = 28}));
  const auto a = bucket_correlations(derive_moments(sq));
  EXPECT_NEAR(a.g2_b, f.g2_b, 1e-6);
  EXPECT_NEAR(a.g3_b, f.g3_b, 1e-6);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 3; ++t) {
    const auto p = testsupport::random_params(rng, 2, Ranges{0.5, 0.4, 0.3, 1.0});
    const auto o = bucket_bruteforce(build_density(p, {.cutoff = 28}));
    const auto c = bucket_correlations(derive_moments(p));
    EXPECT_NEAR(c.g2_b, o.g2_b, 1e-6);
    EXPECT_NEAR(c.g3_b, o.g3_b, 1e-6);
  }
}

TEST(Bucket, BoundsOverRandomStates) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int M = 1 + t % 4;
    auto p = testsupport::random_params(rng, M, Ranges{1.5, 0.0, 1.5, 2.0});
    p.squeeze.setZero();
    const double g = bucket_correlations(derive_moments(p)).g2_b;
    ASSERT_GE(g, 1.0 - 1e-9);
    ASSERT_LE(g, 2.0 + 1e-9);
    auto q = testsupport::random_params(rng, M, Ranges{0.0, 1.2, 1.0, 2.0});
    q.alpha.setZero();
    ASSERT_GE(bucket_correlations(derive_moments(q)).g2_b, 1.0 - 1e-9);
  }
}

TEST(Bucket, Verdicts) {
  auto v = [](double g) { return bucket_bounds_check({g, 0.0, 1.0}); };
  EXPECT_EQ(v(1.5).verdict, BucketVerdict::ConsistentNonSqueezed);
  EXPECT_EQ(v(2.7).verdict, BucketVerdict::CertifiesSqueezing);
  EXPECT_EQ(v(0.8).verdict, BucketVerdict::RequiresDisplacementAndSqueezing);
  EXPECT_EQ(bucket_bounds_check({2.01, 0.0, 1.0}, 0.01).verdict, BucketVerdict::Inconclusive);
  for (double g : {0.8, 1.5, 2.7}) EXPECT_NE(v(g).message.find("Gaussian-state assumption"), std::string::npos);
}

TEST(Bucket, ModeCountEqualSqueezers) {
  for (int K = 1; K <= 8; ++K) {
    const auto b = bucket_correlations(derive_moments(equal_squeezers(K, 0.3)));
    const auto e = pure_squeezer_mode_estimate(b.g2_b, b.g3_b);
    ASSERT_TRUE(e.model_ok) << e.message;
    EXPECT_NEAR(e.K, K, 1e-6);
    EXPECT_NEAR(e.total_nbar, b.total_nbar, 1e-6);
  }
}

TEST(Bucket, ModeCountRejectsThermal) {
  for (int M : {1, 3}) {
    auto p = GaussianParams::vacuum(M);
    p.thermal.setConstant(0.7);
    const auto b = bucket_correlations(derive_moments(p));
    const auto e = pure_squeezer_mode_estimate(b.g2_b, b.g3_b);
    EXPECT_FALSE(e.model_ok);
    EXPECT_NE(e.message.find("model-mismatch"), std::string::npos);
  }
}
