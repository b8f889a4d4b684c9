#include <gtest/gtest.h>

#include <set>

#include "gausstat/moment_kernel.hpp"
#include "gausstat/state_engine.hpp"
#include "test_support.hpp"

using namespace gausstat;

namespace {

long double_factorial_odd(int n) {
  long v = 1;
  for (int k = n; k > 1; k -= 2) v *= k;
  return v;
}

} // namespace

TEST(MomentKernel, PairPartitionCounts) {
  for (int n = 1; n <= 3; ++n) {
    const auto parts = enumerate_pair_partitions(2 * n);
    EXPECT_EQ(static_cast<long>(parts.size()), double_factorial_odd(2 * n - 1));
  }
  EXPECT_EQ(enumerate_pair_partitions(2).size(), 1u);
  EXPECT_EQ(enumerate_pair_partitions(4).size(), 3u);
  EXPECT_EQ(enumerate_pair_partitions(6).size(), 15u);
}

TEST(MomentKernel, FourWordPartitionsInListedOrder) {
  const auto parts = enumerate_pair_partitions(4);
  ASSERT_EQ(parts.size(), 3u);
  using P = std::vector<std::pair<int, int>>;
  EXPECT_EQ(parts[0].pairs, (P{{0, 1}, {2, 3}}));
  EXPECT_EQ(parts[1].pairs, (P{{0, 2}, {1, 3}}));
  EXPECT_EQ(parts[2].pairs, (P{{0, 3}, {1, 2}}));
}

TEST(MomentKernel, PartitionsAreDisjointCoversAndSorted) {
  const auto parts = enumerate_pair_partitions(6);
  std::set<std::vector<std::pair<int, int>>> seen;
  for (const auto& p : parts) {
    std::set<int> cover;
    for (auto [a, b] : p.pairs) {
      EXPECT_LT(a, b);
      cover.insert(a);
      cover.insert(b);
    }
    EXPECT_EQ(cover.size(), 6u);
    seen.insert(p.pairs);
  }
  EXPECT_EQ(seen.size(), 15u);
  for (std::size_t k = 1; k < parts.size(); ++k) EXPECT_LT(parts[k - 1].pairs, parts[k].pairs);
}

TEST(MomentKernel, OddLengthRejected) {
  EXPECT_THROW(enumerate_pair_partitions(3), Error);
  EXPECT_THROW(enumerate_pair_partitions(8), Error);
}

TEST(MomentKernel, Bipartitions) {
  const auto bp = enumerate_bipartitions_4_2(6);
  ASSERT_EQ(bp.size(), 15u);
  std::vector<int> chi_count(6, 0);
  int last_two = 0;
  for (const auto& b : bp) {
    std::set<int> all(b.psi.begin(), b.psi.end());
    all.insert(b.chi[0]);
    all.insert(b.chi[1]);
    EXPECT_EQ(all.size(), 6u);
    EXPECT_LT(b.chi[0], b.chi[1]);
    for (int k = 1; k < 4; ++k) EXPECT_LT(b.psi[k - 1], b.psi[k]);
    ++chi_count[b.chi[0]];
    ++chi_count[b.chi[1]];
    if (b.chi[0] == 4 && b.chi[1] == 5) ++last_two;
  }
  EXPECT_EQ(last_two, 1);
  for (int c : chi_count) EXPECT_EQ(c, 5);
  EXPECT_THROW(enumerate_bipartitions_4_2(4), Error);
}

TEST(MomentKernel, ThermalSecondMoments) {
  RVec n(2);
  n << 0.7, 0.3;
  EXPECT_DOUBLE_EQ(thermal_second_moment(cre(0), ann(0), n).real(), 0.7);
  EXPECT_DOUBLE_EQ(thermal_second_moment(ann(0), cre(0), n).real(), 1.7);
  EXPECT_EQ(thermal_second_moment(ann(0), ann(1), n), cplx(0.0));
  EXPECT_EQ(thermal_second_moment(ann(0), ann(0), n), cplx(0.0));
  EXPECT_EQ(thermal_second_moment(cre(0), ann(1), n), cplx(0.0));
}

TEST(MomentKernel, ThermalMoments) {
  RVec n(3);
  n << 0.4, 1.3, 0.25;
  EXPECT_EQ(thermal_moment({cre(0), ann(0), ann(0)}, n), cplx(0.0));
  const cplx distinct = thermal_moment({cre(0), cre(1), cre(2), ann(0), ann(1), ann(2)}, n);
  EXPECT_NEAR(distinct.real(), 0.4 * 1.3 * 0.25, 1e-15);
  const cplx same = thermal_moment({cre(1), cre(1), cre(1), ann(1), ann(1), ann(1)}, n);
  EXPECT_NEAR(same.real(), 6.0 * std::pow(1.3, 3), 1e-12);
}

TEST(MomentKernel, VacuumAndOrderErrors) {
  const auto t = moment_table(GaussianParams::vacuum(2));
  EXPECT_EQ(gaussian_moment({cre(0), ann(0)}, t), cplx(0.0));
  EXPECT_EQ(gaussian_moment({cre(0), cre(1), ann(1), ann(0)}, t), cplx(0.0));
  EXPECT_THROW(gaussian_moment({ann(0), ann(0), ann(0), ann(0), ann(0)}, t), Error);
  EXPECT_THROW(gaussian_moment(LadderWord(8, ann(0)), t), Error);
}

TEST(MomentKernel, CoherentFourthOrder) {
  auto p = GaussianParams::vacuum(1);
  p.alpha(0) = cplx(0.6, -0.3);
  const auto t = moment_table(p);
  const cplx v = gaussian_moment({cre(0), cre(0), ann(0), ann(0)}, t);
  EXPECT_NEAR(v.real(), std::pow(std::norm(p.alpha(0)), 2), 1e-14);
  EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(MomentKernel, SqueezedThermalSixthOrderSpotValue) {
  auto p = GaussianParams::vacuum(1);
  p.squeeze(0, 0) = 0.5;
  p.thermal(0) = 0.2;
  const auto t = moment_table(p);
  const double nbar = t.two(cre(0), ann(0)).real();
  const double g3 = gaussian_moment({cre(0), cre(0), cre(0), ann(0), ann(0), ann(0)}, t).real() / std::pow(nbar, 3);
  const double cov = 1.4 * std::sinh(0.5) * std::cosh(0.5);
  const double g2 = 2.0 + cov * cov / (nbar * nbar);
  EXPECT_NEAR(g3, 9.0 * g2 - 12.0, 1e-10);
  EXPECT_NEAR(g3, 24.10, 5e-3);
}

TEST(MomentKernel, AgreesWithSingletonPairExpansion) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const auto t = moment_table(testsupport::random_params(rng, m));
    for (int len : {1, 2, 3, 4, 6}) {
      std::uniform_int_distribution<int> pick(0, 2 * m - 1);
      for (int w = 0; w < 30; ++w) {
        LadderWord word(len);
        for (auto& op : word) {
          const int s = pick(rng);
          op = s < m ? ann(s) : cre(s - m);
        }
        const cplx a = gaussian_moment(word, t);
        const cplx b = testsupport::wick_oracle(word, t);
        EXPECT_LT(std::abs(a - b), 1e-11 * (1.0 + std::abs(b)));
      }
    }
  }
}

TEST(MomentKernel, ZeroDisplacementIsPairSum) {
  std::mt19937_64 rng(5);
  auto p = testsupport::random_params(rng, 2);
  p.alpha.setZero();
  const auto t = moment_table(p);
  for (const auto& w : testsupport::all_words(2, 4)) {
    cplx s = 0.0;
    for (const auto& part : enumerate_pair_partitions(4))
      s += t.two(w[part.pairs[0].first], w[part.pairs[0].second]) * t.two(w[part.pairs[1].first], w[part.pairs[1].second]);
    EXPECT_LT(std::abs(gaussian_moment(w, t) - s), 1e-12);
  }
}

TEST(MomentKernel, ThermalParamsMatchThermalMoment) {
  auto p = GaussianParams::vacuum(2);
  p.thermal << 0.35, 0.9;
  const auto t = moment_table(p);
  for (int len : {2, 4, 6})
    for (const auto& w : testsupport::all_words(2, len))
      EXPECT_LT(std::abs(gaussian_moment(w, t) - thermal_moment(w, p.thermal)), 1e-12);
}

TEST(MomentKernel, Hermiticity) {
  std::mt19937_64 rng(7);
  const auto t = moment_table(testsupport::random_params(rng, 3));
  std::uniform_int_distribution<int> pick(0, 5);
  for (int len : {1, 2, 3, 4, 6})
    for (int k = 0; k < 50; ++k) {
      LadderWord w(len);
      for (auto& op : w) {
        const int s = pick(rng);
        op = s < 3 ? ann(s) : cre(s - 3);
      }
      const cplx a = gaussian_moment(w, t);
      const cplx b = gaussian_moment(adjoint_word(w), t);
      EXPECT_LT(std::abs(a - std::conj(b)), 1e-11 * (1.0 + std::abs(a)));
    }
}
