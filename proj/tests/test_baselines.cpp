#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wpcn/baselines.hpp"

using namespace wpcn;

namespace {

struct Instance {
  std::vector<double> b;
  SystemPowers powers;
};

Instance random_instance(oracle::Rng& rng, int n) {
  Instance in;
  in.b.resize(n);
  for (double& v : in.b) {
    v = rng.log_uniform(0.05, 100.0);
  }
  in.powers = SystemPowers{rng.log_uniform(0.5, 30.0), rng.uniform(0.0, 5.0),
                           rng.log_uniform(0.05, 10.0), {}};
  return in;
}

}  // namespace

TEST(Case2, ThroughputAllocationScoredByEe) {
  oracle::Rng rng(301);
  for (int k = 0; k < 100; ++k) {
    const Instance in = random_instance(rng, rng.integer(1, 4));
    const auto c = Coefficients::from_products(in.b);
    const OptResult t = case2_hd(c, in.powers);
    const OptResult e = solve_pr1(c, in.powers);
    EXPECT_TRUE(t.converged);
    EXPECT_NEAR(t.alloc.tau0, solve_throughput_hd(c), 1e-15);
    EXPECT_NEAR(t.ee, oracle::hd_ee(in.b, t.alloc.tau0, in.powers.p_dt(), in.powers.p_cu), 1e-12);
    EXPECT_LE(t.ee, e.ee * (1 + 1e-12));
    double sum_t = 0.0;
    double sum_e = 0.0;
    for (std::size_t i = 0; i < in.b.size(); ++i) {
      sum_t += t.rates[i];
      sum_e += e.rates[i];
    }
    EXPECT_GE(sum_t, sum_e - 1e-12);
  }
}

TEST(Case3, MatchesSimplexOracle) {
  oracle::Rng rng(302);
  for (int k = 0; k < 25; ++k) {
    const Instance in = random_instance(rng, 2);
    const OptResult r = case3_tdma(Coefficients::from_products(in.b), in.powers);
    ASSERT_TRUE(r.converged);
    const double want =
        oracle::simplex_max([&](double t1, double t2) {
          return oracle::tdma_hd_ee(in.b, {t1, t2}, 1.0 - t1 - t2, in.powers.p_dt(),
                                    in.powers.p_cu);
        }).value;
    EXPECT_NEAR(r.ee, want, 1e-6 * want) << k;
    EXPECT_NEAR(r.ee, oracle::tdma_hd_ee(in.b, r.alloc.tau, r.alloc.tau0, in.powers.p_dt(),
                                         in.powers.p_cu),
                1e-7);
  }
}

TEST(Case3, SingleUserIsHalfDuplex) {
  oracle::Rng rng(303);
  for (int k = 0; k < 50; ++k) {
    const Instance in = random_instance(rng, 1);
    const auto c = Coefficients::from_products(in.b);
    EXPECT_NEAR(case3_tdma(c, in.powers).ee, solve_pr1(c, in.powers).ee, 1e-8);
  }
}

TEST(Case3, TiesHalfDuplexNomaOptimum) {
  // TDMA slots proportional to b reach the NOMA sum rate at every tau0.
  oracle::Rng rng(304);
  for (int k = 0; k < 50; ++k) {
    const Instance in = random_instance(rng, rng.integer(2, 4));
    const auto c = Coefficients::from_products(in.b);
    const double noma = solve_pr1(c, in.powers).ee;
    EXPECT_NEAR(case3_tdma(c, in.powers).ee, noma, 1e-8 * noma);
  }
}

TEST(Case3, BindingFloor) {
  const std::vector<double> b{5.0, 40.0};
  const auto c = Coefficients::from_products(b);
  const SystemPowers p{10.0, 10.0, 3.16, {}};
  const OptResult free = case3_tdma(c, p);
  const RateConstraints rmin{{1.2 * free.rates[0], 0.0}};
  const OptResult r = case3_tdma(c, p, rmin);
  EXPECT_NEAR(r.rates[0], rmin.r_min[0], 1e-5);
  EXPECT_GT(r.duals.at("kappa_1"), 0.0);
  EXPECT_LE(r.ee, free.ee);
  EXPECT_THROW(case3_tdma(c, p, RateConstraints{{100.0, 0.0}}), InfeasibleRates);
}
