#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wpcn/async_opt.hpp"
#include "wpcn/halfduplex_opt.hpp"

using namespace wpcn;

namespace {

const std::vector<double> kNoKappa3{0.0, 0.0, 0.0};

SystemPowers powers_dt(double p_dt, double p_cu) { return SystemPowers{p_dt, 0.0, p_cu, {}}; }

double stationarity(double z, double b) { return z_curve(z, b) - b / (1.0 + b * z); }

}  // namespace

TEST(AsyncPhi, FirstIntervalIsThePrice) {
  const std::vector<double> b{1.0, 2.0, 3.0};
  const SystemPowers p = powers_dt(2.0, 0.5);
  EXPECT_NEAR(phi_i(0, 0.7, kNoKappa3, {}, b, p), 0.7 * 0.5 * kLn2, 1e-15);
}

TEST(AsyncPhi, ZeroLambdaKeepsTheSum) {
  const std::vector<double> b{1.5, 2.0, 3.0};
  const std::vector<double> z{0.8};
  EXPECT_NEAR(phi_i(1, 0.0, kNoKappa3, z, b, powers_dt(2.0, 0.5)), 1.5 / (1 + 1.5 * 0.8), 1e-15);
}

TEST(AsyncPhi, LastIntervalPinned) {
  const std::vector<double> b{1.0, 2.0};
  const std::vector<double> z{1.0};
  const std::vector<double> kappa{0.0, 0.0};
  EXPECT_NEAR(phi_i(1, 0.5, kappa, z, b, powers_dt(2.0, 0.5)), -0.019860385419958937, 1e-15);
}

TEST(AsyncPhi, Errors) {
  const std::vector<double> b{1.0, 2.0};
  const std::vector<double> neg{-0.1, 0.0};
  EXPECT_THROW(phi_i(0, 0.5, neg, {}, b, powers_dt(2.0, 0.5)), DimensionError);
  const std::vector<double> kappa{0.0, 0.0};
  EXPECT_THROW(phi_i(1, 0.5, kappa, {}, b, powers_dt(2.0, 0.5)), DimensionError);
  EXPECT_THROW(phi_i(2, 0.5, kappa, {}, b, powers_dt(2.0, 0.5)), DimensionError);
}

TEST(AsyncZ, UnitGain) {
  for (double phi : {0.0, 0.5, 2.0}) {
    EXPECT_NEAR(z_i(phi, 1.0), std::exp(phi + 1.0) - 1.0, 1e-12 * std::exp(phi + 1.0));
  }
}

TEST(AsyncZ, StationarityResidual) {
  oracle::Rng rng(201);
  for (int k = 0; k < 2000; ++k) {
    const double b = rng.log_uniform(1.0001, 1e3);
    const double phi = rng.uniform(0.0, 10.0);
    const double z = z_i(phi, b);
    EXPECT_NEAR(stationarity(z, b), phi, 1e-9 * std::max(1.0, phi));
  }
  for (int k = 0; k < 500; ++k) {
    const double b = rng.log_uniform(1e-3, 1.0);
    const double phi = rng.uniform(-b + 1e-3, 5.0);
    const double z = z_i(phi, b);
    EXPECT_NEAR(stationarity(z, b), phi, 1e-9 * std::max(1.0, phi));
  }
}

TEST(AsyncZ, MatchesBisection) {
  const double b = std::exp(1.0) - 1.0;
  const double want = oracle::bisect_root([&](double z) { return stationarity(z, b); }, 0.0, 100.0);
  EXPECT_NEAR(z_i(0.0, b), want, 1e-10);
  EXPECT_EQ(z_i(-b - 1.0, b), 0.0);
  EXPECT_THROW(z_i(0.0, 0.0), DegenerateError);
}

TEST(AsyncRecover, SingleUser) {
  const std::vector<double> z{1.0};
  const TimeAllocation a = recover_taus(z);
  EXPECT_DOUBLE_EQ(a.tau[0], 0.5);
  EXPECT_DOUBLE_EQ(a.tau0, 0.5);
}

TEST(AsyncRecover, RoundTrip) {
  oracle::Rng rng(202);
  for (int k = 0; k < 500; ++k) {
    const int n = rng.integer(1, 6);
    std::vector<double> z(n);
    for (double& v : z) {
      v = rng.log_uniform(1e-3, 1e3);
    }
    const TimeAllocation a = recover_taus(z);
    double total = a.tau0;
    for (double t : a.tau) {
      total += t;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    double prefix = a.tau0;
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(prefix / a.tau[i], z[i], 1e-12 * std::max(1.0, z[i]));
      prefix += a.tau[i];
    }
  }
  const std::vector<double> big{1e12, 1e12, 1e12};
  const TimeAllocation far = recover_taus(big);
  for (double t : far.tau) {
    EXPECT_LT(t, 1e-11);
  }
  EXPECT_NEAR(far.tau0, 1.0, 1e-10);
}

namespace {

struct Pair {
  std::vector<double> b;
  SystemPowers powers;
};

Pair random_pair(oracle::Rng& rng) {
  Pair p;
  p.b = {rng.log_uniform(0.1, 100.0), rng.log_uniform(0.1, 100.0)};
  p.powers = SystemPowers{rng.log_uniform(0.5, 20.0), rng.uniform(0.0, 5.0),
                          rng.log_uniform(0.05, 5.0), {}};
  return p;
}

double pr3b_oracle(const Pair& in) {
  return oracle::simplex_max([&](double t1, double t2) {
           return oracle::nonoverlap_ee(in.b, {t1, t2}, 1.0 - t1 - t2, in.powers.p_dt(),
                                        in.powers.p_cu);
         })
      .value;
}

}  // namespace

TEST(Pr3b, MatchesSimplexOracle) {
  oracle::Rng rng(203);
  for (int k = 0; k < 25; ++k) {
    const Pair in = random_pair(rng);
    const OptResult r = solve_pr3b(Coefficients::from_products(in.b), in.powers);
    ASSERT_TRUE(r.converged);
    const double want = pr3b_oracle(in);
    EXPECT_NEAR(r.ee, want, 1e-4 * want) << k;
    EXPECT_EQ(r.duals.at("kappa_1"), 0.0);
    EXPECT_EQ(r.duals.at("kappa_2"), 0.0);
    EXPECT_NEAR(r.ee, oracle::nonoverlap_ee(in.b, r.alloc.tau, r.alloc.tau0, in.powers.p_dt(),
                                            in.powers.p_cu),
                1e-7);
  }
}

TEST(Pr3b, KktResidualsVanish) {
  oracle::Rng rng(204);
  for (int k = 0; k < 30; ++k) {
    const int n = rng.integer(1, 4);
    std::vector<double> b(n);
    for (double& v : b) {
      v = rng.log_uniform(0.1, 100.0);
    }
    const SystemPowers p{rng.log_uniform(0.5, 20.0), 0.0, rng.log_uniform(0.05, 5.0), {}};
    const auto c = Coefficients::from_products(b);
    const OptResult r = solve_pr3b(c, p);
    const std::vector<double> kappa(n, 0.0);
    for (double v : kkt_residuals_pr3b(r.alloc, c, p, r.duals.at("lambda"), kappa)) {
      EXPECT_NEAR(v, 0.0, 1e-7);
    }
    EXPECT_NEAR(r.duals.at("zeta"), 0.0, 1e-7);
  }
}

TEST(Pr3b, SingleUserMatchesHalfDuplex) {
  oracle::Rng rng(205);
  for (int k = 0; k < 50; ++k) {
    const auto c = Coefficients::from_products({rng.log_uniform(0.05, 200.0)});
    const SystemPowers p{rng.log_uniform(0.5, 20.0), rng.uniform(0.0, 3.0),
                         rng.log_uniform(0.05, 5.0), {}};
    const OptResult a = solve_pr3b(c, p);
    const OptResult h = solve_pr1(c, p);
    EXPECT_NEAR(a.ee, h.ee, 1e-8 * h.ee);
    EXPECT_NEAR(a.alloc.tau0, h.alloc.tau0, 1e-5);
  }
}

TEST(Pr3b, BindingFloor) {
  const std::vector<double> b{5.0, 40.0};
  const auto c = Coefficients::from_products(b);
  const SystemPowers p{10.0, 10.0, 3.16, {}};
  const OptResult free = solve_pr3b(c, p);
  RateConstraints rmin{{1.05 * free.rates[0], 0.0}};
  const OptResult r = solve_pr3b(c, p, rmin);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.rates[0], rmin.r_min[0], 1e-5);
  EXPECT_GT(r.duals.at("kappa_1"), 0.0);
  EXPECT_EQ(r.duals.at("kappa_2"), 0.0);
  EXPECT_LE(r.ee, free.ee);
  // constrained grid oracle
  double best = 0.0;
  const int n = 1000;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; i + j < n; ++j) {
      const std::vector<double> tau{i / double(n), j / double(n)};
      const double t0 = 1.0 - tau[0] - tau[1];
      if (oracle::nonoverlap_rates(b, tau, t0)[0] >= rmin.r_min[0]) {
        best = std::max(best, oracle::nonoverlap_ee(b, tau, t0, p.p_dt(), p.p_cu));
      }
    }
  }
  EXPECT_GE(r.ee, best * (1 - 1e-9));
  EXPECT_LE(r.ee, best * (1 + 1e-3));
}

TEST(Pr3b, SlackFloorLeavesSolutionAlone) {
  const auto c = Coefficients::from_products({5.0, 40.0});
  const SystemPowers p{10.0, 10.0, 3.16, {}};
  const OptResult free = solve_pr3b(c, p);
  const OptResult r = solve_pr3b(c, p, RateConstraints{{0.5 * free.rates[0], 0.5 * free.rates[1]}});
  EXPECT_NEAR(r.ee, free.ee, 1e-12);
  EXPECT_EQ(r.duals.at("kappa_1"), 0.0);
  EXPECT_EQ(r.duals.at("kappa_2"), 0.0);
}

TEST(Pr3b, InfeasibleFloor) {
  const auto c = Coefficients::from_products({0.5, 1.0});
  const SystemPowers p{1.0, 0.0, 0.1, {}};
  EXPECT_THROW(solve_pr3b(c, p, RateConstraints{{10.0, 0.0}}), InfeasibleRates);
  EXPECT_THROW(solve_pr3b(c, p, RateConstraints{{0.6, 0.6}}), InfeasibleRates);
  EXPECT_THROW(solve_pr3b(Coefficients::from_products({0.0, 1.0}), p), DegenerateError);
}

namespace {

double pr3a_oracle(const std::vector<double>& b, const SystemPowers& p) {
  const std::vector<double> pcu{p.p_cu, 2.0 * p.p_cu};
  return oracle::simplex_max([&](double t1, double t2) {
           return oracle::overlap_ee(b, {t1, t2}, 1.0 - t1 - t2, p.p_dt(), pcu);
         },
                             1e-2, 1e-12)
      .value;
}

}  // namespace

TEST(Pr3a, MatchesSimplexOracle) {
  oracle::Rng rng(206);
  for (int k = 0; k < 20; ++k) {
    const Pair in = random_pair(rng);
    const OptResult r = solve_pr3a(Coefficients::from_products(in.b), in.powers);
    ASSERT_TRUE(r.converged);
    const double want = pr3a_oracle(in.b, in.powers);
    EXPECT_NEAR(r.ee, want, 1e-4 * want) << k;
  }
}

TEST(Pr3a, StrongChannelSkipsFirstInterval) {
  const OptResult r = solve_pr3a(Coefficients::from_products({100.0, 20.0}),
                                 SystemPowers{10.0, 1.0, 3.16, {}});
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.alloc.tau[0], 1e-4);
  EXPECT_GT(r.alloc.tau[1], 0.0);
}

TEST(Pr3a, SingleUserMatchesHalfDuplex) {
  const auto c = Coefficients::from_products({7.0});
  const SystemPowers p{4.0, 1.0, 0.3, {}};
  EXPECT_NEAR(solve_pr3a(c, p).ee, solve_pr1(c, p).ee, 1e-7);
}

TEST(Pr3a, SilentSecondUser) {
  const std::vector<double> b{3.0, 0.0};
  const SystemPowers p{2.0, 0.0, 0.2, {}};
  const OptResult r = solve_pr3a(Coefficients::from_products(b), p);
  EXPECT_EQ(r.rates[1], 0.0);
  EXPECT_NEAR(r.ee, pr3a_oracle(b, p), 1e-4 * r.ee);
}

TEST(Pr3a, RatesAddUp) {
  const auto c = Coefficients::from_products({5.0, 40.0});
  const OptResult r = solve_pr3a(c, SystemPowers{10.0, 10.0, 3.16, {}});
  const double sum = oracle::overlap_sum_rate({5.0, 40.0}, r.alloc.tau, r.alloc.tau0);
  EXPECT_NEAR(r.rates[0] + r.rates[1], sum, 1e-10);
}

TEST(Pr3a, Errors) {
  const SystemPowers p{1.0, 0.0, 0.1, {}};
  EXPECT_THROW(solve_pr3a(Coefficients::from_products({1.0, 1.0, 1.0}), p), DimensionError);
  EXPECT_THROW(solve_pr3a(Coefficients::from_products({0.0, 0.0}), p), DegenerateError);
  EXPECT_THROW(solve_pr3a(Coefficients::from_products({1.0, 1.0}), p, {}, {0.1}), DimensionError);
}
