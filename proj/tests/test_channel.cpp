#include <gtest/gtest.h>

#include <cmath>

#include "wpcn/channel.hpp"

using namespace wpcn;

TEST(Channel, SeededSamplingIsReproducible) {
  FadingSpec spec{{10.0, 2.0}, {10.0, 2.0}, 42};
  const auto a = sample(spec, 500);
  const auto b = sample(spec, 500);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].g2, b[k].g2);
    EXPECT_EQ(a[k].h2, b[k].h2);
  }
  spec.seed = 43;
  const auto c = sample(spec, 1);
  EXPECT_NE(c[0].h2[0], a[0].h2[0]);
}

TEST(Channel, StreamsDiffer) {
  FadingSpec spec{{1.0}, {1.0}, 7};
  FadingSampler s0(spec, 0);
  FadingSampler s1 = s0.fork(1);
  EXPECT_NE(s0.next().h2[0], s1.next().h2[0]);
}

TEST(Channel, ExponentialMeans) {
  FadingSpec spec{{10.0, 2.0}, {5.0, 0.5}, 3};
  const std::size_t m = 200000;
  const auto draws = sample(spec, m);
  double g[2] = {0, 0};
  double h[2] = {0, 0};
  for (const auto& d : draws) {
    for (int i = 0; i < 2; ++i) {
      g[i] += d.g2[i];
      h[i] += d.h2[i];
      EXPECT_GE(d.g2[i], 0.0);
    }
  }
  const double tol = 4.0 / std::sqrt(static_cast<double>(m));
  EXPECT_NEAR(g[0] / m / 10.0, 1.0, tol);
  EXPECT_NEAR(g[1] / m / 2.0, 1.0, tol);
  EXPECT_NEAR(h[0] / m / 5.0, 1.0, tol);
  EXPECT_NEAR(h[1] / m / 0.5, 1.0, tol);
}

TEST(Channel, SortByUplinkGain) {
  ChannelRealization ch{{1.0, 2.0, 3.0}, {0.5, 0.1, 0.9}};
  auto [asc, perm] = sort_by_uplink_gain(ch, true);
  EXPECT_EQ(perm, (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(asc.h2, (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_EQ(asc.g2, (std::vector<double>{2.0, 1.0, 3.0}));
  auto [desc, perm2] = sort_by_uplink_gain(ch, false);
  EXPECT_EQ(perm2, (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(desc.g2, (std::vector<double>{3.0, 1.0, 2.0}));
}

TEST(Channel, SortIsStableOnTies) {
  ChannelRealization ch{{1.0, 2.0}, {0.5, 0.5}};
  EXPECT_EQ(sort_by_uplink_gain(ch, true).second, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(sort_by_uplink_gain(ch, false).second, (std::vector<std::size_t>{0, 1}));
}

TEST(Channel, Validation) {
  EXPECT_THROW((ChannelRealization{{1.0}, {1.0, 2.0}}.validate()), DimensionError);
  EXPECT_THROW((ChannelRealization{{-1.0}, {1.0}}.validate()), DimensionError);
  EXPECT_THROW((FadingSpec{{1.0}, {0.0}, 1}.validate()), DimensionError);
  EXPECT_THROW(sample(FadingSpec{{1.0}, {1.0}, 1}, 0), DimensionError);
}
