#ifndef WPCN_CHANNEL_HPP
#define WPCN_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "wpcn/errors.hpp"

namespace wpcn {

/// One fading state: downlink (WPT -> user) and uplink (user -> AP) power
/// gains. AP noise power is normalized to one and never stored.
struct ChannelRealization {
  std::vector<double> g2;
  std::vector<double> h2;

  std::size_t n_users() const { return h2.size(); }

  void validate() const {
    if (h2.empty() || g2.size() != h2.size()) {
      throw DimensionError("ChannelRealization: g2 and h2 must have equal, nonzero length");
    }
    for (std::size_t i = 0; i < h2.size(); ++i) {
      if (!std::isfinite(g2[i]) || !std::isfinite(h2[i]) || g2[i] < 0.0 || h2[i] < 0.0) {
        throw DimensionError("ChannelRealization: gains must be finite and nonnegative");
      }
    }
  }
};

/// Independent Rayleigh fading: |g_i|^2 and |h_i|^2 exponential with the given means.
struct FadingSpec {
  std::vector<double> beta_g;
  std::vector<double> beta_h;
  std::uint64_t seed = 1;

  std::size_t n_users() const { return beta_h.size(); }

  void validate() const {
    if (beta_h.empty() || beta_g.size() != beta_h.size()) {
      throw DimensionError("FadingSpec: beta_g and beta_h must have equal, nonzero length");
    }
    for (std::size_t i = 0; i < beta_h.size(); ++i) {
      if (!(beta_g[i] > 0.0) || !(beta_h[i] > 0.0)) {
        throw DimensionError("FadingSpec: means must be positive");
      }
    }
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seeded sampler. One instance per worker; fork() derives an independent
/// stream from (seed, stream index).
class FadingSampler {
public:
  explicit FadingSampler(FadingSpec spec, std::uint64_t stream = 0)
      : spec_(std::move(spec)), engine_(mix(spec_.seed, stream)) {
    spec_.validate();
  }

  FadingSampler fork(std::uint64_t stream) const { return FadingSampler(spec_, stream); }

  /// Uniform in [0, 1) with 53 random bits; independent of the standard
  /// library's distribution implementation.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  ChannelRealization next() {
    const std::size_t n = spec_.n_users();
    ChannelRealization ch;
    ch.g2.resize(n);
    ch.h2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ch.g2[i] = exponential(spec_.beta_g[i]);
      ch.h2[i] = exponential(spec_.beta_h[i]);
    }
    return ch;
  }

  const FadingSpec& spec() const { return spec_; }

private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(~stream));
  }

  FadingSpec spec_;
  std::mt19937_64 engine_;
};

/// `count` independent draws, deterministic in spec.seed.
inline std::vector<ChannelRealization> sample(const FadingSpec& spec, std::size_t count,
                                              std::uint64_t stream = 0) {
  spec.validate();
  if (count == 0) {
    throw DimensionError("sample: count must be positive");
  }
  FadingSampler sampler(spec, stream);
  std::vector<ChannelRealization> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(sampler.next());
  }
  return out;
}

/// Reindexes users by uplink gain; g and h move together. perm[k] is the
/// original index of the user placed at position k. Ties keep original order.
inline std::pair<ChannelRealization, std::vector<std::size_t>> sort_by_uplink_gain(
    const ChannelRealization& ch, bool ascending) {
  std::vector<std::size_t> perm(ch.n_users());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? ch.h2[a] < ch.h2[b] : ch.h2[a] > ch.h2[b];
  });
  ChannelRealization sorted;
  sorted.g2.reserve(perm.size());
  sorted.h2.reserve(perm.size());
  for (std::size_t k : perm) {
    sorted.g2.push_back(ch.g2[k]);
    sorted.h2.push_back(ch.h2[k]);
  }
  return {std::move(sorted), std::move(perm)};
}

}  // namespace wpcn

#endif  // WPCN_CHANNEL_HPP
