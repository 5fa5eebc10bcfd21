#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sleepsched {

using Rng = std::mt19937_64;

/// Master seed plus a stream index (e.g. repetition number). Streams derived
/// from distinct ids are statistically independent.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Folds a list of indices into the master seed with splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

/// Independent generator for `sub` within the stream of `seed` (sub 0 drives
/// the environment, sub 1 the strategy).
Rng make_rng(const RngSeed& seed, std::uint64_t sub = 0);

// Distribution helpers with fully specified output so results do not depend
// on the standard library's distribution implementations.

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);
/// Uniform integer in [lo, hi] (inclusive), unbiased.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);
bool bernoulli(Rng& rng, double p);

}  // namespace sleepsched
