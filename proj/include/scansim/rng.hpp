#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace scansim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-stream seed for (seed, tag...). Every random draw in the
// library comes from a stream derived this way, so adding a consumer never
// perturbs the draws of another.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags.
enum class Stream : std::uint64_t {
  kCatalog = 1,
  kWorld,
  kDrift,
  kCloud,
  kPredict,
  kEval,
  kOcrSet,
  kIteration,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream s,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  return derive_seed(seed, {static_cast<std::uint64_t>(s), a, b});
}

// Beta(alpha, beta) via the gamma ratio.
inline double sample_beta(Rng& rng, double alpha, double beta) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

}  // namespace scansim
