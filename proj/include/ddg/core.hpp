#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  ZeroVector,
  NotConvexSpherical,
  UnrealizableMetric,
  BadFace,
  DegenerateVertex,
  ReversalVertex,
  NotClosedToMultiple,
  AntipodalDirections,
  NonManifold,
  DegenerateNormal,
  NotConvex,
  StallError,
  UnrealizableStep,
  OddDimension,
  ParseError,
  IndexOutOfRange,
  MissingLength,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NotConvexSpherical: return "NotConvexSpherical";
    case ErrorKind::UnrealizableMetric: return "UnrealizableMetric";
    case ErrorKind::BadFace: return "BadFace";
    case ErrorKind::DegenerateVertex: return "DegenerateVertex";
    case ErrorKind::ReversalVertex: return "ReversalVertex";
    case ErrorKind::NotClosedToMultiple: return "NotClosedToMultiple";
    case ErrorKind::AntipodalDirections: return "AntipodalDirections";
    case ErrorKind::NonManifold: return "NonManifold";
    case ErrorKind::DegenerateNormal: return "DegenerateNormal";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::StallError: return "StallError";
    case ErrorKind::UnrealizableStep: return "UnrealizableStep";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::MissingLength: return "MissingLength";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical thresholds. Lengths-based tolerances are relative to the scale of the input.
struct Tolerances {
  double eps_unit = 1e-9;
  double eps_degenerate = 1e-12;
  double eps_embed = 1e-9;
  double eps_angle = 1e-9;
  double eps_turning = 1e-8;
  double eps_convex = 1e-9;
  double eps_planar = 1e-9;
  double eps_singular = 1e-9;
  double eps_hemisphere = 1e-9;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

/// The seed used whenever a randomized computation is not given one explicitly.
inline constexpr std::uint64_t kDefaultSeed = 0xDD6C;

struct MonteCarloConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
};

/// Monte Carlo result: mean, standard error of the mean, sample count and the seed used.
struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 1;
  std::uint64_t seed = kDefaultSeed;

  bool within(double target, double sigmas) const {
    return std::abs(mean - target) <= sigmas * std_error;
  }
};

/// Streaming first and second moments; mergeable across shards (Chan et al.).
struct SampleStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const SampleStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count);
    const double n2 = static_cast<double>(other.count);
    const double delta = other.mean - mean;
    const double n = n1 + n2;
    mean += delta * n2 / n;
    m2 += other.m2 + delta * delta * n1 * n2 / n;
    count += other.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

  EstimateWithError estimate(std::uint64_t seed, double scale = 1.0) const {
    const double n = static_cast<double>(count);
    return {scale * mean, count > 0 ? std::abs(scale) * std::sqrt(variance() / n) : 0.0,
            count, seed};
  }
};

/// Combine independent estimates of the same quantity, weighting by sample count.
/// The per-estimate variance is reconstructed from its standard error.
inline EstimateWithError combine_estimates(std::span<const EstimateWithError> parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "no estimates to combine");
  SampleStats total;
  for (const auto& p : parts) {
    const double n = static_cast<double>(p.samples);
    SampleStats s;
    s.count = p.samples;
    s.mean = p.mean;
    s.m2 = p.std_error * p.std_error * n * (n > 1 ? n - 1 : 0.0);
    total.merge(s);
  }
  return total.estimate(parts.front().seed);
}

/// SplitMix64 finalizer; used to derive independent per-shard and per-item seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Samples are drawn in fixed-size shards with derived seeds so that results do not
/// depend on how the shards are scheduled.
inline constexpr std::uint64_t kShardSize = 1u << 16;

/// Runs `shard(rng, n)` over the sample budget in kShardSize pieces, each with its own
/// derived generator, and merges the returned SampleStats. `scale` multiplies the result.
template <class ShardFn>
EstimateWithError run_sharded(const MonteCarloConfig& mc, ShardFn&& shard, double scale = 1.0) {
  if (mc.samples == 0) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs at least one sample");
  SampleStats total;
  std::uint64_t remaining = mc.samples;
  for (std::uint64_t index = 0; remaining > 0; ++index) {
    const std::uint64_t n = remaining < kShardSize ? remaining : kShardSize;
    std::mt19937_64 rng(mix_seed(mc.seed, index));
    total.merge(shard(rng, n));
    remaining -= n;
  }
  return total.estimate(mc.seed, scale);
}

/// SampleStats for a batch of 0/1 outcomes.
inline SampleStats bernoulli_stats(std::uint64_t hits, std::uint64_t n) {
  SampleStats s;
  s.count = n;
  s.mean = static_cast<double>(hits) / static_cast<double>(n);
  s.m2 = s.mean * (1.0 - s.mean) * static_cast<double>(n);
  return s;
}

}  // namespace ddg
