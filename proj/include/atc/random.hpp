#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>

namespace atc {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of seed components. Used wherever a stream must
/// depend only on its position (run index, example index) and never on
/// scheduling.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t first, Parts... rest) {
  std::uint64_t h = mix64(first);
  ((h = mix64(h ^ static_cast<std::uint64_t>(rest))), ...);
  return h;
}

// FNV-1a
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Draws from Dirichlet(alpha) via normalized gamma variates.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sample_dirichlet(
    const Eigen::MatrixBase<Derived>& alpha, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> draw(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    std::gamma_distribution<Scalar> gamma(alpha(i), Scalar(1));
    draw(i) = gamma(rng);
  }
  const Scalar total = draw.sum();
  if (!(total > Scalar(0))) {
    // every gamma underflowed; only reachable for tiny alphas
    draw.setZero();
    draw(std::uniform_int_distribution<Eigen::Index>(0, alpha.size() - 1)(rng)) = Scalar(1);
    return draw;
  }
  return draw / total;
}

}  // namespace atc
