#pragma once

#include "atc/score.hpp"
#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace atc {

inline constexpr double kDefaultEqualityTolerance = 1e-12;
inline constexpr Eigen::Index kDefaultSamplePoints = 2000;

/// Sign of delta, with |delta| <= eps counted as 0.
int tolerant_sign(double delta, double eps);

/// A pair of points on which two scores disagree about <, = or >.
struct OrderingWitness {
  ProbabilityVector p;
  ProbabilityVector q;
  double a_p, a_q;
  double b_p, b_q;
};

enum class OrderingStatus { consistent_on_sample, counterexample };

struct OrderingVerdict {
  OrderingStatus status;
  std::optional<OrderingWitness> witness;
  std::size_t pairs_checked;
  double equality_tolerance;

  bool consistent() const { return status == OrderingStatus::consistent_on_sample; }
};

/// True when both scores order p and q the same way.
bool check_pair(const ProbabilityVector& p, const ProbabilityVector& q, const Scorer& a,
                const Scorer& b, double eps = kDefaultEqualityTolerance);

/// Re-evaluates both scores on the witness from scratch.
bool witness_violates(const OrderingWitness& w, const Scorer& a, const Scorer& b,
                      double eps = kDefaultEqualityTolerance);

/// n points uniform on the simplex (Dirichlet(1,...,1)). Point i depends only
/// on (seed, k, i), never on how many points are drawn or by whom.
ProbabilityMatrix sample_simplex(Eigen::Index k, Eigen::Index n, std::uint64_t seed);

/// Simplex points whose components are multiples of 1/steps, in lexicographic
/// order of the integer compositions (largest first component first), capped
/// at max_points.
ProbabilityMatrix simplex_grid(Eigen::Index k, int steps, Eigen::Index max_points);

/// All pairs i < j of the given points; stops at the first violation.
OrderingVerdict verify_on_points(const ProbabilityMatrix& points, const Scorer& a, const Scorer& b,
                                 double eps = kDefaultEqualityTolerance);

OrderingVerdict verify_on_sample(const Scorer& a, const Scorer& b, Eigen::Index k, Eigen::Index n_points,
                                 std::uint64_t seed, double eps = kDefaultEqualityTolerance);

/// Points of the 0.1 lattice first (all of them when they fit in the pool the
/// budget affords, half the pool otherwise), then uniform random points.
/// Checks at most `budget` pairs; returned witnesses have been re-verified.
std::optional<OrderingWitness> search_counterexample(const Scorer& a, const Scorer& b, Eigen::Index k,
                                                     std::size_t budget, std::uint64_t seed,
                                                     double eps = kDefaultEqualityTolerance);

struct EquivalenceReport {
  /// consistent(i, j): scorers i and j agree on every sampled pair.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> consistent;
  bool reflexive;
  bool symmetric;
  bool transitive;
  std::vector<std::array<std::size_t, 3>> transitivity_violations;
  /// Connected components of the relation, each sorted, ordered by first member.
  std::vector<std::vector<std::size_t>> classes;
};

EquivalenceReport verify_equivalence_relation(std::span<const Scorer> scorers, Eigen::Index k,
                                              Eigen::Index n_points, std::uint64_t seed,
                                              double eps = kDefaultEqualityTolerance);

/// Same relation check on an explicit consistency matrix.
EquivalenceReport equivalence_from_relation(
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& consistent);

}  // namespace atc
