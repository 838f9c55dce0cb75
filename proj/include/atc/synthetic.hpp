#pragma once

#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>

namespace atc {

/// Source-to-target change applied to generated confidences and labels.
struct Shift {
  /// p_i^(1/T), renormalized; T > 1 softens, T < 1 sharpens, argmax unchanged.
  double temperature = 1.0;
  /// Distribution of true labels; uniform when absent.
  std::optional<Eigen::VectorXd> label_prior;
};

struct GeneratorSpec {
  Eigen::Index k = 2;
  Eigen::Index n = 1000;
  /// Probability that an example's argmax is its true label, in (0, 1].
  double target_accuracy = 0.8;
  /// Dirichlet parameter on the predicted class (1 on the others).
  double concentration = 5.0;
  std::optional<Shift> shift;
  std::uint64_t seed = 0;
};

struct SyntheticSet {
  PredictionSet data;
  Eigen::Index n_correct;

  double realized_accuracy() const {
    return static_cast<double>(n_correct) / static_cast<double>(data.size());
  }
};

/// Retries per example before the deterministic fallback vector is used.
inline constexpr int kMaxArgmaxRetries = 1000;

/// p^(1/T), renormalized.
ProbabilityVector temperature_scale(const ProbabilityVector& v, double temperature);

/// Labeled set with controlled accuracy. Example i is drawn from its own stream
/// derived from (seed, i).
SyntheticSet generate(const GeneratorSpec& spec);

/// Source drawn from spec without shift; target with the shift and an
/// independent stream.
std::pair<SyntheticSet, SyntheticSet> make_shift_pair(const GeneratorSpec& spec, const Shift& shift);

}  // namespace atc
