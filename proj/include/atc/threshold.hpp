#pragma once

#include "atc/score.hpp"
#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace atc {

/// Threshold learned on source scores so that the fraction of scores strictly
/// below it matches the source error.
struct ThresholdModel {
  std::string score;
  /// An observed source score, or +infinity (the sentinel) when only "every
  /// example below" reaches the source metric best.
  double threshold;
  MetricValue source_metric;
  double achieved_source_proportion;

  bool is_sentinel() const;
};

struct AtcEstimate {
  ThresholdModel model;
  /// Error convention; use .accuracy() for the complement.
  MetricValue target_value;
  Eigen::Index n_source;
  Eigen::Index n_target;
};

/// Sentinel candidate strictly above every finite score.
double threshold_sentinel();

/// Picks t among the distinct source scores plus the sentinel, minimizing
/// |source error - P[score < t]|, ties toward the smallest t. One sort and a
/// sweep over the sorted scores.
ThresholdModel learn_threshold(const Eigen::Ref<const Eigen::VectorXd>& source_scores,
                               const MetricValue& source_metric);

/// Fraction of target scores strictly below the threshold, as an error.
MetricValue estimate_target(const ThresholdModel& model,
                            const Eigen::Ref<const Eigen::VectorXd>& target_scores);

/// Indices of scores strictly below the model threshold.
std::vector<Eigen::Index> below_threshold(const ThresholdModel& model,
                                          const Eigen::Ref<const Eigen::VectorXd>& scores);

/// End to end: source error from labels, score both sets, learn, estimate.
AtcEstimate atc_estimate(const PredictionSet& source, const PredictionSet& target, const Scorer& scorer);

}  // namespace atc
