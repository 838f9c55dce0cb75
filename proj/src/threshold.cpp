#include "atc/threshold.hpp"

#include "atc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atc {

bool ThresholdModel::is_sentinel() const { return threshold == threshold_sentinel(); }

double threshold_sentinel() { return std::numeric_limits<double>::infinity(); }

ThresholdModel learn_threshold(const Eigen::Ref<const Eigen::VectorXd>& source_scores,
                               const MetricValue& source_metric) {
  if (source_scores.size() == 0) throw EmptyInput("no source scores");
  const double gamma = source_metric.error();
  const auto n = static_cast<double>(source_scores.size());

  Eigen::VectorXd sorted = source_scores;
  std::sort(sorted.data(), sorted.data() + sorted.size());

  // At the first occurrence of each distinct value, the index equals the count
  // of scores strictly below it.
  double best_t = threshold_sentinel();
  double best_proportion = 1.0;
  double best_gap = std::abs(gamma - 1.0);
  bool have_best = false;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted(i) == sorted(i - 1)) continue;
    const double proportion = static_cast<double>(i) / n;
    const double gap = std::abs(gamma - proportion);
    if (!have_best || gap < best_gap) {
      best_t = sorted(i);
      best_proportion = proportion;
      best_gap = gap;
      have_best = true;
    }
  }
  if (std::abs(gamma - 1.0) < best_gap) {
    best_t = threshold_sentinel();
    best_proportion = 1.0;
  }
  return ThresholdModel{{}, best_t, MetricValue::error(gamma), best_proportion};
}

MetricValue estimate_target(const ThresholdModel& model,
                            const Eigen::Ref<const Eigen::VectorXd>& target_scores) {
  if (target_scores.size() == 0) throw EmptyInput("no target scores");
  const auto below = (target_scores.array() < model.threshold).count();
  return MetricValue::error(static_cast<double>(below) / static_cast<double>(target_scores.size()));
}

std::vector<Eigen::Index> below_threshold(const ThresholdModel& model,
                                          const Eigen::Ref<const Eigen::VectorXd>& scores) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores(i) < model.threshold) out.push_back(i);
  }
  return out;
}

AtcEstimate atc_estimate(const PredictionSet& source, const PredictionSet& target, const Scorer& scorer) {
  require_same_dimension(source, target);
  const MetricValue source_error = true_accuracy(source).as(MetricConvention::error);
  ThresholdModel model = learn_threshold(score_batch(source, scorer), source_error);
  model.score = scorer.name();
  const MetricValue target_error = estimate_target(model, score_batch(target, scorer));
  return AtcEstimate{std::move(model), target_error, source.size(), target.size()};
}

}  // namespace atc
