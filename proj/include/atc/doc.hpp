#pragma once

#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <span>

namespace atc {

// Difference-of-confidence baseline. The predicted accuracy drop is a line in
// the gap between mean max-confidence on the source and on the target:
//   estimate = clamp(source_accuracy - (intercept + slope * gap), 0, 1)
// Naive mode fixes the line to drop = gap.

enum class DocMode { naive, regression };

struct DocModel {
  DocMode mode;
  double intercept;
  double slope;
  double source_mean_confidence;
  MetricValue source_accuracy;
};

/// A labeled held-out set used to calibrate the regression line.
struct CalibrationSet {
  PredictionSet data;
  MetricValue accuracy;
};

struct LineFit {
  double intercept;
  double slope;
  double residual_sum_of_squares;
};

double mean_max_confidence(const PredictionSet& data);

/// mean max-confidence(source) - mean max-confidence(target).
double doc_gap(const PredictionSet& source, const PredictionSet& target);

/// Ordinary least squares of drop on gap. Needs two or more points with
/// distinct gaps.
LineFit fit_drop_line(const Eigen::Ref<const Eigen::VectorXd>& gaps,
                      const Eigen::Ref<const Eigen::VectorXd>& drops);

DocModel naive_doc_model(const PredictionSet& source);

/// Fits drop = source accuracy - calibration accuracy against the gap from the
/// source to each calibration set.
DocModel fit_doc_regression(const PredictionSet& source, std::span<const CalibrationSet> calibration);

MetricValue doc_predict(const DocModel& model, const PredictionSet& target);

MetricValue doc_estimate(const PredictionSet& source, const PredictionSet& target, DocMode mode,
                         std::span<const CalibrationSet> calibration = {});

}  // namespace atc
