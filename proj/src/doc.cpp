#include "atc/doc.hpp"

#include "atc/errors.hpp"

#include <algorithm>

namespace atc {

double mean_max_confidence(const PredictionSet& data) {
  return data.probabilities().rowwise().maxCoeff().mean();
}

double doc_gap(const PredictionSet& source, const PredictionSet& target) {
  require_same_dimension(source, target);
  return mean_max_confidence(source) - mean_max_confidence(target);
}

LineFit fit_drop_line(const Eigen::Ref<const Eigen::VectorXd>& gaps,
                      const Eigen::Ref<const Eigen::VectorXd>& drops) {
  if (gaps.size() != drops.size()) throw DimensionMismatch("gap and drop counts differ");
  if (gaps.size() < 2) {
    throw InsufficientCalibration("regression needs at least 2 calibration sets, got " +
                                  std::to_string(gaps.size()));
  }
  if ((gaps.array() == gaps(0)).all()) {
    throw DegenerateDesign("all calibration gaps are equal; slope is undetermined");
  }
  Eigen::MatrixXd design(gaps.size(), 2);
  design.col(0).setOnes();
  design.col(1) = gaps;
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(drops);
  const double rss = (design * beta - drops).squaredNorm();
  return LineFit{beta(0), beta(1), rss};
}

DocModel naive_doc_model(const PredictionSet& source) {
  return DocModel{DocMode::naive, 0.0, 1.0, mean_max_confidence(source), true_accuracy(source)};
}

DocModel fit_doc_regression(const PredictionSet& source, std::span<const CalibrationSet> calibration) {
  const MetricValue source_accuracy = true_accuracy(source);
  Eigen::VectorXd gaps(static_cast<Eigen::Index>(calibration.size()));
  Eigen::VectorXd drops(gaps.size());
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    gaps(row) = doc_gap(source, calibration[i].data);
    drops(row) = source_accuracy.accuracy() - calibration[i].accuracy.accuracy();
  }
  const LineFit fit = fit_drop_line(gaps, drops);
  return DocModel{DocMode::regression, fit.intercept, fit.slope, mean_max_confidence(source),
                  source_accuracy};
}

MetricValue doc_predict(const DocModel& model, const PredictionSet& target) {
  const double gap = model.source_mean_confidence - mean_max_confidence(target);
  const double estimate = model.source_accuracy.accuracy() - (model.intercept + model.slope * gap);
  return MetricValue::accuracy(std::clamp(estimate, 0.0, 1.0));
}

MetricValue doc_estimate(const PredictionSet& source, const PredictionSet& target, DocMode mode,
                         std::span<const CalibrationSet> calibration) {
  require_same_dimension(source, target);
  const DocModel model =
      mode == DocMode::naive ? naive_doc_model(source) : fit_doc_regression(source, calibration);
  return doc_predict(model, target);
}

}  // namespace atc
