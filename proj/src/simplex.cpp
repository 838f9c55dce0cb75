#include "atc/simplex.hpp"

#include "atc/errors.hpp"

#include <cmath>
#include <string>

namespace atc {

ProbabilityVector ProbabilityVector::validate(std::span<const double> raw, double tolerance) {
  return validate(Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size())),
                  tolerance);
}

ProbabilityVector ProbabilityVector::validate(const Eigen::Ref<const Eigen::VectorXd>& raw,
                                              double tolerance) {
  if (raw.size() < 2) {
    throw DimensionError("probability vector needs at least 2 components, got " +
                         std::to_string(raw.size()));
  }
  Eigen::VectorXd v = raw;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) < -tolerance) {
      throw NotOnSimplex("component " + std::to_string(i) + " = " + std::to_string(v(i)) +
                         " is not a probability");
    }
    if (v(i) < 0.0) v(i) = 0.0;
  }
  const double total = v.sum();
  if (std::abs(total - 1.0) > tolerance) {
    throw NotOnSimplex("components sum to " + std::to_string(total) + ", not 1");
  }
  if (total != 1.0) v /= total;
  return ProbabilityVector(std::move(v));
}

MetricValue::MetricValue(double value, MetricConvention convention)
    : value_(value), convention_(convention) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("metric value " + std::to_string(value) + " outside [0, 1]");
  }
}

PredictionSet::PredictionSet(const ProbabilityMatrix& rows, std::optional<std::vector<int>> labels,
                             double tolerance)
    : probabilities_(rows.rows(), rows.cols()), labels_(std::move(labels)) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    probabilities_.row(i) = ProbabilityVector::validate(rows.row(i).transpose(), tolerance).values();
  }
  finish();
}

PredictionSet::PredictionSet(std::span<const ProbabilityVector> vectors,
                             std::optional<std::vector<int>> labels)
    : labels_(std::move(labels)) {
  if (vectors.empty()) throw EmptyInput("prediction set is empty");
  const Eigen::Index k = vectors.front().size();
  probabilities_.resize(static_cast<Eigen::Index>(vectors.size()), k);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != k) {
      throw DimensionMismatch("vector " + std::to_string(i) + " has dimension " +
                              std::to_string(vectors[i].size()) + ", expected " + std::to_string(k));
    }
    probabilities_.row(static_cast<Eigen::Index>(i)) = vectors[i].values().transpose();
  }
  finish();
}

PredictionSet::PredictionSet(Trusted, ProbabilityMatrix rows, std::optional<std::vector<int>> labels)
    : probabilities_(std::move(rows)), labels_(std::move(labels)) {
  finish();
}

void PredictionSet::finish() {
  if (probabilities_.rows() == 0) throw EmptyInput("prediction set is empty");
  if (probabilities_.cols() < 2) {
    throw DimensionError("prediction set needs at least 2 classes");
  }
  const Eigen::Index k = probabilities_.cols();
  if (labels_) {
    if (static_cast<Eigen::Index>(labels_->size()) != probabilities_.rows()) {
      throw DimensionMismatch("got " + std::to_string(labels_->size()) + " labels for " +
                              std::to_string(probabilities_.rows()) + " vectors");
    }
    for (int label : *labels_) {
      if (label < 0 || label >= k) {
        throw InvalidArgument("label " + std::to_string(label) + " outside [0, " +
                              std::to_string(k) + ")");
      }
    }
  }
  predicted_.resize(static_cast<std::size_t>(probabilities_.rows()));
  for (Eigen::Index i = 0; i < probabilities_.rows(); ++i) {
    predicted_[static_cast<std::size_t>(i)] = static_cast<int>(atc::argmax(probabilities_.row(i)));
  }
}

ProbabilityVector PredictionSet::vector(Eigen::Index i) const {
  return ProbabilityVector::validate(probabilities_.row(i).transpose());
}

const std::vector<int>& PredictionSet::labels() const {
  if (!labels_) throw MissingLabels("prediction set has no labels");
  return *labels_;
}

PredictionSet PredictionSet::select(std::span<const Eigen::Index> indices) const {
  ProbabilityMatrix rows(static_cast<Eigen::Index>(indices.size()), dimension());
  std::optional<std::vector<int>> labels;
  if (labels_) labels.emplace(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = probabilities_.row(indices[i]);
    if (labels_) (*labels)[i] = (*labels_)[static_cast<std::size_t>(indices[i])];
  }
  return PredictionSet(Trusted{}, std::move(rows), std::move(labels));
}

PredictionSet PredictionSet::without_labels() const {
  return PredictionSet(Trusted{}, probabilities_, std::nullopt);
}

Eigen::VectorXd correctness(const PredictionSet& data) {
  const auto& labels = data.labels();
  const auto& predicted = data.predicted_labels();
  Eigen::VectorXd hit(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    hit(i) = predicted[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  return hit;
}

MetricValue true_accuracy(const PredictionSet& data) {
  const Eigen::VectorXd hit = correctness(data);
  return MetricValue::accuracy(hit.sum() / static_cast<double>(hit.size()));
}

void require_same_dimension(const PredictionSet& a, const PredictionSet& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("dimension " + std::to_string(a.dimension()) + " vs " +
                            std::to_string(b.dimension()));
  }
}

}  // namespace atc
