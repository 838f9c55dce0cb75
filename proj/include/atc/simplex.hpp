#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace atc {

/// Sum-to-one tolerance applied when ingesting softmax dumps.
inline constexpr double kIngestTolerance = 1e-6;

using ProbabilityMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Index of the largest component; ties resolve to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

/// A point of the probability simplex with k >= 2 components. Only obtainable
/// through validation, so holders may assume non-negative components that sum
/// to one within machine precision.
class ProbabilityVector {
 public:
  static ProbabilityVector validate(std::span<const double> raw, double tolerance = kIngestTolerance);
  static ProbabilityVector validate(const Eigen::Ref<const Eigen::VectorXd>& raw,
                                    double tolerance = kIngestTolerance);

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_(i); }
  Eigen::Index argmax() const { return atc::argmax(values_); }

  friend bool operator==(const ProbabilityVector& a, const ProbabilityVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  explicit ProbabilityVector(Eigen::VectorXd v) : values_(std::move(v)) {}

  Eigen::VectorXd values_;
};

inline ProbabilityVector validate_vector(std::span<const double> raw,
                                         double tolerance = kIngestTolerance) {
  return ProbabilityVector::validate(raw, tolerance);
}

enum class MetricConvention { accuracy, error };

/// A performance metric in [0, 1] tagged with its convention.
class MetricValue {
 public:
  static MetricValue accuracy(double value) { return MetricValue(value, MetricConvention::accuracy); }
  static MetricValue error(double value) { return MetricValue(value, MetricConvention::error); }

  double value() const { return value_; }
  MetricConvention convention() const { return convention_; }

  double accuracy() const { return convention_ == MetricConvention::accuracy ? value_ : 1.0 - value_; }
  double error() const { return convention_ == MetricConvention::error ? value_ : 1.0 - value_; }
  double in(MetricConvention c) const { return c == MetricConvention::accuracy ? accuracy() : error(); }
  MetricValue as(MetricConvention c) const { return MetricValue(in(c), c); }

 private:
  MetricValue(double value, MetricConvention convention);

  double value_;
  MetricConvention convention_;
};

/// Rows of softmax outputs (one example per row) with optional true labels.
class PredictionSet {
 public:
  /// Validates every row with the given tolerance and renormalizes it.
  explicit PredictionSet(const ProbabilityMatrix& rows,
                         std::optional<std::vector<int>> labels = std::nullopt,
                         double tolerance = kIngestTolerance);
  explicit PredictionSet(std::span<const ProbabilityVector> vectors,
                         std::optional<std::vector<int>> labels = std::nullopt);

  Eigen::Index size() const { return probabilities_.rows(); }
  Eigen::Index dimension() const { return probabilities_.cols(); }

  const ProbabilityMatrix& probabilities() const { return probabilities_; }
  auto row(Eigen::Index i) const { return probabilities_.row(i); }
  ProbabilityVector vector(Eigen::Index i) const;

  bool has_labels() const { return labels_.has_value(); }
  /// Throws MissingLabels when the set is unlabeled.
  const std::vector<int>& labels() const;
  const std::vector<int>& predicted_labels() const { return predicted_; }

  /// Rows at the given indices, with their labels. Indices may repeat.
  PredictionSet select(std::span<const Eigen::Index> indices) const;
  PredictionSet without_labels() const;

 private:
  struct Trusted {};
  PredictionSet(Trusted, ProbabilityMatrix rows, std::optional<std::vector<int>> labels);
  void finish();

  ProbabilityMatrix probabilities_;
  std::optional<std::vector<int>> labels_;
  std::vector<int> predicted_;
};

/// Fraction of rows whose argmax equals the label.
MetricValue true_accuracy(const PredictionSet& data);

/// Per-row 1/0 indicator of argmax == label.
Eigen::VectorXd correctness(const PredictionSet& data);

void require_same_dimension(const PredictionSet& a, const PredictionSet& b);

}  // namespace atc
