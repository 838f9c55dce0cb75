#pragma once

#include "atc/doc.hpp"
#include "atc/score.hpp"
#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atc {

/// An accuracy estimation method: ATC with one score function, or DoC.
class Method {
 public:
  enum class Kind { atc, doc, doc_regression };

  static Method atc(ScoreFn fn) { return Method(Kind::atc, fn); }
  static Method doc() { return Method(Kind::doc, ScoreFn::max_confidence); }
  static Method doc_regression() { return Method(Kind::doc_regression, ScoreFn::max_confidence); }

  Kind kind() const { return kind_; }
  /// Only meaningful for Kind::atc.
  ScoreFn score() const { return score_; }
  /// max, negent, l2n, l1u, l2u, js, doc or doc-reg.
  std::string name() const;

  friend bool operator==(const Method&, const Method&) = default;

 private:
  Method(Kind kind, ScoreFn score) : kind_(kind), score_(score) {}
  Kind kind_;
  ScoreFn score_;
};

Method parse_method(std::string_view name);
/// The six ATC score functions followed by naive DoC.
std::vector<Method> default_methods();

/// Point estimate of target accuracy. Calibration sets are used by doc-reg only.
MetricValue estimate_accuracy(const Method& method, const PredictionSet& source, const PredictionSet& target,
                              std::span<const CalibrationSet> calibration = {});

struct BenchmarkConfig {
  std::vector<Method> methods = default_methods();
  std::size_t n_boot = 1000;
  double ci_level = 0.95;
  std::uint64_t master_seed = 0;
  /// Worker threads; output does not depend on this.
  unsigned threads = 1;
};

/// One dimension's data: validation (resampled per run) and labeled test set.
struct BenchmarkInput {
  PredictionSet source;
  PredictionSet test;
  std::vector<CalibrationSet> calibration;
};

struct RunRecord {
  Eigen::Index dimension;
  Method method;
  std::size_t run;
  double abs_error;
};

struct AggregateRow {
  Eigen::Index dimension;
  Method method;
  double mean_abs_error;
  double ci_low;
  double ci_high;
};

struct MethodWins {
  Method method;
  std::size_t wins;
};

struct RankingOptions {
  /// Means are compared after rounding to this step.
  double precision = 1e-10;
  bool exclude_binary = false;
};

struct PairwiseDifference {
  Eigen::Index dimension;
  Method a;
  Method b;
  /// Mean over runs of error(a) - error(b).
  double mean_difference;
  double ci_low;
  double ci_high;
  bool excludes_zero;
};

/// Seed of one bootstrap run. Every method in a run sees the same resample.
std::uint64_t run_seed(std::uint64_t master_seed, Eigen::Index dimension, std::size_t run);

/// |data| draws with replacement.
std::vector<Eigen::Index> bootstrap_indices(Eigen::Index n, std::uint64_t seed);
PredictionSet bootstrap_resample(const PredictionSet& data, std::uint64_t seed);

/// Records ordered by (dimension, method order in config, run); inputs are
/// taken in ascending dimension.
std::vector<RunRecord> run_benchmark(std::span<const BenchmarkInput> inputs, const BenchmarkConfig& config);
std::vector<RunRecord> run_benchmark(const PredictionSet& source_val, const PredictionSet& test,
                                     const BenchmarkConfig& config);

/// Quantile of ascending-sorted values by linear interpolation between order
/// statistics at position q * (n - 1).
double sorted_quantile(std::span<const double> sorted, double q);

/// Mean and percentile interval per (dimension, method), in record order.
std::vector<AggregateRow> aggregate(std::span<const RunRecord> records, double ci_level = 0.95);

/// Every method tied for the lowest mean in a dimension scores a win, so win
/// counts can sum to more than the number of dimensions.
std::vector<MethodWins> rank_methods(std::span<const AggregateRow> rows, const RankingOptions& options = {});

/// Per dimension and method pair, run-matched error differences.
std::vector<PairwiseDifference> pairwise_difference_report(std::span<const RunRecord> records,
                                                           double ci_level = 0.95);

}  // namespace atc
