#include "atc/bootstrap.hpp"

#include "atc/errors.hpp"
#include "atc/random.hpp"
#include "atc/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <limits>
#include <thread>
#include <tuple>

namespace atc {

std::string Method::name() const {
  switch (kind_) {
    case Kind::atc: return std::string(atc::name(score_));
    case Kind::doc: return "doc";
    case Kind::doc_regression: return "doc-reg";
  }
  return {};
}

Method parse_method(std::string_view text) {
  if (text == "doc") return Method::doc();
  if (text == "doc-reg") return Method::doc_regression();
  try {
    return Method::atc(parse_score_fn(text));
  } catch (const InvalidArgument&) {
    throw InvalidArgument("unknown method '" + std::string(text) +
                          "' (expected a score function name, doc or doc-reg)");
  }
}

std::vector<Method> default_methods() {
  std::vector<Method> out;
  for (ScoreFn fn : kAllScoreFns) out.push_back(Method::atc(fn));
  out.push_back(Method::doc());
  return out;
}

MetricValue estimate_accuracy(const Method& method, const PredictionSet& source, const PredictionSet& target,
                              std::span<const CalibrationSet> calibration) {
  switch (method.kind()) {
    case Method::Kind::atc:
      return atc_estimate(source, target, Scorer(method.score())).target_value.as(MetricConvention::accuracy);
    case Method::Kind::doc: return doc_estimate(source, target, DocMode::naive);
    case Method::Kind::doc_regression: return doc_estimate(source, target, DocMode::regression, calibration);
  }
  throw InvalidArgument("unknown method");
}

std::uint64_t run_seed(std::uint64_t master_seed, Eigen::Index dimension, std::size_t run) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(dimension), static_cast<std::uint64_t>(run));
}

std::vector<Eigen::Index> bootstrap_indices(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw EmptyInput("cannot resample an empty set");
  Rng rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (auto& i : idx) i = pick(rng);
  return idx;
}

PredictionSet bootstrap_resample(const PredictionSet& data, std::uint64_t seed) {
  return data.select(bootstrap_indices(data.size(), seed));
}

namespace {

// Everything about one dimension that does not change between runs.
struct Prepared {
  Eigen::Index dimension;
  Eigen::Index n_source;
  Eigen::VectorXd source_hits;
  Eigen::VectorXd source_max_conf;
  std::map<ScoreFn, Eigen::VectorXd> source_scores;
  std::map<ScoreFn, Eigen::VectorXd> test_scores;
  double test_accuracy;
  double test_mean_conf;
  std::vector<double> calibration_mean_conf;
  std::vector<double> calibration_accuracy;
};

Prepared prepare(const BenchmarkInput& input, const std::vector<Method>& methods) {
  require_same_dimension(input.source, input.test);
  Prepared p;
  p.dimension = input.source.dimension();
  p.n_source = input.source.size();
  p.source_hits = correctness(input.source);
  p.source_max_conf = input.source.probabilities().rowwise().maxCoeff();
  p.test_accuracy = true_accuracy(input.test).accuracy();
  p.test_mean_conf = mean_max_confidence(input.test);
  for (const auto& m : methods) {
    if (m.kind() == Method::Kind::atc && !p.source_scores.contains(m.score())) {
      p.source_scores.emplace(m.score(), score_batch(input.source, m.score()));
      p.test_scores.emplace(m.score(), score_batch(input.test, m.score()));
    }
    if (m.kind() == Method::Kind::doc_regression && p.calibration_mean_conf.empty()) {
      if (input.calibration.size() < 2) {
        throw InsufficientCalibration("doc-reg needs at least 2 calibration sets for dimension " +
                                      std::to_string(p.dimension));
      }
      for (const auto& c : input.calibration) {
        require_same_dimension(input.source, c.data);
        p.calibration_mean_conf.push_back(mean_max_confidence(c.data));
        p.calibration_accuracy.push_back(c.accuracy.accuracy());
      }
    }
  }
  return p;
}

double run_once(const Prepared& p, const Method& method, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<double>(idx.size());
  const double source_accuracy = p.source_hits(idx).sum() / n;
  double estimate = 0.0;
  if (method.kind() == Method::Kind::atc) {
    const Eigen::VectorXd resampled = p.source_scores.at(method.score())(idx);
    const ThresholdModel model =
        learn_threshold(resampled, MetricValue::accuracy(source_accuracy).as(MetricConvention::error));
    estimate = estimate_target(model, p.test_scores.at(method.score())).accuracy();
  } else {
    const Eigen::VectorXd conf = p.source_max_conf(idx);
    const double source_mean_conf = conf.mean();
    double intercept = 0.0;
    double slope = 1.0;
    if (method.kind() == Method::Kind::doc_regression) {
      const auto m = static_cast<Eigen::Index>(p.calibration_mean_conf.size());
      Eigen::VectorXd gaps(m);
      Eigen::VectorXd drops(m);
      for (Eigen::Index c = 0; c < m; ++c) {
        gaps(c) = source_mean_conf - p.calibration_mean_conf[static_cast<std::size_t>(c)];
        drops(c) = source_accuracy - p.calibration_accuracy[static_cast<std::size_t>(c)];
      }
      const LineFit fit = fit_drop_line(gaps, drops);
      intercept = fit.intercept;
      slope = fit.slope;
    }
    const double gap = source_mean_conf - p.test_mean_conf;
    estimate = std::clamp(source_accuracy - (intercept + slope * gap), 0.0, 1.0);
  }
  return std::abs(p.test_accuracy - estimate);
}

std::pair<double, double> percentile_interval(std::vector<double> values, double ci_level) {
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - ci_level) / 2.0;
  return {sorted_quantile(values, tail), sorted_quantile(values, 1.0 - tail)};
}

double naive_mean(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

}  // namespace

std::vector<RunRecord> run_benchmark(std::span<const BenchmarkInput> inputs, const BenchmarkConfig& config) {
  if (config.n_boot < 1) throw InvalidArgument("n_boot must be >= 1");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) throw InvalidArgument("ci_level must lie in (0, 1)");
  if (config.methods.empty()) throw InvalidArgument("no methods selected");

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inputs[a].source.dimension() < inputs[b].source.dimension();
  });

  std::vector<RunRecord> records;
  for (std::size_t which : order) {
    const Prepared prepared = prepare(inputs[which], config.methods);
    const std::size_t offset = records.size();
    const std::size_t tasks = config.methods.size() * config.n_boot;
    records.resize(offset + tasks, RunRecord{prepared.dimension, config.methods.front(), 0, 0.0});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t t = next++; t < tasks; t = next++) {
        const Method& method = config.methods[t / config.n_boot];
        const std::size_t run = t % config.n_boot;
        const auto idx =
            bootstrap_indices(prepared.n_source, run_seed(config.master_seed, prepared.dimension, run));
        records[offset + t] = RunRecord{prepared.dimension, method, run, run_once(prepared, method, idx)};
      }
    };
    const unsigned n_threads = std::max(1u, config.threads);
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
  }
  return records;
}

std::vector<RunRecord> run_benchmark(const PredictionSet& source_val, const PredictionSet& test,
                                     const BenchmarkConfig& config) {
  const BenchmarkInput input{source_val, test, {}};
  return run_benchmark(std::span<const BenchmarkInput>(&input, 1), config);
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInput("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<AggregateRow> aggregate(std::span<const RunRecord> records, double ci_level) {
  if (records.empty()) throw EmptyInput("no run records to aggregate");
  std::vector<std::pair<Eigen::Index, Method>> keys;
  std::vector<std::vector<double>> groups;
  for (const auto& r : records) {
    auto it = std::find(keys.begin(), keys.end(), std::pair{r.dimension, r.method});
    if (it == keys.end()) {
      keys.emplace_back(r.dimension, r.method);
      groups.emplace_back();
      it = keys.end() - 1;
    }
    groups[static_cast<std::size_t>(it - keys.begin())].push_back(r.abs_error);
  }
  std::vector<AggregateRow> rows;
  for (std::size_t g = 0; g < keys.size(); ++g) {
    const auto [lo, hi] = percentile_interval(groups[g], ci_level);
    rows.push_back(AggregateRow{keys[g].first, keys[g].second, naive_mean(groups[g]), lo, hi});
  }
  return rows;
}

std::vector<MethodWins> rank_methods(std::span<const AggregateRow> rows, const RankingOptions& options) {
  std::vector<MethodWins> wins;
  std::vector<Eigen::Index> dimensions;
  for (const auto& row : rows) {
    if (std::find_if(wins.begin(), wins.end(), [&](const auto& w) { return w.method == row.method; }) ==
        wins.end()) {
      wins.push_back({row.method, 0});
    }
    if (std::find(dimensions.begin(), dimensions.end(), row.dimension) == dimensions.end()) {
      dimensions.push_back(row.dimension);
    }
  }
  auto rounded = [&](double v) { return std::round(v / options.precision); };
  for (Eigen::Index d : dimensions) {
    if (options.exclude_binary && d == 2) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      if (row.dimension == d) best = std::min(best, rounded(row.mean_abs_error));
    }
    for (const auto& row : rows) {
      if (row.dimension == d && rounded(row.mean_abs_error) == best) {
        std::find_if(wins.begin(), wins.end(), [&](const auto& w) { return w.method == row.method; })->wins++;
      }
    }
  }
  if (options.exclude_binary &&
      std::all_of(dimensions.begin(), dimensions.end(), [](Eigen::Index d) { return d == 2; })) {
    return {};
  }
  return wins;
}

std::vector<PairwiseDifference> pairwise_difference_report(std::span<const RunRecord> records,
                                                           double ci_level) {
  // dimension -> method -> run -> error
  std::vector<Eigen::Index> dimensions;
  std::vector<Method> methods;
  std::map<std::tuple<Eigen::Index, std::size_t, std::size_t>, double> errors;
  for (const auto& r : records) {
    if (std::find(dimensions.begin(), dimensions.end(), r.dimension) == dimensions.end()) {
      dimensions.push_back(r.dimension);
    }
    auto it = std::find(methods.begin(), methods.end(), r.method);
    if (it == methods.end()) {
      methods.push_back(r.method);
      it = methods.end() - 1;
    }
    errors[{r.dimension, static_cast<std::size_t>(it - methods.begin()), r.run}] = r.abs_error;
  }

  std::vector<PairwiseDifference> out;
  for (Eigen::Index d : dimensions) {
    for (std::size_t a = 0; a < methods.size(); ++a) {
      for (std::size_t b = a + 1; b < methods.size(); ++b) {
        std::vector<double> diffs;
        for (const auto& [key, err_a] : errors) {
          const auto& [dim, method, run] = key;
          if (dim != d || method != a) continue;
          const auto other = errors.find({d, b, run});
          if (other != errors.end()) diffs.push_back(err_a - other->second);
        }
        if (diffs.empty()) continue;
        const double mean = naive_mean(diffs);
        const auto [lo, hi] = percentile_interval(diffs, ci_level);
        out.push_back(PairwiseDifference{d, methods[a], methods[b], mean, lo, hi, lo > 0.0 || hi < 0.0});
      }
    }
  }
  return out;
}

}  // namespace atc
