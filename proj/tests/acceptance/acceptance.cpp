// Acceptance suite. Prints one PASS/FAIL line per criterion; the exit code is
// nonzero when any selected criterion fails.

#include "atc/bootstrap.hpp"
#include "atc/io.hpp"
#include "atc/ordering.hpp"
#include "atc/random.hpp"
#include "atc/score.hpp"
#include "atc/synthetic.hpp"
#include "atc/threshold.hpp"
#include "cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace atc;

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> body;
};

std::pair<PredictionSet, PredictionSet> random_pair(Eigen::Index k, Eigen::Index n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, k, hash_name("pair")));
  std::uniform_real_distribution<double> accuracy(0.35, 0.95);
  std::uniform_real_distribution<double> concentration(0.5, 8.0);
  std::uniform_real_distribution<double> temperature(0.6, 2.5);
  GeneratorSpec spec;
  spec.k = k;
  spec.n = n;
  spec.target_accuracy = accuracy(rng);
  spec.concentration = concentration(rng);
  spec.seed = seed;
  auto [source, target] = make_shift_pair(spec, Shift{temperature(rng), std::nullopt});
  return {std::move(source.data), std::move(target.data)};
}

double estimate_of(const PredictionSet& source, const PredictionSet& target, const Scorer& scorer) {
  return atc_estimate(source, target, scorer).target_value.value();
}

// Criterion 1: every score function gives the same estimate for two classes.
Outcome binary_collapse() {
  std::size_t mismatches = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto [source, target] = random_pair(2, 500, s);
    const double reference = estimate_of(source, target, ScoreFn::max_confidence);
    for (ScoreFn fn : kAllScoreFns) mismatches += estimate_of(source, target, fn) != reference;
  }
  return {mismatches == 0, "200 pairs, " + std::to_string(mismatches) + " unequal estimates"};
}

// Criterion 2: l2n and l2u agree exactly and differ by 1/k pointwise.
Outcome l2_equivalence() {
  std::size_t mismatches = 0;
  double worst_offset = 0.0;
  for (Eigen::Index k = 2; k <= 20; ++k) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto [source, target] = random_pair(k, 300, s);
      mismatches += estimate_of(source, target, ScoreFn::l2_norm) !=
                    estimate_of(source, target, ScoreFn::l2_to_uniform);
      for (const PredictionSet* set : {&source, &target}) {
        const Eigen::VectorXd diff =
            score_batch(*set, ScoreFn::l2_norm) - score_batch(*set, ScoreFn::l2_to_uniform);
        worst_offset = std::max(worst_offset, (diff.array() - 1.0 / static_cast<double>(k)).abs().maxCoeff());
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "k=2..20 x 50 pairs, %zu unequal estimates, max |offset - 1/k| = %.3g",
                mismatches, worst_offset);
  return {mismatches == 0 && worst_offset <= 1e-12, detail};
}

// Criterion 3: increasing transforms of a score leave the estimate unchanged.
Outcome transform_invariance() {
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  for (Eigen::Index k : {2, 5, 10}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto [source, target] = random_pair(k, 300, s);
      for (ScoreFn fn : kAllScoreFns) {
        const double base = estimate_of(source, target, fn);
        for (const auto& t : {MonotoneTransform::affine(fn, 2.0, 1.0), MonotoneTransform::odd_power(fn, 3)}) {
          mismatches += estimate_of(source, target, t) != base;
          ++checks;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(checks) + " transformed estimates, " + std::to_string(mismatches) +
                               " differ from base"};
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  std::copy(values.begin(), values.end(), v.data());
  return v;
}

// Criterion 4: the two known counterexamples.
Outcome published_witnesses() {
  const auto p1 = ProbabilityVector::validate(vec({0.5, 0.2, 0.3}));
  const auto q1 = ProbabilityVector::validate(vec({0.5, 0.5, 0.0}));
  const Scorer l2(ScoreFn::l2_norm);
  const Scorer linf(ScoreFn::max_confidence);
  const bool first = std::abs(l2(p1) - 0.38) <= 1e-12 && std::abs(l2(q1) - 0.5) <= 1e-12 &&
                     std::abs(linf(p1) - 0.5) <= 1e-12 && std::abs(linf(q1) - 0.5) <= 1e-12 &&
                     !check_pair(p1, q1, l2, linf);

  const auto p2 = ProbabilityVector::validate(vec({0.4, 0.6}));
  const auto q2 = ProbabilityVector::validate(vec({0.5, 0.5}));
  const Scorer to_r = Scorer::l2_to_reference(vec({0.3, 0.7}));
  const bool second = std::abs(l2(p2) - 0.52) <= 1e-12 && std::abs(l2(q2) - 0.5) <= 1e-12 &&
                      std::abs(to_r(p2) - 0.02) <= 1e-12 && std::abs(to_r(q2) - 0.08) <= 1e-12 &&
                      !check_pair(p2, q2, l2, to_r);

  char detail[200];
  std::snprintf(detail, sizeof detail,
                "l2n %.12g/%.12g vs max %.12g/%.12g; l2n %.12g/%.12g vs dist-to-r %.12g/%.12g", l2(p1), l2(q1),
                linf(p1), linf(q1), l2(p2), l2(q2), to_r(p2), to_r(q2));
  return {first && second, detail};
}

// Criterion 5: class structure reported by the verify command.
Outcome verify_classes() {
  std::string notes;
  bool ok = true;
  std::size_t false_counterexamples = 0;
  for (const char* k : {"2", "3"}) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"verify", "--k", k, "--budget", "100000"}, out, err);
    ok = ok && code == cli::kExitOk;
    std::set<std::string> classes;
    std::istringstream lines(out.str());
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind("class:", 0) == 0) classes.insert(line);
      if (line.empty() || line.front() != '{') continue;
      const auto record = nlohmann::json::parse(line);
      const bool guaranteed = std::string(k) == "2" || (record["a"] == "l2n" && record["b"] == "l2u");
      if (guaranteed && record["status"] != "consistent") ++false_counterexamples;
      if (guaranteed && record["pairs_checked"].get<std::size_t>() < 100000) ok = false;
    }
    const std::set<std::string> expected =
        std::string(k) == "2"
            ? std::set<std::string>{"class: max negent l2n l1u l2u js"}
            : std::set<std::string>{"class: max", "class: negent", "class: l2n l2u", "class: l1u", "class: js"};
    ok = ok && classes == expected;
    notes += "k=" + std::string(k) + ": " + std::to_string(classes.size()) + " classes (exit " +
             std::to_string(code) + "); ";
  }
  notes += std::to_string(false_counterexamples) + " false counterexamples";
  return {ok && false_counterexamples == 0, notes};
}

// Criterion 6: consistency on the union of the data implies equal estimates.
// Orders are compared exactly: the threshold rule uses strict <, and cubing
// pushes small scores below any fixed absolute tolerance.
Outcome ordering_downstream() {
  std::vector<Scorer> scorers;
  for (ScoreFn fn : kAllScoreFns) {
    scorers.emplace_back(fn);
    scorers.emplace_back(MonotoneTransform::affine(fn, 2.0, 1.0));
    scorers.emplace_back(MonotoneTransform::odd_power(fn, 3));
  }
  std::size_t consistent_pairs = 0;
  std::size_t violations = 0;
  std::size_t missed_guaranteed = 0;
  for (Eigen::Index k : {2, 3, 4, 6, 10}) {
    for (std::uint64_t s = 0; s < 2; ++s) {
      const auto [source, target] = random_pair(k, 200, 1000 + s);
      ProbabilityMatrix points(source.size() + target.size(), k);
      points << source.probabilities(), target.probabilities();
      for (std::size_t i = 0; i < scorers.size(); ++i) {
        for (std::size_t j = i + 1; j < scorers.size(); ++j) {
          const ScoreFn fi = kAllScoreFns[i / 3];
          const ScoreFn fj = kAllScoreFns[j / 3];
          const bool guaranteed = k == 2 || fi == fj ||
                                  (std::set<ScoreFn>{fi, fj} ==
                                   std::set<ScoreFn>{ScoreFn::l2_norm, ScoreFn::l2_to_uniform});
          if (!verify_on_points(points, scorers[i], scorers[j], 0.0).consistent()) {
            missed_guaranteed += guaranteed;
            continue;
          }
          ++consistent_pairs;
          violations += estimate_of(source, target, scorers[i]) != estimate_of(source, target, scorers[j]);
        }
      }
    }
  }
  return {violations == 0 && missed_guaranteed == 0,
          std::to_string(consistent_pairs) + " consistent scorer pairs, " + std::to_string(violations) +
              " with unequal estimates, " + std::to_string(missed_guaranteed) + " guaranteed pairs not consistent"};
}

// Criterion 7: estimating a set on itself is off by at most half a step.
Outcome self_consistency() {
  double worst_ratio = 0.0;
  bool distinct = true;
  for (Eigen::Index n : {10, 100, 1000}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto [source, unused] = random_pair(5, n, 50 + s);
      const double truth = true_accuracy(source).value();
      for (ScoreFn fn : kAllScoreFns) {
        Eigen::VectorXd scores = score_batch(source, fn);
        std::sort(scores.begin(), scores.end());
        distinct = distinct && std::adjacent_find(scores.begin(), scores.end()) == scores.end();
        const double estimate = atc_estimate(source, source, fn).target_value.accuracy();
        worst_ratio = std::max(worst_ratio, std::abs(estimate - truth) * 2.0 * static_cast<double>(n));
      }
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof detail, "max |estimate - accuracy| = %.3g / (2n), scores distinct: %s", worst_ratio,
                distinct ? "yes" : "no");
  return {distinct && worst_ratio <= 1.0 + 1e-9, detail};
}

// Quadratic reference scan over every candidate threshold.
std::pair<double, double> naive_threshold(const std::vector<double>& scores, double source_error) {
  std::set<double> candidates(scores.begin(), scores.end());
  candidates.insert(std::numeric_limits<double>::infinity());
  const auto n = static_cast<double>(scores.size());
  double best_t = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    double below = 0.0;
    for (double s : scores) below += s < t;
    const double gap = std::abs(source_error - below / n);
    if (gap < best_gap) {
      best_gap = gap;
      best_t = t;
    }
  }
  return {best_t, best_gap};
}

// Criterion 8: the sorted sweep finds the same threshold as the naive scan.
Outcome sweep_matches_scan() {
  Rng rng(8);
  std::uniform_int_distribution<int> size(1, 300);
  std::uniform_int_distribution<int> levels(2, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;
  std::size_t with_ties = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    const bool tied = trial % 2 == 0;
    const int grid = levels(rng);
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (double& s : scores) s = tied ? std::floor(unit(rng) * grid) / grid : unit(rng);
    with_ties += std::set<double>(scores.begin(), scores.end()).size() < scores.size();
    std::uniform_int_distribution<int> wrong(0, n);
    const double error = trial % 3 == 0 ? unit(rng) : static_cast<double>(wrong(rng)) / n;
    const auto [t, gap] = naive_threshold(scores, error);
    const Eigen::Map<const Eigen::VectorXd> view(scores.data(), n);
    const ThresholdModel model = learn_threshold(view, MetricValue::error(error));
    const bool same = model.threshold == t &&
                      std::abs(model.achieved_source_proportion - error) == gap;
    mismatches += !same;
  }
  return {mismatches == 0 && with_ties > 0, "1000 score sets (" + std::to_string(with_ties) + " with ties), " +
                                                std::to_string(mismatches) + " disagree with the scan"};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double index_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

// Criterion 9: repeatable benchmark output and aggregate arithmetic.
Outcome harness_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "atc_acceptance_harness";
  std::filesystem::create_directories(dir);
  const auto file = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::string> base{"benchmark", "--synthetic", "--k",      "4,7",         "--n",
                                      "1000",      "--boot",      "100",      "--methods",   "max,l2n,doc",
                                      "--seed",    "31"};
  bool ok = true;
  for (const char* suffix : {"1", "2"}) {
    auto args = base;
    args.insert(args.end(), {"--runs", file(suffix) + "runs.csv", "--aggregate", file(suffix) + "agg.csv"});
    std::ostringstream out;
    std::ostringstream err;
    ok = ok && cli::run(args, out, err) == cli::kExitOk;
  }
  const std::string runs = slurp(file("1") + "runs.csv");
  const std::string agg = slurp(file("1") + "agg.csv");
  const bool identical = runs == slurp(file("2") + "runs.csv") && agg == slurp(file("2") + "agg.csv");
  const bool headers = runs.rfind("dimension,method,run,abs_error\n", 0) == 0 &&
                       agg.rfind("dimension,method,mean,ci_low,ci_high\n", 0) == 0;
  std::filesystem::remove_all(dir);

  BenchmarkConfig config;
  config.methods = {Method::atc(ScoreFn::max_confidence), Method::atc(ScoreFn::l2_norm), Method::doc()};
  config.n_boot = 100;
  config.master_seed = 31;
  std::vector<BenchmarkInput> inputs;
  for (Eigen::Index k : {4, 7}) {
    const auto [source, target] = random_pair(k, 1000, 90);
    inputs.push_back({source, target, {}});
  }
  const auto records = run_benchmark(inputs, config);
  const auto rows = aggregate(records, config.ci_level);
  double worst = 0.0;
  for (const auto& row : rows) {
    std::vector<double> errors;
    for (const auto& r : records)
      if (r.dimension == row.dimension && r.method == row.method) errors.push_back(r.abs_error);
    double sum = 0.0;
    for (double e : errors) sum += e;
    worst = std::max({worst, std::abs(row.mean_abs_error - sum / static_cast<double>(errors.size())),
                      std::abs(row.ci_low - index_quantile(errors, 0.025)),
                      std::abs(row.ci_high - index_quantile(errors, 0.975))});
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "CSV byte-identical: %s, headers: %s, %zu rows, max oracle gap %.3g",
                identical ? "yes" : "no", headers ? "ok" : "wrong", rows.size(), worst);
  return {ok && identical && headers && rows.size() == 6 && worst <= 1e-12, detail};
}

// Criterion 10: ATC-Max against naive DoC under a temperature shift.
Outcome atc_beats_doc() {
  GeneratorSpec spec;
  spec.k = 6;
  spec.n = 5000;
  spec.target_accuracy = 0.8;
  spec.seed = 10;
  const auto [source, target] = make_shift_pair(spec, Shift{1.5, std::nullopt});
  BenchmarkConfig config;
  config.methods = {Method::atc(ScoreFn::max_confidence), Method::doc()};
  config.n_boot = 200;
  const auto rows = aggregate(run_benchmark(source.data, target.data, config));
  char detail[200];
  std::snprintf(detail, sizeof detail, "source acc %.4f, target acc %.4f, MAE atc-max %.4f vs doc %.4f",
                source.realized_accuracy(), target.realized_accuracy(), rows[0].mean_abs_error,
                rows[1].mean_abs_error);
  return {rows[0].mean_abs_error < rows[1].mean_abs_error, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "two-class collapse of all six scores", 5.0, binary_collapse},
      {2, "l2n / l2u equivalence, k=2..20", 10.0, l2_equivalence},
      {3, "monotone transform invariance", 5.0, transform_invariance},
      {4, "known ordering counterexamples", 1.0, published_witnesses},
      {5, "verify command class structure", 30.0, verify_classes},
      {6, "consistent ordering implies equal estimates", 10.0, ordering_downstream},
      {7, "self-consistency within 1/(2n)", 2.0, self_consistency},
      {8, "threshold sweep equals naive scan", 5.0, sweep_matches_scan},
      {9, "harness determinism and aggregate oracles", 10.0, harness_determinism},
      {10, "ATC-Max beats naive DoC under temperature shift", 60.0, atc_beats_doc},
  };

  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = outcome.ok && seconds < c.limit_seconds;
    failures += !pass;
    std::printf("criterion %2d %s  %-48s %6.2fs/%-4gs  %s\n", c.id, pass ? "PASS" : "FAIL", c.title, seconds,
                c.limit_seconds, outcome.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
