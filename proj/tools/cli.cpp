#include "cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include "atc/bootstrap.hpp"
#include "atc/doc.hpp"
#include "atc/errors.hpp"
#include "atc/io.hpp"
#include "atc/ordering.hpp"
#include "atc/random.hpp"
#include "atc/score.hpp"
#include "atc/synthetic.hpp"
#include "atc/threshold.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>

namespace atc::cli {

namespace {

struct EstimateArgs {
  std::string source;
  std::string target;
  std::string score = "all";
  std::string method = "atc";
  std::string convention = "accuracy";
  std::vector<std::string> calibration;
  std::string format = "csv";
  std::size_t boot = 0;
  double ci = 0.95;
  std::uint64_t seed = 0;
  bool strict = false;
};

struct BenchmarkArgs {
  bool synthetic = false;
  std::vector<int> dimensions;
  Eigen::Index n = 2000;
  double accuracy = 0.8;
  double concentration = 5.0;
  double temperature = 1.5;
  std::vector<std::string> pairs;
  std::vector<std::string> calibration;
  std::string format = "csv";
  std::vector<std::string> methods;
  std::size_t boot = 1000;
  double ci = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double precision = 1e-10;
  bool exclude_binary = false;
  bool pairwise = false;
  std::string runs_path = "runs.csv";
  std::string aggregate_path = "aggregate.csv";
};

struct VerifyArgs {
  Eigen::Index k = 3;
  Eigen::Index points = 1000;
  std::size_t budget = 100000;
  std::uint64_t seed = 0;
  double eps = kDefaultEqualityTolerance;
  std::string pair;
};

struct GenerateArgs {
  Eigen::Index k = 2;
  Eigen::Index n = 1000;
  double accuracy = 0.8;
  double concentration = 5.0;
  double temperature = 1.0;
  std::vector<double> prior;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
  bool unlabeled = false;
};

// Calibration temperatures used for doc-reg on synthetic benchmarks.
constexpr std::array<double, 4> kCalibrationTemperatures = {0.75, 1.25, 1.75, 2.25};

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<CalibrationSet> load_calibration(const std::vector<std::string>& paths, io::DumpFormat format,
                                             bool renormalize) {
  std::vector<CalibrationSet> out;
  for (const auto& path : paths) {
    PredictionSet data = io::load_dump(path, renormalize, format);
    const MetricValue accuracy = true_accuracy(data);
    out.push_back(CalibrationSet{std::move(data), accuracy});
  }
  return out;
}

int run_estimate(const EstimateArgs& args, std::ostream& out) {
  const auto format = io::parse_format(args.format);
  const PredictionSet source = io::load_dump(args.source, !args.strict, format);
  const PredictionSet target = io::load_dump(args.target, !args.strict, format);
  if (!source.has_labels()) throw MissingLabels("--source must carry a label column");
  require_same_dimension(source, target);
  const auto convention = args.convention == "error" ? MetricConvention::error : MetricConvention::accuracy;
  if (args.convention != "error" && args.convention != "accuracy") {
    throw InvalidArgument("--convention must be accuracy or error");
  }
  if (!(args.ci > 0.0 && args.ci < 1.0)) throw InvalidArgument("--ci must lie in (0, 1)");

  std::vector<Method> methods;
  if (args.method == "atc") {
    if (args.score == "all") {
      for (ScoreFn fn : kAllScoreFns) methods.push_back(Method::atc(fn));
    } else {
      methods.push_back(Method::atc(parse_score_fn(args.score)));
    }
  } else if (args.method == "doc" || args.method == "doc-reg") {
    methods.push_back(parse_method(args.method));
  } else {
    throw InvalidArgument("--method must be atc, doc or doc-reg");
  }
  const auto calibration = load_calibration(args.calibration, format, !args.strict);

  const char* label = convention == MetricConvention::accuracy ? "accuracy" : "error";
  out << "source: n=" << source.size() << " k=" << source.dimension() << " " << label << "="
      << io::percent(true_accuracy(source).in(convention)) << "\n";
  out << "target: n=" << target.size();
  if (target.has_labels()) out << " " << label << "=" << io::percent(true_accuracy(target).in(convention));
  out << "\n";
  out << pad("method", 10) << pad("estimate", 10);
  if (args.boot > 0) out << "bootstrap mean [" << io::percent(args.ci) << "% CI]";
  out << "\n";

  for (const auto& method : methods) {
    const double point = estimate_accuracy(method, source, target, calibration).in(convention);
    out << pad(method.name(), 10) << pad(io::percent(point), 10);
    if (args.boot > 0) {
      std::vector<double> draws;
      for (std::size_t run = 0; run < args.boot; ++run) {
        const PredictionSet resampled =
            bootstrap_resample(source, run_seed(args.seed, source.dimension(), run));
        draws.push_back(estimate_accuracy(method, resampled, target, calibration).in(convention));
      }
      double total = 0.0;
      for (double d : draws) total += d;
      std::sort(draws.begin(), draws.end());
      const double tail = (1.0 - args.ci) / 2.0;
      out << io::percent_with_interval(total / static_cast<double>(draws.size()), sorted_quantile(draws, tail),
                                        sorted_quantile(draws, 1.0 - tail));
    }
    out << "\n";
  }
  return kExitOk;
}

std::vector<BenchmarkInput> benchmark_inputs(const BenchmarkArgs& args, const std::vector<Method>& methods) {
  const bool needs_calibration = std::any_of(methods.begin(), methods.end(), [](const Method& m) {
    return m.kind() == Method::Kind::doc_regression;
  });
  std::vector<BenchmarkInput> inputs;
  if (args.synthetic) {
    if (!args.pairs.empty()) throw InvalidArgument("--synthetic and --pair are exclusive");
    const std::vector<int> dims = args.dimensions.empty() ? std::vector<int>{6} : args.dimensions;
    for (int k : dims) {
      GeneratorSpec spec;
      spec.k = k;
      spec.n = args.n;
      spec.target_accuracy = args.accuracy;
      spec.concentration = args.concentration;
      spec.seed = derive_seed(args.seed, static_cast<std::uint64_t>(k));
      auto [source, target] = make_shift_pair(spec, Shift{args.temperature, std::nullopt});
      BenchmarkInput input{std::move(source.data), std::move(target.data), {}};
      if (needs_calibration) {
        for (std::size_t c = 0; c < kCalibrationTemperatures.size(); ++c) {
          GeneratorSpec cal = spec;
          cal.seed = derive_seed(spec.seed, hash_name("calibration"), c);
          cal.shift = Shift{kCalibrationTemperatures[c], std::nullopt};
          SyntheticSet set = generate(cal);
          const MetricValue accuracy = true_accuracy(set.data);
          input.calibration.push_back(CalibrationSet{std::move(set.data), accuracy});
        }
      }
      inputs.push_back(std::move(input));
    }
    return inputs;
  }

  if (args.pairs.empty()) throw InvalidArgument("benchmark needs --synthetic or at least one --pair");
  const auto format = io::parse_format(args.format);
  const auto calibration = load_calibration(args.calibration, format, true);
  for (const auto& pair : args.pairs) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) throw InvalidArgument("--pair expects SOURCE:TEST, got '" + pair + "'");
    PredictionSet source = io::load_dump(pair.substr(0, colon), true, format);
    PredictionSet test = io::load_dump(pair.substr(colon + 1), true, format);
    if (!source.has_labels() || !test.has_labels()) throw MissingLabels("benchmark inputs must be labeled");
    BenchmarkInput input{std::move(source), std::move(test), {}};
    for (const auto& c : calibration) {
      if (c.data.dimension() == input.source.dimension()) input.calibration.push_back(c);
    }
    inputs.push_back(std::move(input));
  }
  return inputs;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << content;
}

int run_benchmark_command(const BenchmarkArgs& args, std::ostream& out) {
  BenchmarkConfig config;
  if (!args.methods.empty()) {
    config.methods.clear();
    for (const auto& m : args.methods) config.methods.push_back(parse_method(m));
  }
  config.n_boot = args.boot;
  config.ci_level = args.ci;
  config.master_seed = args.seed;
  config.threads = args.threads;

  const auto inputs = benchmark_inputs(args, config.methods);
  const auto records = run_benchmark(inputs, config);
  const auto rows = aggregate(records, config.ci_level);

  std::ostringstream runs_csv;
  io::write_runs_csv(runs_csv, records);
  write_file(args.runs_path, runs_csv.str());
  std::ostringstream aggregate_csv;
  io::write_aggregate_csv(aggregate_csv, rows);
  write_file(args.aggregate_path, aggregate_csv.str());

  out << "mean absolute error, % [" << io::percent(config.ci_level) << "% interval]\n";
  out << pad("dim", 5);
  for (const auto& m : config.methods) out << pad(m.name(), 26);
  out << "\n";
  Eigen::Index current = -1;
  for (const auto& row : rows) {
    if (row.dimension != current) {
      if (current != -1) out << "\n";
      current = row.dimension;
      out << pad(std::to_string(current), 5);
    }
    out << pad(io::percent_with_interval(row.mean_abs_error, row.ci_low, row.ci_high), 26);
  }
  out << "\n\nwins (ties share a win";
  if (args.exclude_binary) out << ", 2-class excluded";
  out << ")\n";
  for (const auto& w : rank_methods(rows, RankingOptions{args.precision, args.exclude_binary})) {
    out << pad(w.method.name(), 10) << w.wins << "\n";
  }
  if (args.pairwise) {
    out << "\npairwise mean difference, % [" << io::percent(config.ci_level) << "% interval]\n";
    for (const auto& d : pairwise_difference_report(records, config.ci_level)) {
      out << pad(std::to_string(d.dimension), 5) << pad(d.a.name() + " - " + d.b.name(), 18)
          << io::percent_with_interval(d.mean_difference, d.ci_low, d.ci_high) << (d.excludes_zero ? " *" : "")
          << "\n";
    }
  }
  out << "\nwrote " << args.runs_path << " and " << args.aggregate_path << "\n";
  return kExitOk;
}

nlohmann::json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Which pairs are order-isomorphic for a given k: everything when k = 2,
// otherwise only the L2 norm and L2 distance to uniform.
bool predicted_consistent(ScoreFn a, ScoreFn b, Eigen::Index k) {
  if (a == b || k == 2) return true;
  const auto l2 = [](ScoreFn f) { return f == ScoreFn::l2_norm || f == ScoreFn::l2_to_uniform; };
  return l2(a) && l2(b);
}

int run_verify(const VerifyArgs& args, std::ostream& out) {
  if (args.k < 2) throw InvalidArgument("--k must be at least 2");
  if (args.points < 2) throw InvalidArgument("--points must be at least 2");
  if (args.budget < 1) throw InvalidArgument("--budget must be at least 1");

  std::vector<std::pair<ScoreFn, ScoreFn>> pairs;
  if (!args.pair.empty()) {
    const auto comma = args.pair.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--pair expects A,B");
    pairs.emplace_back(parse_score_fn(args.pair.substr(0, comma)), parse_score_fn(args.pair.substr(comma + 1)));
  } else {
    for (std::size_t i = 0; i < kAllScoreFns.size(); ++i) {
      for (std::size_t j = i + 1; j < kAllScoreFns.size(); ++j) pairs.emplace_back(kAllScoreFns[i], kAllScoreFns[j]);
    }
  }

  const auto m = static_cast<Eigen::Index>(kAllScoreFns.size());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> consistent(m, m);
  consistent.setConstant(false);
  consistent.diagonal().setConstant(true);
  bool matches = true;
  for (const auto& [a, b] : pairs) {
    OrderingVerdict verdict = verify_on_sample(a, b, args.k, args.points, args.seed, args.eps);
    std::string found_by = "sample";
    std::size_t checked = verdict.pairs_checked;
    if (verdict.consistent()) {
      if (auto w = search_counterexample(a, b, args.k, args.budget, args.seed, args.eps)) {
        verdict.status = OrderingStatus::counterexample;
        verdict.witness = std::move(w);
        found_by = "search";
      }
      checked += args.budget;
    }
    const bool ok = verdict.consistent();
    consistent(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = ok;
    consistent(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = ok;
    matches = matches && ok == predicted_consistent(a, b, args.k);

    nlohmann::json record = {{"a", name(a)},
                             {"b", name(b)},
                             {"k", args.k},
                             {"status", ok ? "consistent" : "counterexample"},
                             {"pairs_checked", checked},
                             {"eps", args.eps}};
    if (verdict.witness) {
      const auto& w = *verdict.witness;
      record["found_by"] = found_by;
      record["witness"] = {{"p", to_json(w.p.values())}, {"q", to_json(w.q.values())}, {"a_p", w.a_p},
                           {"a_q", w.a_q},              {"b_p", w.b_p},              {"b_q", w.b_q}};
    }
    out << record.dump() << "\n";
  }

  if (args.pair.empty()) {
    const EquivalenceReport report = equivalence_from_relation(consistent);
    for (const auto& cls : report.classes) {
      out << "class:";
      for (std::size_t i : cls) out << " " << name(kAllScoreFns[i]);
      out << "\n";
    }
    if (!report.transitive) out << "relation is not transitive on this sample\n";
  }
  out << (matches ? "matches predicted classes" : "DOES NOT match predicted classes") << " for k=" << args.k
      << "\n";
  return matches ? kExitOk : kExitMismatch;
}

int run_generate(const GenerateArgs& args, std::ostream& out) {
  GeneratorSpec spec;
  spec.k = args.k;
  spec.n = args.n;
  spec.target_accuracy = args.accuracy;
  spec.concentration = args.concentration;
  spec.seed = args.seed;
  if (args.temperature != 1.0 || !args.prior.empty()) {
    Shift shift{args.temperature, std::nullopt};
    if (!args.prior.empty()) {
      shift.label_prior = Eigen::Map<const Eigen::VectorXd>(args.prior.data(), static_cast<Eigen::Index>(args.prior.size()));
    }
    spec.shift = shift;
  }
  SyntheticSet set = generate(spec);
  PredictionSet data = args.unlabeled ? set.data.without_labels() : std::move(set.data);
  const auto format = io::parse_format(args.format);
  if (args.out == "-") {
    if (format == io::DumpFormat::csv) {
      io::write_dump_csv(out, data);
    } else {
      io::write_dump_json(out, data);
    }
  } else {
    io::save_dump(args.out, data, format);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised accuracy estimation from softmax outputs"};
  app.require_subcommand(1);

  EstimateArgs estimate;
  auto* est = app.add_subcommand("estimate", "Estimate target accuracy from a labeled source dump");
  est->add_option("--source", estimate.source, "Labeled source (validation) dump")->required();
  est->add_option("--target", estimate.target, "Target dump; labels optional")->required();
  est->add_option("--score", estimate.score, "Score function (max|negent|l2n|l1u|l2u|js|all)");
  est->add_option("--method", estimate.method, "atc, doc or doc-reg");
  est->add_option("--convention", estimate.convention, "accuracy or error");
  est->add_option("--calibration", estimate.calibration, "Labeled calibration dumps for doc-reg");
  est->add_option("--format", estimate.format, "csv or json");
  est->add_option("--boot", estimate.boot, "Bootstrap resamples of the source");
  est->add_option("--ci", estimate.ci, "Interval level for --boot");
  est->add_option("--seed", estimate.seed, "Master seed");
  est->add_flag("--strict", estimate.strict, "Reject rows off the simplex by more than 1e-9");

  BenchmarkArgs bench;
  auto* bm = app.add_subcommand("benchmark", "Bootstrap benchmark of estimation methods");
  bm->add_flag("--synthetic", bench.synthetic, "Generate temperature-shifted pairs");
  bm->add_option("--k", bench.dimensions, "Class counts for --synthetic")->delimiter(',');
  bm->add_option("--n", bench.n, "Examples per synthetic set");
  bm->add_option("--accuracy", bench.accuracy, "Synthetic true accuracy");
  bm->add_option("--concentration", bench.concentration, "Synthetic Dirichlet concentration");
  bm->add_option("--temperature", bench.temperature, "Synthetic target temperature");
  bm->add_option("--pair", bench.pairs, "SOURCE:TEST labeled dumps, one per dimension");
  bm->add_option("--calibration", bench.calibration, "Labeled calibration dumps for doc-reg");
  bm->add_option("--format", bench.format, "csv or json");
  bm->add_option("--methods", bench.methods, "Comma-separated methods")->delimiter(',');
  bm->add_option("--boot", bench.boot, "Runs per dimension and method");
  bm->add_option("--ci", bench.ci, "Interval level");
  bm->add_option("--seed", bench.seed, "Master seed");
  bm->add_option("--threads", bench.threads, "Worker threads");
  bm->add_option("--precision", bench.precision, "Rounding step when comparing means for wins");
  bm->add_flag("--exclude-binary", bench.exclude_binary, "Leave k=2 out of the win counts");
  bm->add_flag("--pairwise", bench.pairwise, "Print run-matched pairwise differences");
  bm->add_option("--runs", bench.runs_path, "Per-run CSV output");
  bm->add_option("--aggregate", bench.aggregate_path, "Aggregate CSV output");

  VerifyArgs verify;
  auto* ver = app.add_subcommand("verify", "Check which score functions induce the same ordering");
  ver->add_option("--k", verify.k, "Simplex dimension (number of classes)");
  ver->add_option("--points", verify.points, "Random points for the all-pairs check");
  ver->add_option("--budget", verify.budget, "Pairs for the grid + random counterexample search");
  ver->add_option("--seed", verify.seed, "Seed");
  ver->add_option("--eps", verify.eps, "Equality tolerance");
  ver->add_option("--pair", verify.pair, "Only this pair, as A,B");

  GenerateArgs gen;
  auto* gn = app.add_subcommand("generate", "Write a synthetic labeled prediction dump");
  gn->add_option("--k", gen.k, "Classes");
  gn->add_option("--n", gen.n, "Examples");
  gn->add_option("--accuracy", gen.accuracy, "True accuracy");
  gn->add_option("--concentration", gen.concentration, "Dirichlet concentration on the predicted class");
  gn->add_option("--temperature", gen.temperature, "Temperature shift");
  gn->add_option("--prior", gen.prior, "Label prior, comma-separated")->delimiter(',');
  gn->add_option("--seed", gen.seed, "Seed");
  gn->add_option("--out", gen.out, "Output path, - for stdout");
  gn->add_option("--format", gen.format, "csv or json");
  gn->add_flag("--unlabeled", gen.unlabeled, "Omit the label column");

  std::vector<const char*> argv{"atc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*est) return run_estimate(estimate, out);
    if (*bm) return run_benchmark_command(bench, out);
    if (*ver) return run_verify(verify, out);
    if (*gn) return run_generate(gen, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace atc::cli
