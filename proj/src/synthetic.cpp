#include "atc/synthetic.hpp"

#include "atc/errors.hpp"
#include "atc/random.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace atc {

namespace {

constexpr double kFallbackMargin = 1e-3;

void check(const GeneratorSpec& spec) {
  if (spec.k < 2) throw InvalidArgument("generator needs k >= 2");
  if (spec.n < 1) throw InvalidArgument("generator needs n >= 1");
  if (!(spec.target_accuracy > 0.0 && spec.target_accuracy <= 1.0)) {
    throw InvalidArgument("target accuracy must lie in (0, 1]");
  }
  if (!(spec.concentration > 0.0) || !std::isfinite(spec.concentration)) {
    throw InvalidArgument("concentration must be positive");
  }
  if (spec.shift) {
    if (!(spec.shift->temperature > 0.0) || !std::isfinite(spec.shift->temperature)) {
      throw InvalidArgument("temperature must be positive");
    }
    if (const auto& prior = spec.shift->label_prior) {
      if (prior->size() != spec.k) throw DimensionMismatch("label prior must have k entries");
      if ((prior->array() < 0.0).any() || !(prior->sum() > 0.0)) {
        throw InvalidArgument("label prior must be non-negative with positive mass");
      }
    }
  }
}

// Dirichlet draw conditioned on argmax == designated, by rejection.
Eigen::VectorXd draw_confidences(Eigen::Index k, Eigen::Index designated, double concentration, Rng& rng) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(k);
  alpha(designated) = concentration;
  Eigen::VectorXd draw;
  for (int attempt = 0; attempt < kMaxArgmaxRetries; ++attempt) {
    draw = sample_dirichlet(alpha, rng);
    if (argmax(draw) == designated) return draw;
  }
  // 1/2 + margin on the designated class, the rest in proportion to the last draw
  Eigen::VectorXd rest = draw;
  rest(designated) = 0.0;
  const double rest_total = rest.sum();
  if (rest_total > 0.0) {
    rest *= (0.5 - kFallbackMargin) / rest_total;
  } else {
    rest.setConstant((0.5 - kFallbackMargin) / static_cast<double>(k - 1));
    rest(designated) = 0.0;
  }
  rest(designated) = 0.5 + kFallbackMargin;
  return rest;
}

}  // namespace

ProbabilityVector temperature_scale(const ProbabilityVector& v, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  if (temperature == 1.0) return v;
  const double exponent = 1.0 / temperature;
  Eigen::VectorXd scaled = v.values().unaryExpr([exponent](double x) { return std::pow(x, exponent); });
  return ProbabilityVector::validate(scaled / scaled.sum());
}

SyntheticSet generate(const GeneratorSpec& spec) {
  check(spec);
  const Eigen::Index k = spec.k;
  const double temperature = spec.shift ? spec.shift->temperature : 1.0;

  std::vector<double> prior(static_cast<std::size_t>(k), 1.0);
  if (spec.shift && spec.shift->label_prior) {
    prior.assign(spec.shift->label_prior->data(), spec.shift->label_prior->data() + k);
  }

  ProbabilityMatrix rows(spec.n, k);
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    std::discrete_distribution<int> label_dist(prior.begin(), prior.end());
    const int label = label_dist(rng);
    const bool correct = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < spec.target_accuracy;
    Eigen::Index predicted = label;
    if (!correct) {
      const auto offset = std::uniform_int_distribution<Eigen::Index>(1, k - 1)(rng);
      predicted = (label + offset) % k;
    }
    ProbabilityVector v = ProbabilityVector::validate(draw_confidences(k, predicted, spec.concentration, rng));
    v = temperature_scale(v, temperature);
    rows.row(i) = v.values().transpose();
    labels[static_cast<std::size_t>(i)] = label;
  }
  PredictionSet data(rows, std::move(labels));
  // counted on the final vectors so the stored figure is exact even if
  // rounding ever collapsed a designated maximum into a tie
  const auto n_correct = static_cast<Eigen::Index>(correctness(data).sum());
  return SyntheticSet{std::move(data), n_correct};
}

std::pair<SyntheticSet, SyntheticSet> make_shift_pair(const GeneratorSpec& spec, const Shift& shift) {
  GeneratorSpec source_spec = spec;
  source_spec.shift.reset();
  GeneratorSpec target_spec = spec;
  target_spec.shift = shift;
  target_spec.seed = derive_seed(spec.seed, hash_name("target"));
  return {generate(source_spec), generate(target_spec)};
}

}  // namespace atc
