#include "atc/score.hpp"

#include "atc/errors.hpp"

#include <cstdio>
#include <string>

namespace atc {

namespace {

constexpr std::array<std::string_view, 6> kNames = {"max", "negent", "l2n", "l1u", "l2u", "js"};

}  // namespace

std::string_view name(ScoreFn fn) { return kNames[static_cast<std::size_t>(fn)]; }

ScoreFn parse_score_fn(std::string_view text) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return kAllScoreFns[i];
  }
  throw InvalidArgument("unknown score function '" + std::string(text) +
                        "' (expected max, negent, l2n, l1u, l2u or js)");
}

Eigen::VectorXd score_batch(const PredictionSet& data, ScoreFn fn) {
  const auto& probs = data.probabilities();
  Eigen::VectorXd out(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) out(i) = score(probs.row(i), fn);
  return out;
}

MonotoneTransform MonotoneTransform::affine(ScoreFn base, double scale, double offset) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw InvalidArgument("affine transform needs a finite positive scale");
  }
  return MonotoneTransform(base, Kind::affine, scale, offset, 1);
}

MonotoneTransform MonotoneTransform::odd_power(ScoreFn base, int exponent) {
  if (exponent < 1 || exponent % 2 == 0) {
    throw InvalidArgument("odd power transform needs an odd exponent >= 1");
  }
  return MonotoneTransform(base, Kind::odd_power, 1.0, 0.0, exponent);
}

double MonotoneTransform::operator()(double x) const {
  if (kind_ == Kind::affine) return scale_ * x + offset_;
  // |x|^n by repeated multiplication, sign restored afterwards: each rounded
  // product is monotone, so the result is non-decreasing and odd-symmetric.
  const double magnitude = std::abs(x);
  double power = magnitude;
  for (int i = 1; i < exponent_; ++i) power *= magnitude;
  return x < 0.0 ? -power : power;
}

std::string MonotoneTransform::describe() const {
  const std::string base(name(base_));
  if (kind_ == Kind::odd_power) return base + "^" + std::to_string(exponent_);
  if (scale_ == 1.0 && offset_ == 0.0) return base;
  return std::to_string(scale_) + "*" + base + "+" + std::to_string(offset_);
}

double apply_transform(const ProbabilityVector& v, const MonotoneTransform& t) {
  return t(score(v, t.base()));
}

Eigen::VectorXd apply_transform_batch(const PredictionSet& data, const MonotoneTransform& t) {
  return score_batch(data, t.base()).unaryExpr([&t](double s) { return t(s); });
}

Scorer::Scorer(ScoreFn fn)
    : name_(atc::name(fn)), fn_([fn](const Eigen::Ref<const Eigen::VectorXd>& p) { return score(p, fn); }) {}

Scorer::Scorer(const MonotoneTransform& t)
    : name_(t.describe()),
      fn_([t](const Eigen::Ref<const Eigen::VectorXd>& p) { return t(score(p, t.base())); }) {}

Scorer Scorer::l2_to_reference(Eigen::VectorXd reference) {
  std::string label = "l2sq-to(";
  for (Eigen::Index i = 0; i < reference.size(); ++i) {
    if (i > 0) label += ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", reference(i));
    label += buf;
  }
  label += ")";
  return Scorer(std::move(label), [r = std::move(reference)](const Eigen::Ref<const Eigen::VectorXd>& p) {
    if (p.size() != r.size()) throw DimensionMismatch("reference point has a different dimension");
    return (p - r).squaredNorm();
  });
}

Eigen::VectorXd score_batch(const PredictionSet& data, const Scorer& scorer) {
  const auto& probs = data.probabilities();
  Eigen::VectorXd out(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) out(i) = scorer(probs.row(i).transpose());
  return out;
}

}  // namespace atc
