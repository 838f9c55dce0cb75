#pragma once

#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>

namespace atc {

/// Confidence scores on the simplex: smallest at the uniform vector, largest
/// at the vertices.
enum class ScoreFn {
  max_confidence,
  negative_entropy,
  l2_norm,
  l1_to_uniform,
  l2_to_uniform,
  js_to_uniform,
};

inline constexpr std::array<ScoreFn, 6> kAllScoreFns = {
    ScoreFn::max_confidence, ScoreFn::negative_entropy, ScoreFn::l2_norm,
    ScoreFn::l1_to_uniform,  ScoreFn::l2_to_uniform,    ScoreFn::js_to_uniform,
};

/// Canonical short name used on the command line and in reports.
std::string_view name(ScoreFn fn);
/// Inverse of name(); throws InvalidArgument for unknown names.
ScoreFn parse_score_fn(std::string_view name);

namespace detail {

// Components in ascending order. Accumulating per-component terms in this order
// makes every sum-based score exactly invariant under permutation.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> sorted_components(
    const Eigen::MatrixBase<Derived>& p) {
  Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> out = p.derived().reshaped();
  std::sort(out.data(), out.data() + out.size());
  return out;
}

template <typename Scalar>
Scalar xlogx(Scalar x) {
  return x > Scalar(0) ? x * std::log(x) : Scalar(0);
}

template <typename Scalar, typename Term>
Scalar sum_terms(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& sorted, Term term) {
  Scalar total(0);
  for (Eigen::Index i = 0; i < sorted.size(); ++i) total += term(sorted(i));
  return total;
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar max_confidence(const Eigen::MatrixBase<Derived>& p) {
  return p.maxCoeff();
}

/// sum p_i ln p_i, with 0 ln 0 = 0.
template <typename Derived>
typename Derived::Scalar negative_entropy(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  return detail::sum_terms(detail::sorted_components(p), [](Scalar x) { return detail::xlogx(x); });
}

/// Squared L2 norm.
template <typename Derived>
typename Derived::Scalar l2_norm_squared(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  return detail::sum_terms(detail::sorted_components(p), [](Scalar x) { return x * x; });
}

template <typename Derived>
typename Derived::Scalar l1_to_uniform(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar u = Scalar(1) / static_cast<Scalar>(p.size());
  return detail::sum_terms(detail::sorted_components(p), [u](Scalar x) { return std::abs(x - u); });
}

/// Squared L2 distance to the uniform vector.
template <typename Derived>
typename Derived::Scalar l2_to_uniform_squared(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar u = Scalar(1) / static_cast<Scalar>(p.size());
  return detail::sum_terms(detail::sorted_components(p), [u](Scalar x) { return (x - u) * (x - u); });
}

/// Jensen-Shannon divergence (natural log) between p and the uniform vector.
template <typename Derived>
typename Derived::Scalar js_to_uniform(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar u = Scalar(1) / static_cast<Scalar>(p.size());
  const Scalar half(0.5);
  return detail::sum_terms(detail::sorted_components(p), [u, half](Scalar x) {
    const Scalar m = half * (x + u);
    const Scalar from_p = x > Scalar(0) ? x * std::log(x / m) : Scalar(0);
    return half * (from_p + u * std::log(u / m));
  });
}

template <typename Derived>
typename Derived::Scalar score(const Eigen::MatrixBase<Derived>& p, ScoreFn fn) {
  switch (fn) {
    case ScoreFn::max_confidence: return max_confidence(p);
    case ScoreFn::negative_entropy: return negative_entropy(p);
    case ScoreFn::l2_norm: return l2_norm_squared(p);
    case ScoreFn::l1_to_uniform: return l1_to_uniform(p);
    case ScoreFn::l2_to_uniform: return l2_to_uniform_squared(p);
    case ScoreFn::js_to_uniform: return js_to_uniform(p);
  }
  return typename Derived::Scalar(0);
}

inline double score(const ProbabilityVector& v, ScoreFn fn) { return score(v.values(), fn); }

/// Row-wise scores, in row order.
Eigen::VectorXd score_batch(const PredictionSet& data, ScoreFn fn);

/// A strictly increasing map g applied on top of a base score function. The
/// catalog is limited to forms that are increasing on all of R.
class MonotoneTransform {
 public:
  static MonotoneTransform identity(ScoreFn base) { return affine(base, 1.0, 0.0); }
  /// g(x) = scale * x + offset, scale > 0.
  static MonotoneTransform affine(ScoreFn base, double scale, double offset);
  /// g(x) = x^exponent for odd exponent >= 1.
  static MonotoneTransform odd_power(ScoreFn base, int exponent);

  ScoreFn base() const { return base_; }
  double operator()(double x) const;
  std::string describe() const;

 private:
  enum class Kind { affine, odd_power };
  MonotoneTransform(ScoreFn base, Kind kind, double scale, double offset, int exponent)
      : base_(base), kind_(kind), scale_(scale), offset_(offset), exponent_(exponent) {}

  ScoreFn base_;
  Kind kind_;
  double scale_;
  double offset_;
  int exponent_;
};

double apply_transform(const ProbabilityVector& v, const MonotoneTransform& t);
Eigen::VectorXd apply_transform_batch(const PredictionSet& data, const MonotoneTransform& t);

/// Type-erased score: a catalog function, a transformed one, or a squared L2
/// distance to an arbitrary fixed reference point.
class Scorer {
 public:
  using Fn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  Scorer(ScoreFn fn);  // NOLINT(google-explicit-constructor)
  Scorer(const MonotoneTransform& t);  // NOLINT(google-explicit-constructor)
  Scorer(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static Scorer l2_to_reference(Eigen::VectorXd reference);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& p) const { return fn_(p); }
  double operator()(const ProbabilityVector& p) const { return fn_(p.values()); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

Eigen::VectorXd score_batch(const PredictionSet& data, const Scorer& scorer);

}  // namespace atc
