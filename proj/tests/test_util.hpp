#pragma once

#include "atc/simplex.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <optional>
#include <vector>

namespace atc::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline ProbabilityVector pv(std::initializer_list<double> values) {
  return ProbabilityVector::validate(vec(values));
}

inline PredictionSet set_of(std::initializer_list<std::initializer_list<double>> rows,
                            std::optional<std::vector<int>> labels = std::nullopt) {
  ProbabilityMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) m.row(r++) = vec(row).transpose();
  return PredictionSet(m, std::move(labels));
}

}  // namespace atc::testing

#include "atc/random.hpp"

namespace atc::testing {

/// Dirichlet(1) rows; labels agree with the argmax with probability `hit`.
inline PredictionSet random_set(Eigen::Index k, Eigen::Index n, std::uint64_t seed, double hit = 0.7,
                                bool labeled = true) {
  Rng rng(seed);
  ProbabilityMatrix m(n, k);
  std::vector<int> labels;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, static_cast<int>(k) - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.row(i) = sample_dirichlet(Eigen::VectorXd::Ones(k), rng).transpose();
    labels.push_back(coin(rng) < hit ? static_cast<int>(argmax(m.row(i))) : any(rng));
  }
  return labeled ? PredictionSet(m, labels) : PredictionSet(m);
}

}  // namespace atc::testing
