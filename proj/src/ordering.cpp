#include "atc/ordering.hpp"

#include "atc/errors.hpp"
#include "atc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace atc {

namespace {

Eigen::VectorXd score_points(const ProbabilityMatrix& points, const Scorer& s) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out(i) = s(points.row(i).transpose());
  return out;
}

bool agree(double a_p, double a_q, double b_p, double b_q, double eps) {
  return tolerant_sign(a_p - a_q, eps) == tolerant_sign(b_p - b_q, eps);
}

OrderingWitness make_witness(const ProbabilityMatrix& points, Eigen::Index i, Eigen::Index j,
                             const Eigen::VectorXd& sa, const Eigen::VectorXd& sb) {
  return OrderingWitness{ProbabilityVector::validate(points.row(i).transpose()),
                         ProbabilityVector::validate(points.row(j).transpose()),
                         sa(i), sa(j), sb(i), sb(j)};
}

void compositions(int remaining, Eigen::Index slots, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out, std::size_t cap) {
  if (out.size() >= cap) return;
  if (slots == 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int c = remaining; c >= 0 && out.size() < cap; --c) {
    prefix.push_back(c);
    compositions(remaining - c, slots - 1, prefix, out, cap);
    prefix.pop_back();
  }
}

}  // namespace

namespace detail {
OrderingVerdict verify_scores(const ProbabilityMatrix& points, const Eigen::VectorXd& sa,
                              const Eigen::VectorXd& sb, double eps);
}  // namespace detail

int tolerant_sign(double delta, double eps) {
  if (std::abs(delta) <= eps) return 0;
  return delta > 0.0 ? 1 : -1;
}

bool check_pair(const ProbabilityVector& p, const ProbabilityVector& q, const Scorer& a,
                const Scorer& b, double eps) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("cannot compare points of dimension " + std::to_string(p.size()) + " and " +
                            std::to_string(q.size()));
  }
  return agree(a(p), a(q), b(p), b(q), eps);
}

bool witness_violates(const OrderingWitness& w, const Scorer& a, const Scorer& b, double eps) {
  return !check_pair(w.p, w.q, a, b, eps);
}

ProbabilityMatrix sample_simplex(Eigen::Index k, Eigen::Index n, std::uint64_t seed) {
  if (k < 2) throw DimensionError("simplex sampling needs k >= 2");
  ProbabilityMatrix points(n, k);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)));
    points.row(i) = ProbabilityVector::validate(sample_dirichlet(ones, rng)).values().transpose();
  }
  return points;
}

ProbabilityMatrix simplex_grid(Eigen::Index k, int steps, Eigen::Index max_points) {
  if (k < 2) throw DimensionError("simplex grid needs k >= 2");
  std::vector<std::vector<int>> comps;
  std::vector<int> prefix;
  compositions(steps, k, prefix, comps, static_cast<std::size_t>(std::max<Eigen::Index>(max_points, 0)));
  ProbabilityMatrix points(static_cast<Eigen::Index>(comps.size()), k);
  Eigen::VectorXd raw(k);
  for (std::size_t r = 0; r < comps.size(); ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      raw(c) = static_cast<double>(comps[r][static_cast<std::size_t>(c)]) / steps;
    }
    points.row(static_cast<Eigen::Index>(r)) = ProbabilityVector::validate(raw).values().transpose();
  }
  return points;
}

OrderingVerdict verify_on_points(const ProbabilityMatrix& points, const Scorer& a, const Scorer& b,
                                 double eps) {
  return detail::verify_scores(points, score_points(points, a), score_points(points, b), eps);
}

OrderingVerdict detail::verify_scores(const ProbabilityMatrix& points, const Eigen::VectorXd& sa,
                              const Eigen::VectorXd& sb, double eps) {
  std::size_t checked = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      ++checked;
      if (!agree(sa(i), sa(j), sb(i), sb(j), eps)) {
        return OrderingVerdict{OrderingStatus::counterexample, make_witness(points, i, j, sa, sb),
                               checked, eps};
      }
    }
  }
  return OrderingVerdict{OrderingStatus::consistent_on_sample, std::nullopt, checked, eps};
}

OrderingVerdict verify_on_sample(const Scorer& a, const Scorer& b, Eigen::Index k, Eigen::Index n_points,
                                 std::uint64_t seed, double eps) {
  if (n_points < 2) throw InvalidArgument("need at least 2 sample points");
  return verify_on_points(sample_simplex(k, n_points, seed), a, b, eps);
}

std::optional<OrderingWitness> search_counterexample(const Scorer& a, const Scorer& b, Eigen::Index k,
                                                     std::size_t budget, std::uint64_t seed,
                                                     double eps) {
  if (budget < 1) throw InvalidArgument("search budget must be >= 1");
  // smallest pool whose pair count covers the budget
  Eigen::Index pool = 2;
  while (static_cast<std::size_t>(pool) * static_cast<std::size_t>(pool - 1) / 2 < budget) ++pool;

  // the whole lattice when it fits in the pool, otherwise half the pool
  ProbabilityMatrix grid = simplex_grid(k, 10, pool + 1);
  if (grid.rows() > pool) grid = simplex_grid(k, 10, std::max<Eigen::Index>(pool / 2, 2));
  const Eigen::Index n_random = std::max<Eigen::Index>(pool - grid.rows(), 0);
  ProbabilityMatrix points(grid.rows() + n_random, k);
  points.topRows(grid.rows()) = grid;
  points.bottomRows(n_random) = sample_simplex(k, n_random, derive_seed(seed, hash_name("search")));

  const Eigen::VectorXd sa = score_points(points, a);
  const Eigen::VectorXd sb = score_points(points, b);
  std::size_t checked = 0;
  // Column-major over (i < j) so pairs among early (grid) points come first.
  for (Eigen::Index j = 1; j < points.rows(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (checked++ >= budget) return std::nullopt;
      if (!agree(sa(i), sa(j), sb(i), sb(j), eps)) {
        OrderingWitness w = make_witness(points, i, j, sa, sb);
        if (witness_violates(w, a, b, eps)) return w;
      }
    }
  }
  return std::nullopt;
}

EquivalenceReport equivalence_from_relation(
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& consistent) {
  const Eigen::Index m = consistent.rows();
  EquivalenceReport report{consistent, true, true, true, {}, {}};
  for (Eigen::Index i = 0; i < m; ++i) {
    report.reflexive = report.reflexive && consistent(i, i);
    for (Eigen::Index j = 0; j < m; ++j) {
      report.symmetric = report.symmetric && consistent(i, j) == consistent(j, i);
      for (Eigen::Index l = 0; l < m; ++l) {
        if (consistent(i, j) && consistent(j, l) && !consistent(i, l)) {
          report.transitive = false;
          report.transitivity_violations.push_back(
              {static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(l)});
        }
      }
    }
  }

  std::vector<std::size_t> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (consistent(i, j) || consistent(j, i)) {
        const auto ri = find(static_cast<std::size_t>(i));
        const auto rj = find(static_cast<std::size_t>(j));
        parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const auto root = find(i);
    auto it = std::find_if(report.classes.begin(), report.classes.end(),
                           [&](const auto& c) { return find(c.front()) == root; });
    if (it == report.classes.end()) {
      report.classes.push_back({i});
    } else {
      it->push_back(i);
    }
  }
  return report;
}

EquivalenceReport verify_equivalence_relation(std::span<const Scorer> scorers, Eigen::Index k,
                                              Eigen::Index n_points, std::uint64_t seed, double eps) {
  if (scorers.empty()) throw InvalidArgument("need at least one score function");
  const ProbabilityMatrix points = sample_simplex(k, n_points, seed);
  const auto m = static_cast<Eigen::Index>(scorers.size());
  std::vector<Eigen::VectorXd> scores;
  for (const auto& s : scorers) scores.push_back(score_points(points, s));
  // every ordered pair, including (i, i), so reflexivity and symmetry are
  // observed rather than assumed
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> consistent(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      consistent(i, j) = detail::verify_scores(points, scores[static_cast<std::size_t>(i)],
                                               scores[static_cast<std::size_t>(j)], eps)
                             .consistent();
    }
  }
  return equivalence_from_relation(consistent);
}

}  // namespace atc
