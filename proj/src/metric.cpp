#include "dro/metric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dro {

PairSets build_pair_sets(const Dataset& data, int k) {
  const int n = static_cast<int>(data.n());
  if (k < 1) throw std::invalid_argument("build_pair_sets: k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("build_pair_sets: k >= n (" + std::to_string(k) +
                                " >= " + std::to_string(n) + ")");
  }
  if (!data.classification_labels()) {
    throw std::invalid_argument("build_pair_sets: labels must be in {-1,+1}");
  }

  std::set<std::pair<int, int>> must, cannot;
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d2 = (data.features.row(i) - data.features.row(j)).squaredNorm();
      order[j] = {d2, j};
    }
    order[i].first = std::numeric_limits<double>::infinity();  // never own neighbor
    // Ties break toward the lower index via the pair's second component.
    std::sort(order.begin(), order.end());
    for (int r = 0; r < k; ++r) {
      const int j = order[r].second;
      const auto pair = std::minmax(i, j);
      if (data.labels(i) == data.labels(j)) {
        must.insert({pair.first, pair.second});
      } else {
        cannot.insert({pair.first, pair.second});
      }
    }
  }

  PairSets out;
  out.must_link.assign(must.begin(), must.end());
  out.cannot_link.assign(cannot.begin(), cannot.end());
  return out;
}

namespace {

Eigen::MatrixXd pair_scatter(const Eigen::MatrixXd& z,
                             const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(z.cols(), z.cols());
  for (const auto& [i, j] : pairs) {
    const Eigen::VectorXd diff = (z.row(i) - z.row(j)).transpose();
    a.noalias() += diff * diff.transpose();
  }
  return a;
}

}  // namespace

MetricLearnResult learn_mahalanobis(const Dataset& data, const PairSets& pairs,
                                    const FeatureMap& map, const MetricLearnConfig& cfg) {
  if (pairs.cannot_link.empty()) {
    throw std::invalid_argument(
        "learn_mahalanobis: cannot-link set is empty, the separation constraint is "
        "infeasible");
  }
  if (cfg.lambda_bar <= 0) throw std::invalid_argument("learn_mahalanobis: lambda_bar <= 0");

  const Eigen::MatrixXd z = map.apply_rows(data.features);
  const Eigen::Index d = z.cols();
  const Eigen::MatrixXd a_must = pair_scatter(z, pairs.must_link);
  const Eigen::MatrixXd a_cannot = pair_scatter(z, pairs.cannot_link);

  const double cannot_tr = a_cannot.trace();
  if (!(cannot_tr > 0)) {
    throw std::invalid_argument(
        "learn_mahalanobis: cannot-link pairs are coincident points, constraint "
        "infeasible");
  }

  // Objective and constraint are both homogeneous of degree one in Lambda, so
  // solve at level 1 and scale the result by lambda_bar at the end. This makes
  // the lambda_bar scaling exact.
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Identity(d, d) / cannot_tr;
  const double grad_scale = std::max(a_must.norm(), 1e-30);

  auto objective_of = [&](const Eigen::MatrixXd& m) { return (a_must.array() * m.array()).sum(); };
  auto constraint_of = [&](const Eigen::MatrixXd& m) { return (a_cannot.array() * m.array()).sum(); };

  Eigen::MatrixXd best = lambda;
  double best_obj = objective_of(lambda);
  int iterations = 0;
  bool converged = false;
  int stable_iters = 0;

  for (int t = 0; t < cfg.max_iters; ++t) {
    ++iterations;
    const double step = cfg.step_size / std::sqrt(static_cast<double>(t + 1));
    lambda -= (step / grad_scale) * a_must;
    lambda = psd_project(SymMatrix(lambda)).matrix();
    const double c = constraint_of(lambda);
    if (c < 1e-14) {
      // The subgradient step wiped out the constraint directions; restart from
      // the feasible identity point with a smaller residual step budget.
      lambda = Eigen::MatrixXd::Identity(d, d) / cannot_tr;
      continue;
    }
    if (c < 1.0) lambda *= 1.0 / c;

    const double obj = objective_of(lambda);
    const double prev_best = best_obj;
    if (obj < best_obj) {
      best_obj = obj;
      best = lambda;
    }
    const double rel_change =
        std::abs(prev_best - best_obj) / std::max(std::abs(prev_best), 1e-30);
    stable_iters = rel_change < 1e-6 ? stable_iters + 1 : 0;
    if (stable_iters >= 20) {
      converged = true;
      break;
    }
  }

  MetricLearnResult out{psd_project(SymMatrix(best * cfg.lambda_bar)),
                        best_obj * cfg.lambda_bar,
                        constraint_of(best) * cfg.lambda_bar, iterations, converged};
  if (!converged && out.constraint_value < cfg.lambda_bar - 1e-8) {
    throw std::runtime_error(
        "learn_mahalanobis: did not converge to a feasible point, constraint slack " +
        std::to_string(cfg.lambda_bar - out.constraint_value));
  }
  return out;
}

PsdMatrix pd_floor(const PsdMatrix& a, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("pd_floor: gamma must lie in (0,1)");
  }
  const double tr = a.matrix().trace();
  if (!(tr > 0)) throw std::invalid_argument("pd_floor: zero matrix input");
  const double d = static_cast<double>(a.dim());
  Eigen::MatrixXd floored = (1.0 - gamma) * a.matrix() * (d / tr) +
                            gamma * Eigen::MatrixXd::Identity(a.dim(), a.dim());
  return PsdMatrix::with_certified_bound(SymMatrix(floored), gamma);
}

}  // namespace dro
