#include "dro/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace dro {

namespace {

constexpr int kMaxIters = 50000;
constexpr double kFirstOrderTol = 1e-7;

void require_classification(const Dataset& data, const char* who) {
  if (!data.classification_labels()) {
    throw std::invalid_argument(std::string(who) + ": labels must be in {-1,+1}");
  }
}

double logistic_smooth(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd margins = y.array() * (x * theta).array();
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) value += log1pexp_neg(margins(i));
  value /= static_cast<double>(n);
  if (grad) {
    const Eigen::ArrayXd sig = 1.0 / (1.0 + margins.array().exp());  // sigmoid(-m)
    *grad = -(x.transpose() * (y.array() * sig).matrix()) / static_cast<double>(n);
  }
  return value;
}

Eigen::VectorXd block_soft_threshold(const Eigen::VectorXd& v, double t) {
  const double norm = v.norm();
  if (norm <= t) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - t / norm) * v;
}

// Fenchel dual value of the l2-penalized logistic problem at the dual point
// induced by theta; the primal-dual difference bounds the suboptimality.
double logistic_l2_dual_value(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& theta, double delta) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd margins = y.array() * (x * theta).array();
  Eigen::ArrayXd s = 1.0 / (1.0 + margins.array().exp());
  const Eigen::VectorXd v = (x.transpose() * (y.array() * s).matrix()) / double(n);
  const double vn = v.norm();
  if (vn > delta) s *= (vn > 0 ? delta / vn : 0.0);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = s(i);
    if (a > 0) entropy += a * std::log(a);
    if (a < 1) entropy += (1 - a) * std::log1p(-a);
  }
  return -entropy / static_cast<double>(n);
}

}  // namespace

Whitened whiten(const PsdMatrix& lambda, const Eigen::MatrixXd& x) {
  if (x.cols() != lambda.dim()) throw std::invalid_argument("whiten: dimension mismatch");
  const CholeskyFactor factor = cholesky(lambda);
  Whitened w;
  w.x = x * factor.lower();  // row i becomes (L^T x_i)^T
  w.back = factor.lower();
  return w;
}

Estimate solve_adaptive_logistic(const AdaptiveRegProblem& problem, const Dataset& data) {
  if (problem.loss != RobustLoss::logistic) {
    throw std::invalid_argument("solve_adaptive_logistic: wrong loss kind");
  }
  require_classification(data, "solve_adaptive_logistic");
  const Whitened w = whiten(problem.lambda, data.features);
  const double delta = problem.delta;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(w.x.cols());
  Eigen::VectorXd grad;
  double g = logistic_smooth(w.x, data.labels, theta, &grad);

  Estimate out;
  out.beta = Eigen::VectorXd::Zero(data.dim());
  for (int t = 0; t < kMaxIters; ++t) {
    out.iterations = t + 1;
    double step = 1.0;
    Eigen::VectorXd next;
    double g_next = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      next = block_soft_threshold(theta - step * grad, step * delta);
      const Eigen::VectorXd diff = next - theta;
      g_next = logistic_smooth(w.x, data.labels, next, nullptr);
      if (g_next <= g + grad.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-16) break;
      step *= 0.5;
    }
    const double residual = (theta - next).norm() / step;
    theta = next;
    g = logistic_smooth(w.x, data.labels, theta, &grad);
    if (residual <= kFirstOrderTol) {
      out.converged = true;
      break;
    }
    if (theta.isZero(0.0) && grad.norm() <= delta + kFirstOrderTol) {
      out.converged = true;
      break;
    }
  }
  out.beta = w.back_map(theta);
  out.objective = g + delta * theta.norm();
  out.duality_gap_bound =
      std::max(0.0, out.objective - logistic_l2_dual_value(w.x, data.labels, theta, delta));
  return out;
}

Estimate solve_adaptive_sqrt_ls(const AdaptiveRegProblem& problem, const Dataset& data) {
  if (problem.loss != RobustLoss::sqrt_least_squares) {
    throw std::invalid_argument("solve_adaptive_sqrt_ls: wrong loss kind");
  }
  const Whitened w = whiten(problem.lambda, data.features);
  const double sqrt_delta = std::sqrt(problem.delta);
  const Eigen::Index n = w.x.rows();

  auto objective_of = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd r = data.labels - w.x * theta;
    return std::sqrt(r.squaredNorm() / static_cast<double>(n)) + sqrt_delta * theta.norm();
  };

  Eigen::VectorXd theta = least_squares(w.x, data.labels);
  Eigen::VectorXd best_theta = theta;
  double best = objective_of(theta);
  if (objective_of(Eigen::VectorXd::Zero(w.x.cols())) < best) {
    theta.setZero();
    best_theta.setZero();
    best = objective_of(theta);
  }

  // Polyak-style target-level steps with a geometrically decaying gap
  // estimate; best iterate is tracked throughout.
  const double gap0 = 0.1 * std::max(best, 1e-8);
  Estimate out;
  for (int t = 0; t < kMaxIters; ++t) {
    out.iterations = t + 1;
    const double gap = gap0 * std::pow(0.75, t / 100);
    if (gap < 1e-13 * std::max(best, 1.0)) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd r = data.labels - w.x * theta;
    const double rmse = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(theta.size());
    if (rmse > 0) sub = -(w.x.transpose() * r) / (rmse * static_cast<double>(n));
    // At an interpolation point the zero selection is valid for the RMSE term.
    const double tn = theta.norm();
    if (tn > 0) sub += sqrt_delta * theta / tn;

    const double sub_norm2 = sub.squaredNorm();
    if (sub_norm2 < 1e-30) {
      out.converged = true;
      break;
    }
    const double f = rmse + sqrt_delta * tn;
    const double step = (f - best + gap) / sub_norm2;
    theta -= step * sub;
    const double f_new = objective_of(theta);
    if (f_new < best) {
      best = f_new;
      best_theta = theta;
    }
  }
  out.beta = w.back_map(best_theta);
  out.objective = best;
  return out;
}

Estimate solve_baseline_logistic(const Dataset& data, const Penalty& penalty) {
  require_classification(data, "solve_baseline_logistic");
  const Eigen::MatrixXd& x = data.features;
  const Eigen::VectorXd& y = data.labels;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd grad;
  double g = logistic_smooth(x, y, beta, &grad);

  const bool l1 = penalty.kind == Penalty::Kind::l1;
  const double delta = l1 ? penalty.delta : 0.0;
  const int cap = l1 ? kMaxIters : 10000;

  Estimate out;
  for (int t = 0; t < cap; ++t) {
    out.iterations = t + 1;
    double step = 1.0;
    Eigen::VectorXd next;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd v = beta - step * grad;
      if (l1) {
        next = v.array().sign() * (v.array().abs() - step * delta).max(0.0);
      } else {
        next = v;
      }
      const Eigen::VectorXd diff = next - beta;
      const double g_next = logistic_smooth(x, y, next, nullptr);
      if (g_next <= g + grad.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-16) break;
      step *= 0.5;
    }
    const double residual = (beta - next).norm() / step;
    beta = next;
    g = logistic_smooth(x, y, beta, &grad);
    if (residual <= kFirstOrderTol) {
      out.converged = true;
      break;
    }
  }
  out.beta = beta;
  out.objective = g + delta * beta.lpNorm<1>();
  return out;
}

double worst_case_loss(const Eigen::VectorXd& beta, const AdaptiveRegProblem& problem,
                       const Dataset& data) {
  const double dual = dual_norm(problem.lambda, beta);
  if (problem.loss == RobustLoss::logistic) {
    return mean_log_loss(data.features, data.labels, beta) + problem.delta * dual;
  }
  const Eigen::VectorXd r = data.labels - data.features * beta;
  const double rmse = std::sqrt(r.squaredNorm() / static_cast<double>(data.n()));
  const double root = rmse + std::sqrt(problem.delta) * dual;
  return root * root;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return x.colPivHouseholderQr().solve(y);
}

std::string estimate_record_to_json(const EstimateRecord& record) {
  nlohmann::json beta = nlohmann::json::array();
  for (Eigen::Index i = 0; i < record.estimate.beta.size(); ++i) {
    beta.push_back(record.estimate.beta(i));
  }
  const nlohmann::json j = {{"beta", beta},
                            {"objective", record.estimate.objective},
                            {"delta", record.delta},
                            {"loss", record.loss},
                            {"lambda_source", record.lambda_source},
                            {"converged", record.estimate.converged},
                            {"iterations", record.estimate.iterations},
                            {"model", record.model}};
  return j.dump(2) + "\n";
}

EstimateRecord estimate_record_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EstimateRecord record;
  const auto& beta = j.at("beta");
  record.estimate.beta.resize(static_cast<Eigen::Index>(beta.size()));
  for (size_t i = 0; i < beta.size(); ++i) {
    record.estimate.beta(static_cast<Eigen::Index>(i)) = beta[i].get<double>();
  }
  record.estimate.objective = j.at("objective").get<double>();
  record.estimate.converged = j.at("converged").get<bool>();
  record.estimate.iterations = j.at("iterations").get<int>();
  record.delta = j.at("delta").get<double>();
  record.loss = j.at("loss").get<std::string>();
  record.lambda_source = j.at("lambda_source").get<std::string>();
  record.model = j.value("model", "");
  return record;
}

}  // namespace dro
