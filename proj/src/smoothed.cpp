#include "dro/smoothed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dro {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t iter, std::uint64_t elem) {
  return splitmix64(master ^ splitmix64(iter ^ splitmix64(elem)));
}

// L draws from the mixture sampler around the chosen center, one per column.
Eigen::MatrixXd draw_samples(const Eigen::VectorXd& x, const SmoothingConfig& cfg,
                             std::uint64_t seed) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd u(d, cfg.samples_L);
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::VectorXd center =
      cfg.sampler_center == SamplerCenter::data_point ? x : Eigen::VectorXd::Zero(d);
  const auto& scales = cfg.sigma_scales;
  for (int k = 0; k < cfg.samples_L; ++k) {
    const double width = cfg.sampler_sigma * scales[k % scales.size()];
    for (Eigen::Index r = 0; r < d; ++r) u(r, k) = center(r) + width * normal(engine);
  }
  return u;
}

struct BatchPsi {
  Eigen::VectorXd values;
  Eigen::VectorXd costs;
  Eigen::VectorXd scores;
};

BatchPsi psi_batch(const Eigen::MatrixXd& u, const Eigen::VectorXd& x, double y,
                   const DualPoint& point, const CostFunction& c, LossKind loss,
                   double delta) {
  BatchPsi b;
  b.costs = c.feature_cost_batch(u, x);
  b.scores = u.transpose() * point.beta;
  b.values.resize(u.cols());
  if (loss == LossKind::logistic) {
    for (Eigen::Index k = 0; k < u.cols(); ++k)
      b.values(k) = log1pexp_neg(y * b.scores(k));
  } else {
    b.values = (y - b.scores.array()).square();
  }
  b.values -= point.lambda * (b.costs.array() - delta).matrix();
  return b;
}

void validate_smoothing(const SmoothingConfig& cfg) {
  if (!(cfg.epsilon > 0)) throw std::invalid_argument("SmoothingConfig: epsilon <= 0");
  if (!(cfg.sampler_sigma > 0)) throw std::invalid_argument("SmoothingConfig: sigma <= 0");
  if (cfg.samples_L < 2) throw std::invalid_argument("SmoothingConfig: samples_L < 2");
  if (cfg.sigma_scales.empty()) {
    throw std::invalid_argument("SmoothingConfig: sigma_scales empty");
  }
}

// Numerical gradient of psi in u; robust across every cost kind the oracle
// sees, and cheap at oracle dimensions.
Eigen::VectorXd psi_grad_u(const Eigen::VectorXd& u, const Eigen::VectorXd& x, double y,
                           const DualPoint& point, const CostFunction& c, LossKind loss,
                           double delta) {
  const Eigen::Index d = u.size();
  Eigen::VectorXd g(d);
  const double h = 1e-6 * std::max(1.0, u.cwiseAbs().maxCoeff());
  Eigen::VectorXd up = u, dn = u;
  for (Eigen::Index i = 0; i < d; ++i) {
    up(i) += h;
    dn(i) -= h;
    g(i) = (psi(up, x, y, point, c, loss, delta) - psi(dn, x, y, point, c, loss, delta)) /
           (2 * h);
    up(i) = u(i);
    dn(i) = u(i);
  }
  return g;
}

double ascend_from(Eigen::VectorXd u, const Eigen::VectorXd& x, double y,
                   const DualPoint& point, const CostFunction& c, LossKind loss,
                   double delta, int max_iters) {
  double value = psi(u, x, y, point, c, loss, delta);
  double step = 1.0;
  for (int t = 0; t < max_iters; ++t) {
    const Eigen::VectorXd g = psi_grad_u(u, x, y, point, c, loss, delta);
    const double gn = g.norm();
    if (gn < 1e-10) break;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd cand = u + (step / gn) * g;
      const double v = psi(cand, x, y, point, c, loss, delta);
      if (v > value + 1e-14) {
        u = cand;
        value = v;
        improved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

double psi(const Eigen::VectorXd& u, const Eigen::VectorXd& x, double y,
           const DualPoint& point, const CostFunction& c, LossKind loss, double delta) {
  return point_loss(loss, u, y, point.beta) -
         point.lambda * (c.feature_cost(u, x) - delta);
}

double phi_exact(const Eigen::VectorXd& x, double y, const DualPoint& point,
                 const CostFunction& c, LossKind loss, double delta,
                 const ExactSearchConfig& cfg) {
  const Eigen::Index d = x.size();
  if (d > 3) throw std::invalid_argument("phi_exact: oracle limited to d <= 3");

  const double at_x = psi(x, x, y, point, c, loss, delta);

  // Unboundedness probe: follow rays to extreme radii; a psi that keeps
  // rising signals an Assumption-1 violation at this lambda.
  std::vector<Eigen::VectorXd> dirs;
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(i) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (point.beta.norm() > 0) {
    dirs.push_back(point.beta.normalized());
    dirs.push_back(-point.beta.normalized());
    if (const PsdMatrix* lam = c.lambda(); lam && lam->certified_invertible()) {
      const Eigen::VectorXd w = solve_psd(*lam, point.beta).normalized();
      dirs.push_back(w);
      dirs.push_back(-w);
    }
  }
  for (const Eigen::VectorXd& dir : dirs) {
    double prev = at_x, prev2 = at_x;
    bool rising_tail = true;
    double last = at_x;
    for (int k = 0; k <= 12; ++k) {
      const double t = cfg.sigma * std::pow(4.0, k);
      last = psi(x + t * dir, x, y, point, c, loss, delta);
      rising_tail = last > prev && prev > prev2;
      prev2 = prev;
      prev = last;
    }
    if (rising_tail && last > at_x + 10.0 * (1.0 + std::abs(at_x))) {
      throw std::runtime_error(
          "phi_exact: inner maximum unbounded along a probe ray (growth assumption "
          "violated at lambda = " +
          std::to_string(point.lambda) + ")");
    }
  }

  auto lattice_best = [&](int grid_points) {
    double best = ascend_from(x, x, y, point, c, loss, delta, cfg.max_ascent_iters);
    std::vector<int> idx(d, 0);
    while (true) {
      Eigen::VectorXd start = x;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double frac =
            grid_points == 1 ? 0.0 : -1.0 + 2.0 * idx[i] / double(grid_points - 1);
        start(i) += cfg.radius * cfg.sigma * frac;
      }
      best = std::max(best,
                      ascend_from(start, x, y, point, c, loss, delta, cfg.max_ascent_iters));
      Eigen::Index pos = 0;
      while (pos < d && ++idx[pos] == grid_points) idx[pos++] = 0;
      if (pos == d) break;
    }
    return best;
  };

  const double pass1 = lattice_best(cfg.grid_points);
  const double pass2 = lattice_best(2 * cfg.grid_points - 1);  // halves the pitch
  if (std::abs(pass1 - pass2) > cfg.agreement_tol * std::max(1.0, std::abs(pass2))) {
    throw std::runtime_error("phi_exact: refinement pass disagrees (" +
                             std::to_string(pass1) + " vs " + std::to_string(pass2) + ")");
  }
  return std::max(pass1, pass2);
}

double phi_smoothed(const Eigen::VectorXd& x, double y, const DualPoint& point,
                    const CostFunction& c, LossKind loss, double delta,
                    const SmoothingConfig& cfg, std::uint64_t seed) {
  validate_smoothing(cfg);
  const Eigen::MatrixXd u = draw_samples(x, cfg, seed);
  const BatchPsi b = psi_batch(u, x, y, point, c, loss, delta);
  const double m = b.values.maxCoeff();
  if (!std::isfinite(m)) {
    throw std::runtime_error(
        "phi_smoothed: all sample weights degenerate; increase sigma or epsilon");
  }
  const double lse =
      std::log(((b.values.array() - m) / cfg.epsilon).exp().sum()) + m / cfg.epsilon;
  return cfg.epsilon * (lse - std::log(double(cfg.samples_L)));
}

SmoothedGradient grad_smoothed(const Eigen::VectorXd& x, double y, const DualPoint& point,
                               const CostFunction& c, LossKind loss, double delta,
                               const SmoothingConfig& cfg, std::uint64_t seed) {
  validate_smoothing(cfg);
  const Eigen::MatrixXd u = draw_samples(x, cfg, seed);
  const BatchPsi b = psi_batch(u, x, y, point, c, loss, delta);
  const double m = b.values.maxCoeff();
  if (!std::isfinite(m)) {
    throw std::runtime_error(
        "grad_smoothed: all sample weights degenerate; increase sigma or epsilon");
  }
  Eigen::ArrayXd w = ((b.values.array() - m) / cfg.epsilon).exp();
  const double wsum = w.sum();
  w /= wsum;

  // d/dbeta of the pointwise loss at each sample, weighted and summed.
  Eigen::ArrayXd coef(b.scores.size());
  if (loss == LossKind::logistic) {
    const Eigen::ArrayXd margins = y * b.scores.array();
    coef = -y / (1.0 + margins.exp());  // -y * sigmoid(-m)
  } else {
    coef = -2.0 * (y - b.scores.array());
  }
  SmoothedGradient g;
  g.grad_beta = u * (w * coef).matrix();
  g.grad_lambda = (w * (delta - b.costs.array())).sum();
  g.phi = cfg.epsilon * (std::log(wsum) + m / cfg.epsilon - std::log(double(cfg.samples_L)));
  return g;
}

Estimate sgd_solve(const Dataset& data, const CostFunction& c, LossKind loss,
                   double delta, const SmoothingConfig& s_cfg, const SgdConfig& g_cfg,
                   double* final_lambda,
                   const std::function<void(const SgdTraceRecord&)>& trace) {
  validate_smoothing(s_cfg);
  if (delta < 0) throw std::invalid_argument("sgd_solve: delta < 0");
  const int n = static_cast<int>(data.n());
  const int batch = g_cfg.batch_size_M > 0 ? std::min(g_cfg.batch_size_M, n)
                                           : std::min(n, 32);

  DualPoint point;
  point.lambda = 0.0;
  if (loss == LossKind::logistic) {
    point.beta = solve_baseline_logistic(data, Penalty::none()).beta;
  } else {
    point.beta = least_squares(data.features, data.labels);
  }

  const GrowthCertificate cert =
      check_growth(point.beta, data, c, loss, {s_cfg.sampler_sigma, 100.0});
  if (!cert.holds) {
    throw std::invalid_argument(
        "sgd_solve: growth condition fails at the initial point; the worst-case loss "
        "is unbounded for this loss/cost pairing");
  }

  std::deque<Eigen::VectorXd> window;  // stacked (beta, lambda)
  auto stacked = [&](const DualPoint& p) {
    Eigen::VectorXd s(p.beta.size() + 1);
    s << p.beta, p.lambda;
    return s;
  };

  Estimate out;
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<double> objective_history;

  for (int t = 0; t < g_cfg.max_iters; ++t) {
    out.iterations = t + 1;
    std::mt19937_64 pick_engine(substream_seed(g_cfg.seed, t, 0x5A17));
    std::shuffle(indices.begin(), indices.end(), pick_engine);

    Eigen::VectorXd grad_beta = Eigen::VectorXd::Zero(point.beta.size());
    double grad_lambda = 0.0;
    double batch_phi = 0.0;
    for (int e = 0; e < batch; ++e) {
      const int j = indices[e];
      const SmoothedGradient g =
          grad_smoothed(data.features.row(j).transpose(), data.labels(j), point, c, loss,
                        delta, s_cfg, substream_seed(g_cfg.seed, t, j));
      grad_beta += g.grad_beta;
      grad_lambda += g.grad_lambda;
      batch_phi += g.phi;
    }
    grad_beta /= batch;
    grad_lambda /= batch;
    batch_phi /= batch;

    objective_history.push_back(batch_phi);
    if (t >= 200) {
      const double ref = objective_history[t - 200];
      if (batch_phi - ref > 9.0 * std::max(std::abs(ref), 1.0)) {
        throw std::runtime_error(
            "sgd_solve: diverging objective (batch estimate rose from " +
            std::to_string(ref) + " to " + std::to_string(batch_phi) + " over 200 "
            "iterations; lambda = " + std::to_string(point.lambda) + ")");
      }
    }

    const double decay =
        t < g_cfg.warmup_iters
            ? 1.0
            : std::sqrt(double(g_cfg.warmup_iters) / double(t + 1));
    point.beta -= g_cfg.step_beta * decay * grad_beta;
    point.lambda = std::max(0.0, point.lambda - g_cfg.step_lambda * decay * grad_lambda);

    const Eigen::VectorXd current = stacked(point);
    double tracking_error = std::numeric_limits<double>::infinity();
    if (static_cast<int>(window.size()) == g_cfg.averaging_window) {
      Eigen::VectorXd avg = Eigen::VectorXd::Zero(current.size());
      for (const auto& v : window) avg += v;
      avg /= double(window.size());
      tracking_error = (current - avg).norm();
    }
    window.push_back(current);
    if (static_cast<int>(window.size()) > g_cfg.averaging_window) window.pop_front();

    if (trace) trace({t, batch_phi, point.lambda, tracking_error});
    if (tracking_error < g_cfg.stop_tol) {
      out.converged = true;
      break;
    }
  }

  // Dual objective at the final point, with a fixed evaluation stream.
  double objective = 0.0;
  for (int i = 0; i < n; ++i) {
    objective += phi_smoothed(data.features.row(i).transpose(), data.labels(i), point, c,
                              loss, delta, s_cfg, substream_seed(g_cfg.seed, 0x0B9EC71Eull, i));
  }
  out.objective = objective / n;
  out.beta = point.beta;
  if (final_lambda) *final_lambda = point.lambda;
  return out;
}

GrowthCertificate check_growth(const Eigen::VectorXd& beta, const Dataset& data,
                               const CostFunction& c, LossKind loss,
                               const GrowthProbeConfig& cfg) {
  const Eigen::Index d = data.dim();
  std::vector<Eigen::VectorXd> dirs;
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(i) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (beta.norm() > 0) {
    dirs.push_back(beta.normalized());
    dirs.push_back(-beta.normalized());
  }
  dirs.push_back(Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d))));

  std::vector<double> radii;
  for (double r = 0.5; r <= cfg.max_radius; r *= 2.0) radii.push_back(r * cfg.sigma);

  double gamma_raw = 0.0;
  double outer_max = 0.0, inner_max = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd x = data.features.row(i).transpose();
    const double y = data.labels(i);
    gamma_raw = std::max(gamma_raw, point_loss(loss, x, y, beta));  // radius-0 probe
    for (size_t ridx = 0; ridx < radii.size(); ++ridx) {
      for (const Eigen::VectorXd& dir : dirs) {
        const Eigen::VectorXd u = x + radii[ridx] * dir;
        const double ratio =
            point_loss(loss, u, y, beta) / (1.0 + c.feature_cost(u, x));
        gamma_raw = std::max(gamma_raw, ratio);
        if (ridx + 1 == radii.size()) {
          outer_max = std::max(outer_max, ratio);
        } else if (ridx + 2 >= radii.size()) {
          inner_max = std::max(inner_max, ratio);
        }
      }
    }
  }
  GrowthCertificate cert;
  cert.gamma = 2.0 * gamma_raw;
  cert.holds = outer_max <= inner_max * 1.05 + 1e-12;
  return cert;
}

}  // namespace dro
