#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dro/cost.hpp"
#include "dro/dataset.hpp"
#include "dro/estimators.hpp"
#include "dro/loss.hpp"

namespace dro {

/// Primal decision plus the dual multiplier of the transport-budget
/// constraint.
struct DualPoint {
  Eigen::VectorXd beta;
  double lambda = 0.0;  // kept >= 0 by projection
};

enum class SamplerCenter { origin, data_point };

/// Parameters of the soft-max smoothing phi_{eps,f}. The sampling density f
/// is Gaussian around the configured center; sigma_scales widens it into an
/// equal-weight mixture of widths sigma * scale so one draw can cover several
/// perturbation ranges.
struct SmoothingConfig {
  double epsilon = 0.5;
  double sampler_sigma = 1.0;
  SamplerCenter sampler_center = SamplerCenter::data_point;
  int samples_L = 1000;
  std::vector<double> sigma_scales = {1.0};
};

struct SgdConfig {
  int batch_size_M = 0;  // 0 selects min(n, 32)
  double step_beta = 0.01;
  double step_lambda = 0.01;
  double stop_tol = 1e-3;
  int averaging_window = 50;
  int max_iters = 5000;
  int warmup_iters = 500;  // flat steps, then 1/sqrt(t) decay
  std::uint64_t seed = 0;
};

/// Empirical witness of Assumption-1-style growth: l(u,y,beta) <=
/// Gamma * (1 + c(u,x)) on the probed shells.
struct GrowthCertificate {
  double gamma = 0.0;
  bool holds = false;
};

struct GrowthProbeConfig {
  double sigma = 1.0;
  double max_radius = 100.0;  // in units of sigma
};

struct ExactSearchConfig {
  double radius = 5.0;      // lattice half-width in units of sigma
  double sigma = 1.0;
  int grid_points = 5;      // per axis; the refinement pass halves the pitch
  double agreement_tol = 1e-4;
  int max_ascent_iters = 400;
};

struct SmoothedGradient {
  Eigen::VectorXd grad_beta;
  double grad_lambda = 0.0;
  double phi = 0.0;  // the smoothed value at the same draw, for free
};

struct SgdTraceRecord {
  int iter = 0;
  double objective_estimate = 0.0;
  double lambda = 0.0;
  double tracking_error = 0.0;
};

/// psi(u, X, Y, beta, lambda) = l(u, Y, beta) - lambda * (c(u, X) - delta).
double psi(const Eigen::VectorXd& u, const Eigen::VectorXd& x, double y,
           const DualPoint& point, const CostFunction& c, LossKind loss, double delta);

/// Low-dimensional oracle for phi = sup_u psi: multi-start ascent from the
/// data point and a lattice, certified by a refinement pass with halved
/// pitch. Throws when psi is detected unbounded along a probe ray.
double phi_exact(const Eigen::VectorXd& x, double y, const DualPoint& point,
                 const CostFunction& c, LossKind loss, double delta,
                 const ExactSearchConfig& cfg = {});

/// Monte Carlo soft-max smoothing: eps * (logsumexp(psi(u_k)/eps) - log L)
/// over L draws from the configured sampler. Deterministic given the seed.
double phi_smoothed(const Eigen::VectorXd& x, double y, const DualPoint& point,
                    const CostFunction& c, LossKind loss, double delta,
                    const SmoothingConfig& cfg, std::uint64_t seed);

/// Self-normalized importance-sampling gradient of phi_smoothed with the same
/// draw as phi_smoothed at this seed, so common-random-number finite
/// differences line up with it exactly.
SmoothedGradient grad_smoothed(const Eigen::VectorXd& x, double y, const DualPoint& point,
                               const CostFunction& c, LossKind loss, double delta,
                               const SmoothingConfig& cfg, std::uint64_t seed);

/// Minibatch SGD on the smoothed dual: projected descent over (beta, lambda),
/// lambda initialized at 0 and beta at the empirical risk minimizer. Stops
/// when the distance from the trailing-window average falls below stop_tol.
Estimate sgd_solve(const Dataset& data, const CostFunction& c, LossKind loss,
                   double delta, const SmoothingConfig& s_cfg, const SgdConfig& g_cfg,
                   double* final_lambda = nullptr,
                   const std::function<void(const SgdTraceRecord&)>& trace = {});

/// Probes expanding shells around every data point for the smallest growth
/// constant dominating the loss, with a 2x safety margin. A ratio still
/// climbing at the outermost shells reports holds=false.
GrowthCertificate check_growth(const Eigen::VectorXd& beta, const Dataset& data,
                               const CostFunction& c, LossKind loss,
                               const GrowthProbeConfig& cfg = {});

}  // namespace dro
