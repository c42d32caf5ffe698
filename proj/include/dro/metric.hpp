#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dro/dataset.hpp"
#include "dro/feature_map.hpp"
#include "dro/linalg.hpp"

namespace dro {

/// Must-link / cannot-link index pairs, deduplicated with i < j and disjoint
/// by construction (membership is decided per pair by label agreement).
struct PairSets {
  std::vector<std::pair<int, int>> must_link;
  std::vector<std::pair<int, int>> cannot_link;
};

struct MetricLearnConfig {
  int k = 5;                  // neighbor count for pair generation
  double lambda_bar = 1.0;    // separation level for the cannot-link constraint
  double step_size = 0.1;     // base subgradient step (decays as 1/sqrt(t))
  int max_iters = 500;
  double pd_floor_gamma = 0.1;
  std::uint64_t seed = 0;
};

struct MetricLearnResult {
  PsdMatrix lambda;
  double objective = 0.0;       // sum over must-link of d_Lambda^2 at the result
  double constraint_value = 0;  // sum over cannot-link of d_Lambda^2
  int iterations = 0;
  bool converged = false;
};

/// k-nearest-neighbor pair generation: for each point, its k Euclidean
/// neighbors join the must-link set when labels agree and the cannot-link set
/// otherwise. Ties break toward the lower index.
PairSets build_pair_sets(const Dataset& data, int k);

/// Minimizes the total must-link squared distance subject to the cannot-link
/// squared distances summing to at least lambda_bar, over the PSD cone.
/// Projected subgradient: gradient step on tr(A_M Lambda), PSD projection,
/// then rescale to restore the cannot-link level. Deterministic.
MetricLearnResult learn_mahalanobis(const Dataset& data, const PairSets& pairs,
                                    const FeatureMap& map, const MetricLearnConfig& cfg);

/// Blends toward the identity to certify strict positive definiteness while
/// keeping the learned geometry: (1-gamma) * A * (d / tr A) + gamma * I.
/// The returned bound is at least gamma.
PsdMatrix pd_floor(const PsdMatrix& a, double gamma);

}  // namespace dro
