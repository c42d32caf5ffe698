#pragma once

#include <string>
#include <vector>

#include "dro/cost.hpp"

namespace dro {

/// Finitely supported probability measure.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<Atom> atoms, Eigen::VectorXd weights);

  static DiscreteDistribution uniform(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int size() const { return static_cast<int>(atoms_.size()); }

 private:
  std::vector<Atom> atoms_;
  Eigen::VectorXd weights_;
};

/// Coupling between two finite supports. Row marginals match the source
/// weights and column marginals the target weights within 1e-9; the value is
/// the expected ground cost, +inf when no finite-cost coupling exists.
struct TransportPlan {
  Eigen::MatrixXd plan;  // |support P| x |support Q|
  double value = 0.0;
  bool label_infeasible = false;
  std::string note;
};

/// Kantorovich discrepancy D_c(P, Q) by the transportation simplex
/// (northwest-corner start, most-negative reduced cost entering, Bland's rule
/// on ties). Infinite label-flip costs are exact: the problem decomposes into
/// per-label blocks, and mismatched per-label masses yield +inf flagged as
/// label-infeasible.
TransportPlan ot_discrepancy(const CostFunction& c, const DiscreteDistribution& p,
                             const DiscreteDistribution& q);

/// Test oracle: exhaustive enumeration of transportation-polytope vertices
/// (spanning-tree bases). Supports of size <= 5 per side.
double ot_brute_force(const CostFunction& c, const DiscreteDistribution& p,
                      const DiscreteDistribution& q);

}  // namespace dro
