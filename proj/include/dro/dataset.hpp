#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dro {

/// Per-feature location/scale recorded from the split that produced them, so
/// leakage can be checked downstream.
struct StandardizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::string source;  // provenance tag of the fitting split
};

/// Feature matrix plus labels. Classification labels live in {-1,+1};
/// regression labels are unrestricted reals.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // length n
  bool standardized = false;
  StandardizationStats stats;
  std::string provenance;  // e.g. "train/r3/fold0"

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  bool classification_labels() const {
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) != 1.0 && labels(i) != -1.0) return false;
    return labels.size() > 0;
  }

  Dataset subset(const std::vector<int>& rows, const std::string& tag) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t k = 0; k < rows.size(); ++k) {
      out.features.row(static_cast<Eigen::Index>(k)) = features.row(rows[k]);
      out.labels(static_cast<Eigen::Index>(k)) = labels(rows[k]);
    }
    out.standardized = standardized;
    out.stats = stats;
    out.provenance = tag;
    return out;
  }
};

}  // namespace dro
