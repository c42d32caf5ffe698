#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dro/dataset.hpp"
#include "dro/estimators.hpp"
#include "dro/metric.hpp"
#include "dro/smoothed.hpp"

namespace dro {

enum class ModelKind { LR, LRL1, DRO_L, DRO_NL };

std::string model_name(ModelKind m);
ModelKind model_from_name(const std::string& name);

/// Log grid 1e-4 .. 1e1 with 12 points, plus 0.
std::vector<double> default_delta_grid();

struct ExperimentConfig {
  std::string dataset_name;
  std::vector<ModelKind> models;
  std::vector<double> delta_grid = default_delta_grid();
  int folds = 5;
  int repeats = 200;
  int train_size = 0;
  int test_cap = -1;  // cap on test rows per repeat; -1 keeps all, recorded either way
  std::uint64_t seed = 0;
  MetricLearnConfig metric_learn;
  bool dro_use_sgd = false;  // smoothed-dual parity path for the DRO fits
  SmoothingConfig smoothing;
  SgdConfig sgd;
};

/// Train/test membership and fold labels for every repeat, a pure function of
/// the seed.
struct SplitPlan {
  std::vector<std::vector<int>> train;    // [repeat][position] -> row
  std::vector<std::vector<int>> test;     // [repeat][position] -> row
  std::vector<std::vector<int>> fold_of;  // [repeat][train position] -> fold id

  static SplitPlan make(int n, int train_size, int test_cap, int repeats, int folds,
                        std::uint64_t seed);
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
};

struct RepeatRecord {
  int repeat = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double accuracy = 0.0;
  double chosen_delta = 0.0;
};

struct ModelMetrics {
  std::string name;
  Aggregate train_loss, test_loss, accuracy;
  std::vector<RepeatRecord> records;               // successful repeats, in order
  std::vector<std::pair<double, int>> delta_counts;  // chosen-delta distribution
};

struct MetricsReport {
  std::string version = "1";
  std::string config_digest;
  std::string dataset_name;
  int num_predictors = 0;
  int train_size = 0;
  int test_size = 0;
  int repeats = 0;
  int folds = 0;
  int failed_repeats = 0;
  int test_cap = -1;
  std::vector<ModelMetrics> models;
};

/// RFC-4180-style reader: header row required, quoted fields honored, rows
/// with missing cells dropped and counted. The label column maps to +1 on
/// positive_label and -1 otherwise; feature column order is preserved.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label, int* dropped_rows = nullptr);

/// Centers and scales to unit variance using statistics of `train` only; the
/// same statistics transform every other split. Zero-variance features are
/// dropped from all splits (indices reported through dropped_features).
std::pair<Dataset, std::vector<Dataset>> standardize(
    const Dataset& train, const std::vector<Dataset>& others,
    std::vector<int>* dropped_features = nullptr);

/// Mean validation log-loss over folds for each delta; smallest delta wins
/// ties. Lambda for the DRO models is relearned inside each fold.
double cross_validate_delta(const Dataset& train, ModelKind model,
                            const std::vector<double>& delta_grid, int folds,
                            std::uint64_t seed, const ExperimentConfig& cfg);

/// Fits one model on (standardized) training data at a fixed delta.
/// For the DRO models this learns the transport cost on `train` itself.
Estimate fit_model(ModelKind model, const Dataset& train, double delta,
                   const ExperimentConfig& cfg);

/// Test-set metrics for a fitted model. DRO-NL expects raw (unmapped)
/// features and applies its quadratic map internally, like fit_model.
struct EvalMetrics {
  double log_loss = 0.0;
  double accuracy = 0.0;
};
EvalMetrics evaluate_model(ModelKind model, const Estimate& estimate,
                           const Dataset& data);

/// Table-1 protocol: repeated random splits, per-split standardization and
/// cost learning, cross-validated delta, mean +/- std aggregation.
MetricsReport run_benchmark(const ExperimentConfig& cfg, const Dataset& full);

/// Gaussian features with the label depending on the first coordinate only:
/// P(Y = 1 | x) = 1 / (1 + exp(-informative_coef * x(0))).
Dataset synth_figure1b(int n, int d, double informative_coef, std::uint64_t seed);

/// Renders the report; format is "json" or "markdown".
std::string emit_report(const MetricsReport& report, const std::string& format);

/// Inverse of the JSON rendering, for round-trip checks and the eval tooling.
MetricsReport parse_report_json(const std::string& text);

/// FNV-1a 64-bit digest used for config fingerprints; stable across runs.
std::uint64_t fnv1a64(const std::string& text);
std::string config_digest(const ExperimentConfig& cfg);

/// Headerless numeric CSV helpers for matrices (learned costs, plans).
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace dro
