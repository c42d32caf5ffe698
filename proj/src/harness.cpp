#include "dro/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dro {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  const double n = static_cast<double>(values.size());
  if (values.empty()) return a;
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

void require_provenance_child(const std::string& child, const std::string& parent,
                              const char* what) {
  if (child.rfind(parent, 0) != 0) {
    throw std::logic_error(std::string("leakage check: ") + what + " derived from '" +
                           child + "' used with training split '" + parent + "'");
  }
}

// One CSV record, honoring quoted fields; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty() || s == "?" || s == "NA" || s == "na" || s == "nan") return false;
  try {
    size_t pos = 0;
    *out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::LR: return "LR";
    case ModelKind::LRL1: return "LRL1";
    case ModelKind::DRO_L: return "DRO-L";
    case ModelKind::DRO_NL: return "DRO-NL";
  }
  throw std::logic_error("model_name: unknown model");
}

ModelKind model_from_name(const std::string& name) {
  if (name == "LR" || name == "lr") return ModelKind::LR;
  if (name == "LRL1" || name == "lrl1") return ModelKind::LRL1;
  if (name == "DRO-L" || name == "dro-l") return ModelKind::DRO_L;
  if (name == "DRO-NL" || name == "dro-nl") return ModelKind::DRO_NL;
  throw std::invalid_argument("unknown model name: " + name);
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid = {0.0};
  for (int k = 0; k < 12; ++k) grid.push_back(std::pow(10.0, -4.0 + 5.0 * k / 11.0));
  return grid;
}

SplitPlan SplitPlan::make(int n, int train_size, int test_cap, int repeats, int folds,
                          std::uint64_t seed) {
  if (train_size <= 0 || train_size >= n) {
    throw std::invalid_argument("SplitPlan: train_size must lie in (0, n)");
  }
  if (folds < 2) throw std::invalid_argument("SplitPlan: folds must be >= 2");
  SplitPlan plan;
  plan.train.resize(repeats);
  plan.test.resize(repeats);
  plan.fold_of.resize(repeats);
  for (int r = 0; r < repeats; ++r) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 engine(mix(seed, static_cast<std::uint64_t>(r)));
    std::shuffle(order.begin(), order.end(), engine);
    plan.train[r].assign(order.begin(), order.begin() + train_size);
    const int avail = n - train_size;
    const int take = test_cap >= 0 ? std::min(test_cap, avail) : avail;
    plan.test[r].assign(order.begin() + train_size, order.begin() + train_size + take);
    plan.fold_of[r].resize(train_size);
    for (int p = 0; p < train_size; ++p) plan.fold_of[r][p] = p % folds;
  }
  return plan;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label, int* dropped_rows) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<std::string> header;
  if (!read_record(in, header) || header.empty()) {
    throw std::runtime_error("load_csv: missing header row in " + path);
  }
  int label_idx = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_idx = static_cast<int>(i);
  }
  if (label_idx < 0) {
    throw std::invalid_argument("load_csv: label column '" + label_column +
                                "' not found in " + path);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  bool saw_positive = false;
  int dropped = 0;
  std::vector<std::string> fields;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      ++dropped;
      continue;
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    bool ok = true;
    for (size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_idx) continue;
      double v = 0.0;
      if (!parse_number(fields[i], &v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok || fields[label_idx].empty()) {
      ++dropped;
      continue;
    }
    saw_positive = saw_positive || fields[label_idx] == positive_label;
    labels.push_back(fields[label_idx] == positive_label ? 1.0 : -1.0);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: no usable rows in " + path);
  if (!saw_positive) {
    throw std::invalid_argument("load_csv: positive label '" + positive_label +
                                "' never appears in " + path);
  }
  if (dropped_rows) *dropped_rows = dropped;

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  data.labels.resize(static_cast<Eigen::Index>(labels.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j)
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    data.labels(static_cast<Eigen::Index>(i)) = labels[i];
  }
  data.provenance = path;
  return data;
}

std::pair<Dataset, std::vector<Dataset>> standardize(
    const Dataset& train, const std::vector<Dataset>& others,
    std::vector<int>* dropped_features) {
  if (train.n() == 0) throw std::invalid_argument("standardize: empty training set");
  const Eigen::Index d = train.dim();
  const Eigen::VectorXd mean = train.features.colwise().mean();
  Eigen::VectorXd scale(d);
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var =
        (train.features.col(j).array() - mean(j)).square().mean();
    scale(j) = std::sqrt(var);
    if (scale(j) > 0) keep.push_back(static_cast<int>(j));
    else if (dropped_features) dropped_features->push_back(static_cast<int>(j));
  }
  if (keep.empty()) throw std::invalid_argument("standardize: all features are constant");

  StandardizationStats stats;
  stats.mean.resize(static_cast<Eigen::Index>(keep.size()));
  stats.scale.resize(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    stats.mean(static_cast<Eigen::Index>(k)) = mean(keep[k]);
    stats.scale(static_cast<Eigen::Index>(k)) = scale(keep[k]);
  }
  stats.source = train.provenance;

  auto apply = [&](const Dataset& in) {
    Dataset out;
    out.features.resize(in.n(), static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) {
      out.features.col(static_cast<Eigen::Index>(k)) =
          (in.features.col(keep[k]).array() - stats.mean(static_cast<Eigen::Index>(k))) /
          stats.scale(static_cast<Eigen::Index>(k));
    }
    out.labels = in.labels;
    out.standardized = true;
    out.stats = stats;
    out.provenance = in.provenance;
    return out;
  };

  std::pair<Dataset, std::vector<Dataset>> result{apply(train), {}};
  result.second.reserve(others.size());
  for (const Dataset& o : others) result.second.push_back(apply(o));
  return result;
}

namespace {

// Learns the transport cost matrix on `train` (identity map for DRO-L,
// quadratic map for DRO-NL) and returns the floored strictly-PD result.
PsdMatrix learn_cost_matrix(ModelKind model, const Dataset& train,
                            const ExperimentConfig& cfg) {
  const FeatureMap map(model == ModelKind::DRO_NL ? FeatureMapKind::linear_quadratic
                                                  : FeatureMapKind::identity,
                       train.dim());
  const PairSets pairs = build_pair_sets(train, cfg.metric_learn.k);
  const MetricLearnResult learned =
      learn_mahalanobis(train, pairs, map, cfg.metric_learn);
  return pd_floor(learned.lambda, cfg.metric_learn.pd_floor_gamma);
}

Estimate fit_dro(ModelKind model, const Dataset& train, double delta,
                 const PsdMatrix& lambda, const ExperimentConfig& cfg) {
  Dataset fit_data = train;
  if (model == ModelKind::DRO_NL) {
    const FeatureMap map(FeatureMapKind::linear_quadratic, train.dim());
    fit_data.features = map.apply_rows(train.features);
  }
  if (cfg.dro_use_sgd) {
    const CostFunction cost = CostFunction::mahalanobis(lambda, 1.0);
    SgdConfig sgd = cfg.sgd;
    sgd.seed = mix(cfg.seed, 0x5D6Dull);
    return sgd_solve(fit_data, cost, LossKind::logistic, delta, cfg.smoothing, sgd);
  }
  const AdaptiveRegProblem problem(RobustLoss::logistic, lambda, delta);
  return solve_adaptive_logistic(problem, fit_data);
}

}  // namespace

Estimate fit_model(ModelKind model, const Dataset& train, double delta,
                   const ExperimentConfig& cfg) {
  switch (model) {
    case ModelKind::LR:
      return solve_baseline_logistic(train, Penalty::none());
    case ModelKind::LRL1:
      return solve_baseline_logistic(train, Penalty::l1(delta));
    case ModelKind::DRO_L:
    case ModelKind::DRO_NL: {
      const PsdMatrix lambda = learn_cost_matrix(model, train, cfg);
      return fit_dro(model, train, delta, lambda, cfg);
    }
  }
  throw std::logic_error("fit_model: unknown model");
}

EvalMetrics evaluate_model(ModelKind model, const Estimate& estimate,
                           const Dataset& data) {
  Eigen::MatrixXd x = data.features;
  if (model == ModelKind::DRO_NL) {
    const FeatureMap map(FeatureMapKind::linear_quadratic, data.dim());
    x = map.apply_rows(x);
  }
  EvalMetrics m;
  m.log_loss = mean_log_loss(x, data.labels, estimate.beta);
  const Eigen::VectorXd scores = x * estimate.beta;
  int correct = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double pred = scores(i) >= 0 ? 1.0 : -1.0;
    if (pred == data.labels(i)) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(data.n());
  return m;
}

double cross_validate_delta(const Dataset& train, ModelKind model,
                            const std::vector<double>& delta_grid, int folds,
                            std::uint64_t seed, const ExperimentConfig& cfg) {
  if (folds < 2) throw std::invalid_argument("cross_validate_delta: folds < 2");
  if (delta_grid.empty()) throw std::invalid_argument("cross_validate_delta: empty grid");
  if (delta_grid.size() == 1) return delta_grid.front();

  const int n = static_cast<int>(train.n());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 engine(mix(seed, 0xF01D5ull));
  std::shuffle(order.begin(), order.end(), engine);

  std::vector<double> grid = delta_grid;
  std::sort(grid.begin(), grid.end());
  std::vector<double> total(grid.size(), 0.0);
  std::vector<int> valid(grid.size(), 0);

  for (int f = 0; f < folds; ++f) {
    std::vector<int> fit_rows, val_rows;
    for (int p = 0; p < n; ++p) {
      (p % folds == f ? val_rows : fit_rows).push_back(order[p]);
    }
    if (fit_rows.empty() || val_rows.empty()) continue;
    const Dataset fold_train =
        train.subset(fit_rows, train.provenance + "/fold" + std::to_string(f));
    const Dataset fold_val =
        train.subset(val_rows, train.provenance + "/fold" + std::to_string(f) + "-val");

    // The cost matrix does not depend on delta: learn it once per fold, on
    // the fold's training portion only.
    std::optional<PsdMatrix> lambda;
    if (model == ModelKind::DRO_L || model == ModelKind::DRO_NL) {
      try {
        lambda = learn_cost_matrix(model, fold_train, cfg);
      } catch (const std::exception&) {
        continue;  // every delta is invalid on this fold
      }
    }

    for (size_t gi = 0; gi < grid.size(); ++gi) {
      try {
        Estimate est;
        if (lambda) {
          est = fit_dro(model, fold_train, grid[gi], *lambda, cfg);
        } else {
          est = fit_model(model, fold_train, grid[gi], cfg);
        }
        total[gi] += evaluate_model(model, est, fold_val).log_loss;
        ++valid[gi];
      } catch (const std::exception&) {
        // delta marked invalid on this fold
      }
    }
  }

  int best = -1;
  double best_avg = std::numeric_limits<double>::infinity();
  for (size_t gi = 0; gi < grid.size(); ++gi) {
    if (valid[gi] == 0) continue;
    const double avg = total[gi] / valid[gi];
    if (avg < best_avg) {
      best_avg = avg;
      best = static_cast<int>(gi);
    }
  }
  if (best < 0) {
    throw std::runtime_error("cross_validate_delta: every delta failed on every fold");
  }
  return grid[best];
}

Dataset synth_figure1b(int n, int d, double informative_coef, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("synth_figure1b: d must be >= 2");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.features(i, j) = normal(engine);
    const double p = 1.0 / (1.0 + std::exp(-informative_coef * data.features(i, 0)));
    data.labels(i) = unif(engine) < p ? 1.0 : -1.0;
  }
  data.provenance = "synth-fig1b";
  return data;
}

MetricsReport run_benchmark(const ExperimentConfig& cfg, const Dataset& full) {
  const int n = static_cast<int>(full.n());
  const SplitPlan plan =
      SplitPlan::make(n, cfg.train_size, cfg.test_cap, cfg.repeats, cfg.folds, cfg.seed);

  MetricsReport report;
  report.config_digest = config_digest(cfg);
  report.dataset_name = cfg.dataset_name;
  report.train_size = cfg.train_size;
  report.repeats = cfg.repeats;
  report.folds = cfg.folds;
  report.test_cap = cfg.test_cap;
  report.models.resize(cfg.models.size());
  for (size_t m = 0; m < cfg.models.size(); ++m) {
    report.models[m].name = model_name(cfg.models[m]);
  }

  int failed = 0;
  for (int r = 0; r < cfg.repeats; ++r) {
    const std::string tag = "train/r" + std::to_string(r);
    const Dataset train_raw = full.subset(plan.train[r], tag);
    const Dataset test_raw = full.subset(plan.test[r], "test/r" + std::to_string(r));
    try {
      auto [train, others] = standardize(train_raw, {test_raw});
      const Dataset& test = others.front();
      require_provenance_child(train.stats.source, tag, "standardization stats");
      report.num_predictors = static_cast<int>(train.dim());
      report.test_size = static_cast<int>(test.n());

      for (size_t m = 0; m < cfg.models.size(); ++m) {
        const ModelKind model = cfg.models[m];
        double delta = 0.0;
        if (model != ModelKind::LR) {
          delta = cross_validate_delta(train, model, cfg.delta_grid, cfg.folds,
                                       mix(cfg.seed, static_cast<std::uint64_t>(r)), cfg);
        }
        const Estimate est = fit_model(model, train, delta, cfg);
        const EvalMetrics train_metrics = evaluate_model(model, est, train);
        const EvalMetrics test_metrics = evaluate_model(model, est, test);
        report.models[m].records.push_back(
            {r, train_metrics.log_loss, test_metrics.log_loss, test_metrics.accuracy,
             delta});
      }
    } catch (const std::exception&) {
      ++failed;
      for (auto& mm : report.models) {
        while (!mm.records.empty() && mm.records.back().repeat == r) mm.records.pop_back();
      }
    }
  }
  if (failed > cfg.repeats / 10) {
    throw std::runtime_error("run_benchmark: more than 10% of repeats failed (" +
                             std::to_string(failed) + "/" + std::to_string(cfg.repeats) +
                             ")");
  }
  report.failed_repeats = failed;

  for (auto& mm : report.models) {
    std::vector<double> train_l, test_l, acc;
    std::map<double, int> delta_counts;
    for (const RepeatRecord& rec : mm.records) {
      train_l.push_back(rec.train_loss);
      test_l.push_back(rec.test_loss);
      acc.push_back(rec.accuracy);
      ++delta_counts[rec.chosen_delta];
    }
    mm.train_loss = aggregate(train_l);
    mm.test_loss = aggregate(test_l);
    mm.accuracy = aggregate(acc);
    mm.delta_counts.assign(delta_counts.begin(), delta_counts.end());
  }
  return report;
}

namespace {

json aggregate_json(const Aggregate& a) { return json{{"mean", a.mean}, {"std", a.std}}; }

Aggregate aggregate_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>()};
}

}  // namespace

std::string emit_report(const MetricsReport& report, const std::string& format) {
  if (format == "json") {
    json models = json::array();
    for (const ModelMetrics& mm : report.models) {
      json records = json::array();
      for (const RepeatRecord& r : mm.records) {
        records.push_back(json{{"repeat", r.repeat},
                               {"train_loss", r.train_loss},
                               {"test_loss", r.test_loss},
                               {"accuracy", r.accuracy},
                               {"chosen_delta", r.chosen_delta}});
      }
      json deltas = json::array();
      for (const auto& [delta, count] : mm.delta_counts) {
        deltas.push_back(json::array({delta, count}));
      }
      models.push_back(json{{"name", mm.name},
                            {"train_loss", aggregate_json(mm.train_loss)},
                            {"test_loss", aggregate_json(mm.test_loss)},
                            {"accuracy", aggregate_json(mm.accuracy)},
                            {"chosen_delta_counts", deltas},
                            {"records", records}});
    }
    const json j = {{"version", report.version},
                    {"config_digest", report.config_digest},
                    {"models", models},
                    {"metadata",
                     {{"dataset", report.dataset_name},
                      {"num_predictors", report.num_predictors},
                      {"train_size", report.train_size},
                      {"test_size", report.test_size},
                      {"repeats", report.repeats},
                      {"folds", report.folds},
                      {"failed_repeats", report.failed_repeats},
                      {"test_cap", report.test_cap}}}};
    return j.dump(2) + "\n";
  }
  if (format == "markdown") {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "| Model | Metric | " << report.dataset_name << " |\n";
    os << "|---|---|---|\n";
    for (const ModelMetrics& mm : report.models) {
      os << "| " << mm.name << " | Train | " << mm.train_loss.mean << " ± "
         << mm.train_loss.std << " |\n";
      os << "| " << mm.name << " | Test | " << mm.test_loss.mean << " ± "
         << mm.test_loss.std << " |\n";
      os << "| " << mm.name << " | Accur | " << mm.accuracy.mean << " ± "
         << mm.accuracy.std << " |\n";
    }
    os << "| Num Predictors | | " << report.num_predictors << " |\n";
    os << "| Train Size | | " << report.train_size << " |\n";
    os << "| Test Size | | " << report.test_size << " |\n";
    return os.str();
  }
  throw std::invalid_argument("emit_report: unknown format " + format);
}

MetricsReport parse_report_json(const std::string& text) {
  const json j = json::parse(text);
  MetricsReport report;
  report.version = j.at("version").get<std::string>();
  report.config_digest = j.at("config_digest").get<std::string>();
  const json& meta = j.at("metadata");
  report.dataset_name = meta.at("dataset").get<std::string>();
  report.num_predictors = meta.at("num_predictors").get<int>();
  report.train_size = meta.at("train_size").get<int>();
  report.test_size = meta.at("test_size").get<int>();
  report.repeats = meta.at("repeats").get<int>();
  report.folds = meta.at("folds").get<int>();
  report.failed_repeats = meta.at("failed_repeats").get<int>();
  report.test_cap = meta.at("test_cap").get<int>();
  for (const json& jm : j.at("models")) {
    ModelMetrics mm;
    mm.name = jm.at("name").get<std::string>();
    mm.train_loss = aggregate_from_json(jm.at("train_loss"));
    mm.test_loss = aggregate_from_json(jm.at("test_loss"));
    mm.accuracy = aggregate_from_json(jm.at("accuracy"));
    for (const json& jd : jm.at("chosen_delta_counts")) {
      mm.delta_counts.emplace_back(jd.at(0).get<double>(), jd.at(1).get<int>());
    }
    for (const json& jr : jm.at("records")) {
      mm.records.push_back({jr.at("repeat").get<int>(), jr.at("train_loss").get<double>(),
                            jr.at("test_loss").get<double>(),
                            jr.at("accuracy").get<double>(),
                            jr.at("chosen_delta").get<double>()});
    }
    report.models.push_back(std::move(mm));
  }
  return report;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << m(i, j);
      out << (j + 1 == m.cols() ? '\n' : ',');
    }
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> fields;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    std::vector<double> row;
    for (const std::string& f : fields) {
      double v = 0.0;
      if (!parse_number(f, &v)) {
        throw std::runtime_error("read_matrix_csv: non-numeric cell '" + f + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("read_matrix_csv: ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_matrix_csv: empty file " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "dataset=" << cfg.dataset_name << ";models=";
  for (ModelKind m : cfg.models) os << model_name(m) << ",";
  os << ";grid=";
  for (double d : cfg.delta_grid) os << d << ",";
  os << ";folds=" << cfg.folds << ";repeats=" << cfg.repeats
     << ";train_size=" << cfg.train_size << ";test_cap=" << cfg.test_cap
     << ";seed=" << cfg.seed << ";k=" << cfg.metric_learn.k
     << ";lambda_bar=" << cfg.metric_learn.lambda_bar
     << ";gamma=" << cfg.metric_learn.pd_floor_gamma
     << ";sgd=" << (cfg.dro_use_sgd ? 1 : 0);
  std::ostringstream hex;
  hex << std::hex << fnv1a64(os.str());
  return hex.str();
}

}  // namespace dro
