#include <doctest.h>

#include <random>

#include "dro/harness.hpp"
#include "dro/metric.hpp"

using namespace dro;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dataset make_data(const MatrixXd& x, const VectorXd& y) {
  Dataset d;
  d.features = x;
  d.labels = y;
  d.provenance = "test";
  return d;
}

// Two pairs differing only along one coordinate each: must-link along e2,
// cannot-link along e1 (the stylized informative/uninformative geometry).
Dataset axis_pair_data() {
  MatrixXd x(4, 2);
  x << 0, 0,   // 0 (+)
       0, 1,   // 1 (+)  must pair with 0 along e2
      10, 0,   // 2 (+)
      11, 0;   // 3 (-)  cannot pair with 2 along e1
  VectorXd y(4);
  y << 1, 1, 1, -1;
  return make_data(x, y);
}

}  // namespace

TEST_CASE("build_pair_sets forced two-point cases") {
  MatrixXd x(2, 1);
  x << 0, 1;
  VectorXd same(2), diff(2);
  same << 1, 1;
  diff << 1, -1;

  auto p = build_pair_sets(make_data(x, same), 1);
  CHECK(p.must_link == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(p.cannot_link.empty());

  p = build_pair_sets(make_data(x, diff), 1);
  CHECK(p.cannot_link == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(p.must_link.empty());
}

TEST_CASE("build_pair_sets nearest-neighbor enumeration on collinear points") {
  MatrixXd x(4, 1);
  x << 0, 1, 10, 11;
  VectorXd y(4);
  y << 1, 1, -1, -1;
  const auto p = build_pair_sets(make_data(x, y), 1);
  CHECK(p.must_link == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK(p.cannot_link.empty());
}

TEST_CASE("build_pair_sets rejects k >= n and bad labels") {
  MatrixXd x(2, 1);
  x << 0, 1;
  VectorXd y(2);
  y << 1, -1;
  CHECK_THROWS_AS(build_pair_sets(make_data(x, y), 2), std::invalid_argument);
  y << 1, 0.5;
  CHECK_THROWS_AS(build_pair_sets(make_data(x, y), 1), std::invalid_argument);
}

TEST_CASE("learn_mahalanobis concentrates on the cannot-link direction") {
  const Dataset data = axis_pair_data();
  PairSets pairs;
  pairs.must_link = {{0, 1}};    // differ along e2
  pairs.cannot_link = {{2, 3}};  // differ along e1

  MetricLearnConfig cfg;
  const auto result = learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2),
                                        cfg);
  const MatrixXd& lam = result.lambda.matrix();
  CHECK(lam(1, 1) <= 1e-3 * lam(0, 0));
  CHECK(result.constraint_value >= cfg.lambda_bar - 1e-8);
}

TEST_CASE("learn_mahalanobis scales linearly in lambda_bar") {
  const Dataset data = axis_pair_data();
  PairSets pairs;
  pairs.must_link = {{0, 1}};
  pairs.cannot_link = {{2, 3}};

  MetricLearnConfig cfg;
  const auto base = learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2),
                                      cfg);
  cfg.lambda_bar = 2.0;
  const auto doubled =
      learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2), cfg);
  CHECK((doubled.lambda.matrix() - 2.0 * base.lambda.matrix()).norm() <=
        1e-6 * std::max(1.0, base.lambda.matrix().norm()));
}

TEST_CASE("learn_mahalanobis objective is no larger than the feasible start") {
  const Dataset data = synth_figure1b(60, 2, 4.0, 3);
  const auto pairs = build_pair_sets(data, 3);
  REQUIRE(!pairs.cannot_link.empty());

  // Feasible start: identity rescaled onto the constraint level.
  double must0 = 0.0, cannot0 = 0.0;
  for (auto [i, j] : pairs.must_link)
    must0 += (data.features.row(i) - data.features.row(j)).squaredNorm();
  for (auto [i, j] : pairs.cannot_link)
    cannot0 += (data.features.row(i) - data.features.row(j)).squaredNorm();
  const double start_objective = must0 / cannot0;

  MetricLearnConfig cfg;
  const auto result =
      learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2), cfg);
  CHECK(result.objective <= start_objective + 1e-9);
  CHECK(result.constraint_value >= cfg.lambda_bar - 1e-8);
}

TEST_CASE("learn_mahalanobis requires a nonempty cannot-link set") {
  const Dataset data = axis_pair_data();
  PairSets pairs;
  pairs.must_link = {{0, 1}};
  CHECK_THROWS_AS(learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2),
                                    MetricLearnConfig{}),
                  std::invalid_argument);
}

TEST_CASE("directionality on the synthetic: informative axis dominates") {
  // Label depends only on x(0); the learned cost should make moving along
  // x(0) expensive relative to x(1).
  int wins = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const Dataset data = synth_figure1b(200, 2, 6.0, 100 + seed);
    const auto pairs = build_pair_sets(data, 5);
    MetricLearnConfig cfg;
    const auto result =
        learn_mahalanobis(data, pairs, FeatureMap(FeatureMapKind::identity, 2), cfg);
    const MatrixXd& lam = result.lambda.matrix();
    if (lam(0, 0) / (lam(1, 1) + 1e-6) >= 5.0) ++wins;
  }
  CHECK(wins >= 4);
}

TEST_CASE("pd_floor formula, fixed point, and certification") {
  MatrixXd d2 = VectorXd{{2.0, 0.0}}.asDiagonal();
  const PsdMatrix floored = pd_floor(PsdMatrix(d2), 0.1);
  CHECK(floored.matrix()(0, 0) == doctest::Approx(1.9));
  CHECK(floored.matrix()(1, 1) == doctest::Approx(0.1));
  CHECK(floored.min_eigenvalue_bound() >= 0.1);
  CHECK(floored.certified_invertible());

  const PsdMatrix id = pd_floor(PsdMatrix::identity(3), 0.37);
  CHECK((id.matrix() - MatrixXd::Identity(3, 3)).norm() <= 1e-12);

  // gamma -> 1 limit approaches the identity.
  const PsdMatrix near_id = pd_floor(PsdMatrix(d2), 1.0 - 1e-9);
  CHECK((near_id.matrix() - MatrixXd::Identity(2, 2)).norm() <= 1e-6);

  CHECK_THROWS_AS(pd_floor(PsdMatrix(MatrixXd::Zero(2, 2).eval()), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(pd_floor(PsdMatrix::identity(2), 1.5), std::invalid_argument);
}

TEST_CASE("apply_feature_map identity, quadratic enumeration, zero input") {
  const FeatureMap ident(FeatureMapKind::identity, 2);
  VectorXd x(2);
  x << 1, 2;
  CHECK((apply_feature_map(ident, x) - x).norm() == 0.0);

  const FeatureMap quad(FeatureMapKind::linear_quadratic, 2);
  CHECK(quad.output_dim() == 5);
  VectorXd expected(5);
  expected << 1, 2, 1, 2, 4;  // x1, x2, x1*x1, x1*x2, x2*x2
  CHECK((apply_feature_map(quad, x) - expected).norm() == 0.0);

  CHECK(apply_feature_map(quad, VectorXd::Zero(2)).norm() == 0.0);
  VectorXd bad(3);
  CHECK_THROWS_AS(apply_feature_map(quad, bad), std::invalid_argument);
}

TEST_CASE("feature map is injective on a finite sample") {
  const FeatureMap quad(FeatureMapKind::linear_quadratic, 3);
  std::mt19937_64 engine(5);
  std::normal_distribution<double> normal;
  std::vector<VectorXd> images;
  for (int s = 0; s < 50; ++s) {
    VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = normal(engine);
    images.push_back(quad(x));
  }
  for (size_t a = 0; a < images.size(); ++a)
    for (size_t b = a + 1; b < images.size(); ++b)
      CHECK((images[a] - images[b]).norm() > 1e-8);
}
