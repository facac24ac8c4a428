#include "geopmp/builtin_maps.hpp"
#include "geopmp/errors.hpp"
#include "geopmp/tents.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace geopmp;
using geopmp::test_support::mat;
using geopmp::test_support::vec;

namespace {

SmoothMap affine_g(const Mat& G, const Vec& h) { return builtin::affine_constraint(G, h, 1); }

ManifoldPoint flat_point(const Vec& x) {
  return ManifoldPoint(Manifold::euclidean(static_cast<int>(x.size())), x);
}

}  // namespace

TEST(LocalTent, BoxFaces) {
  const auto box = ControlSet::box(vec({-1}), vec({1}));
  const ConeH at_top = local_tent(box, vec({1}));
  EXPECT_TRUE(at_top.contains_direction(vec({-1})));
  EXPECT_FALSE(at_top.contains_direction(vec({1})));
  const ConeH inside = local_tent(box, vec({0}));
  EXPECT_EQ(inside.G.rows(), 0);
  EXPECT_TRUE(inside.contains_direction(vec({1})) && inside.contains_direction(vec({-1})));
  EXPECT_THROW(local_tent(box, vec({1.5})), NotInSetError);
}

TEST(LocalTent, DiskHalfSpace) {
  // Half-space through the gradient (2, 0) of |u|^2 - 1 at (1, 0).
  const ConeH t = local_tent(ControlSet::ball(vec({0, 0}), 1.0), vec({1, 0}));
  ASSERT_EQ(t.G.rows(), 1);
  EXPECT_LT((t.G.row(0).transpose().normalized() - vec({1, 0})).norm(), 1e-6);
  EXPECT_TRUE(t.contains_direction(vec({-1, 5})));
  EXPECT_TRUE(t.contains_direction(vec({0, -1})));
  EXPECT_FALSE(t.contains_direction(vec({0.1, 0})));
}

TEST(LocalTent, AffineAndFullSpace) {
  const ConeH a = local_tent(ControlSet::affine(mat({{1, 1}}), vec({1})), vec({0.5, 0.5}));
  EXPECT_TRUE(a.contains_direction(vec({1, -1})));
  EXPECT_FALSE(a.contains_direction(vec({1, 0})));
  const ConeH f = local_tent(ControlSet::full(3), vec({7, 8, 9}));
  EXPECT_TRUE(f.contains_direction(vec({1, -2, 3})));
}

TEST(LocalTent, PolytopeActiveRows) {
  const auto tri = ControlSet::polytope(mat({{-1, 0}, {0, -1}, {1, 1}}), vec({0, 0, 1}));
  const ConeH corner = local_tent(tri, vec({0, 0}));
  EXPECT_EQ(corner.G.rows(), 2);
  EXPECT_TRUE(corner.contains_direction(vec({1, 2})));
  EXPECT_FALSE(corner.contains_direction(vec({-1, 2})));
}

TEST(DualCone, Examples) {
  ConeH half{vec({1}), mat({{1}}), Mat(0, 1)};
  ConeV d = dual_cone(half);
  ASSERT_EQ(d.generators.size(), 1u);
  EXPECT_EQ(d.generators[0](0), 1.0);

  ConeH full{Vec::Zero(2), Mat(0, 2), Mat(0, 2)};
  d = dual_cone(full);
  EXPECT_TRUE(d.generators.empty() && d.lineality.empty());
  EXPECT_NEAR(project_onto_cone(d, vec({3, 4})).distance, 5.0, 1e-14);

  ConeH quadrant{Vec::Zero(2), Mat::Identity(2, 2), Mat(0, 2)};
  d = dual_cone(quadrant);
  ASSERT_EQ(d.generators.size(), 2u);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ud(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const Vec y = ud(rng) * d.generators[0] + ud(rng) * d.generators[1];
    const Vec dir = -vec({ud(rng), ud(rng)});
    EXPECT_LE(y.dot(dir), 1e-12);
  }
}

TEST(DualCone, ProjectionDistance) {
  ConeH upper{vec({1}), mat({{1}}), Mat(0, 1)};
  const ConeV d = dual_cone(upper);
  EXPECT_NEAR(project_onto_cone(d, vec({2})).distance, 0.0, 1e-15);
  EXPECT_NEAR(project_onto_cone(d, vec({-2})).distance, 2.0, 1e-15);
}

TEST(DualCone, FarkasAgreesWithVertexEnumeration) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  int inside = 0, outside = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3, rows = trial % 5, eqs = (trial % 7 == 0 && n > 1) ? 1 : 0;
    const ConeH cone{Vec::Zero(n), Mat::NullaryExpr(rows, n, [&] { return nd(rng); }),
                     Mat::NullaryExpr(eqs, n, [&] { return nd(rng); })};
    const ConeV dual = dual_cone(cone);
    for (int k = 0; k < 5; ++k) {
      const Vec y = Vec::NullaryExpr(n, [&] { return nd(rng); });
      const bool in_dual = project_onto_cone(dual, y).distance <= 1e-9 * (1 + y.norm());
      const bool oracle = oracle::max_over_cone_box(cone.G, cone.Eq, y) <= 1e-9 * (1 + y.norm());
      EXPECT_EQ(in_dual, oracle) << "trial " << trial;
      (in_dual ? inside : outside)++;
    }
  }
  EXPECT_GT(inside, 20);
  EXPECT_GT(outside, 20);
}

TEST(LocalTent, DirectionsEnterTheSet) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> nd;
  const std::vector<std::pair<ControlSet, Vec>> cases{
      {ControlSet::box(vec({-1, -1}), vec({1, 1})), vec({1, -1})},
      {ControlSet::box(vec({-1, -1}), vec({1, 1})), vec({1, 0.2})},
      {ControlSet::polytope(mat({{-1, 0}, {0, -1}, {1, 1}}), vec({0, 0, 1})), vec({0, 0})},
      {ControlSet::polytope(mat({{-1, 0}, {0, -1}, {1, 1}}), vec({0, 0, 1})), vec({0.5, 0.5})},
      {ControlSet::ball(vec({0, 0}), 1.0), vec({0.6, 0.8})},
      {ControlSet::affine(mat({{1, 2}}), vec({1})), vec({1, 0})},
  };
  for (const auto& [set, u] : cases) {
    const ConeH t = local_tent(set, u);
    int tested = 0;
    while (tested < 100) {
      Vec d = Vec::NullaryExpr(2, [&] { return nd(rng); });
      if (t.Eq.rows() > 0) d = null_space(t.Eq) * (null_space(t.Eq).transpose() * d);
      // strictly inside: every active row satisfied with margin
      if (t.G.rows() > 0 && (t.G * d).maxCoeff() > -1e-3 * d.norm()) continue;
      ++tested;
      EXPECT_LE(set.violation(u + 1e-4 * d / d.norm()), 1e-12) << to_string(set.kind());
    }
  }
}

TEST(ActiveSet, Examples) {
  const auto g = affine_g(Mat::Identity(2, 2), vec({0, 1}));
  EXPECT_EQ(active_set(g, flat_point(vec({0, 0}))), (ActiveSet{0}));
  EXPECT_TRUE(active_set(g, flat_point(vec({-1, 0}))).empty());
  EXPECT_THROW(active_set(g, flat_point(vec({0.5, 0}))), InfeasiblePointError);

  const auto circle = builtin::quadratic_constraint({{2 * Mat::Identity(2, 2), Vec::Zero(2), -1.0}}, 2, 1);
  EXPECT_EQ(active_set(circle, ManifoldPoint(Manifold::sphere(2), vec({0.6, 0.8}))), (ActiveSet{0}));
}

TEST(IsRegular, HandExamples) {
  const auto x0 = flat_point(vec({0}));
  EXPECT_TRUE(is_regular(affine_g(mat({{1}}), vec({0})), x0).regular);

  const auto r = is_regular(affine_g(mat({{1}, {-1}}), vec({0, 0})), x0);
  EXPECT_FALSE(r.regular);
  EXPECT_LT((r.witness - vec({1, 1})).norm(), 1e-12);

  EXPECT_TRUE(is_regular(affine_g(Mat::Identity(2, 2), vec({0, 0})), flat_point(vec({0, 0}))).regular);
  EXPECT_EQ(oracle::max_annihilated_mass(Mat::Identity(2, 2)).first, 0.0);
}

TEST(IsRegular, InactiveConstraintsIgnored) {
  // (x, -x - 1): the second row is inactive at 0, so its gradient cannot cancel.
  EXPECT_TRUE(is_regular(affine_g(mat({{1}, {-1}}), vec({0, 1})), flat_point(vec({0}))).regular);
}

TEST(IsRegular, ScaleInvariantAndMatchesOracle) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> pos(0.1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3, r = 1 + trial % 4;
    Mat G = Mat::NullaryExpr(r, n, [&] { return nd(rng); });
    if (r >= 2 && trial % 2 == 0) G.row(r - 1) = -(pos(rng) * G.row(0) + pos(rng) * G.row(r - 2));
    const Vec x = Vec::NullaryExpr(n, [&] { return nd(rng); });
    Vec h = G * x;
    for (int j = 0; j < r; ++j)
      if (trial % 3 == 0 && j == 0) h(j) += 1.0;  // make one row inactive
    const auto p = flat_point(x);
    const auto res = is_regular(affine_g(G, h), p);

    Mat A(n, res.active.size());
    for (size_t k = 0; k < res.active.size(); ++k) A.col(k) = G.row(res.active[k]).transpose();
    const bool oracle_regular = oracle::max_annihilated_mass(A).first <= 1e-9;
    EXPECT_EQ(res.regular, oracle_regular) << "trial " << trial;

    const Vec s = Vec::NullaryExpr(r, [&] { return pos(rng); });
    EXPECT_EQ(is_regular(affine_g(s.asDiagonal() * G, s.asDiagonal() * h), p).regular, res.regular);
  }
}
